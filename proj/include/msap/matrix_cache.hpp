#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "msap/assembly.hpp"
#include "msap/media.hpp"
#include "msap/mesh.hpp"
#include "msap/msfem_basis.hpp"
#include "msap/types.hpp"

namespace msap {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Hex digest of the canonical (sorted-key, compact) dump of `value`.
std::string fingerprint(const nlohmann::json& value);

/// Identity of a media for cache keys: name, period, delta and a fixed grid
/// of samples, so tabulated fields with equal names still differ.
nlohmann::json media_identity(const MediaSpec& media);

/// Key of an assembled spatial system.
nlohmann::json spatial_identity(const MediaSpec& media, const NestedMesh& mesh, BasisMode mode,
                                int order, int quadrature);

/// One dense matrix on disk: a single-line JSON header followed by the
/// row-major little-endian float64 payload.
void write_matrix(const std::filesystem::path& path, const Matrix& matrix, const std::string& key,
                  bool symmetric);
/// Returns nothing when the file is missing or its header key differs.
std::optional<Matrix> read_matrix(const std::filesystem::path& path, const std::string& key);

/// Directory of cached spatial systems. Writes go to a temporary file that
/// is renamed into place, so concurrent writers never expose partial files.
class MatrixCache {
 public:
  explicit MatrixCache(std::filesystem::path directory);

  const std::filesystem::path& directory() const { return directory_; }

  std::optional<SpatialSystem> load(const std::string& key) const;
  void store(const std::string& key, const SpatialSystem& system) const;

 private:
  std::filesystem::path entry(const std::string& key, const std::string& name) const;

  std::filesystem::path directory_;
};

/// Loads the system for (media, mesh, mode) from the cache when present,
/// otherwise builds the basis, assembles, and stores. `cache` may be null.
SpatialSystem cached_spatial_system(const MatrixCache* cache, const MediaSpec& media,
                                    const NestedMesh& mesh, BasisMode mode, int order,
                                    int quadrature, int threads, bool* hit = nullptr);

}  // namespace msap
