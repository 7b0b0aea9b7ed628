#include "msap/matrix_cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "msap/errors.hpp"

namespace msap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "msap-matrix-1";

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
  return r;
}

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

// Unique per process and thread so concurrent writers never share a file.
fs::path temporary_for(const fs::path& path) {
  std::ostringstream tag;
  tag << ".tmp." << ::getpid() << '.' << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
      << reinterpret_cast<std::uintptr_t>(&tag);
  return fs::path(path.string() + tag.str());
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = temporary_for(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

Matrix dense(const SparseMatrix& m) { return Matrix(m); }

const char* mode_name(BasisMode mode) {
  return mode == BasisMode::Multiscale ? "multiscale" : "affine";
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint(const json& value) {
  const std::string text = value.dump();
  return hex(fnv1a(text.data(), text.size()));
}

json media_identity(const MediaSpec& media) {
  constexpr int kSamples = 17;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const int ny = media.dimension() == 2 ? kSamples : 1;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < kSamples; ++i) {
      const Real x = -1.0 + 2.0 * (i + 0.37) / kSamples;
      const Real y = media.dimension() == 2 ? -1.0 + 2.0 * (j + 0.61) / kSamples : 0.0;
      const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(media(x, y)));
      h = fnv1a(&bits, sizeof bits, h);
    }
  }
  return {{"name", media.name()},
          {"dimension", media.dimension()},
          {"delta", media.delta()},
          {"period", {media.period().x(), media.period().y()}},
          {"samples", hex(h)}};
}

json spatial_identity(const MediaSpec& media, const NestedMesh& mesh, BasisMode mode, int order,
                      int quadrature) {
  return {{"media", media_identity(media)},
          {"mesh",
           {{"dimension", mesh.dimension()},
            {"coarse_cells", mesh.coarse_cells_per_axis()},
            {"ratio", mesh.ratio()},
            {"lower", mesh.lower()},
            {"upper", mesh.upper()}}},
          {"basis", mode_name(mode)},
          {"order", order},
          {"quadrature", quadrature}};
}

void write_matrix(const fs::path& path, const Matrix& matrix, const std::string& key,
                  bool symmetric) {
  const json header = {{"format", kFormat},
                       {"key", key},
                       {"rows", matrix.rows()},
                       {"cols", matrix.cols()},
                       {"symmetric", symmetric},
                       {"layout", "row-major"},
                       {"dtype", "float64-le"}};
  std::string bytes = header.dump();
  bytes.push_back('\n');
  const std::size_t offset = bytes.size();
  bytes.resize(offset + 8 * static_cast<std::size_t>(matrix.size()));
  char* out = bytes.data() + offset;
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(matrix(r, c)));
      std::memcpy(out, &bits, 8);
      out += 8;
    }
  }
  write_atomic(path, bytes);
}

std::optional<Matrix> read_matrix(const fs::path& path, const std::string& key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty cache file " + path.string());
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError("bad cache header in " + path.string() + ": " + e.what());
  }
  if (header.value("format", "") != kFormat || header.value("key", "") != key) return std::nullopt;
  const auto rows = header.at("rows").get<Eigen::Index>();
  const auto cols = header.at("cols").get<Eigen::Index>();
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::uint64_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), 8)) {
        throw IoError("truncated cache payload in " + path.string());
      }
      m(r, c) = std::bit_cast<Real>(to_little(bits));
    }
  }
  return m;
}

MatrixCache::MatrixCache(fs::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) throw IoError("cannot create cache directory " + directory_.string());
}

fs::path MatrixCache::entry(const std::string& key, const std::string& name) const {
  return directory_ / key / (name + ".bin");
}

std::optional<SpatialSystem> MatrixCache::load(const std::string& key) const {
  std::ifstream meta_in(directory_ / key / "meta.json");
  if (!meta_in) return std::nullopt;
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::exception&) {
    return std::nullopt;
  }
  SpatialSystem sys;
  sys.dimension = meta.at("dimension").get<int>();
  sys.mode = meta.at("basis").get<std::string>() == "affine" ? BasisMode::Affine
                                                              : BasisMode::Multiscale;
  sys.homogenized = meta.at("homogenized").get<bool>();

  bool complete = true;
  auto sparse = [&](const std::string& name, SparseMatrix& target) {
    auto m = read_matrix(entry(key, name), key);
    if (!m) {
      complete = false;
      return;
    }
    target = m->sparseView();
  };
  auto full = [&](const std::string& name, Matrix& target) {
    auto m = read_matrix(entry(key, name), key);
    if (!m) {
      complete = false;
      return;
    }
    target = std::move(*m);
  };

  sparse("mass", sys.mass);
  sparse("stiffness", sys.stiffness);
  if (!sys.homogenized) {
    sparse("weighted_mass", sys.weighted_mass);
    sparse("inverse_weighted_mass", sys.inverse_weighted_mass);
  }
  for (int k = 0; k < sys.dimension; ++k) {
    const std::string axis = std::to_string(k);
    sparse("gradient_" + axis, sys.gradient[k]);
    sparse("weighted_gradient_" + axis, sys.weighted_gradient[k]);
    full("limit_part_" + axis, sys.limit_parts[k]);
  }
  full("limit", sys.limit);
  if (!complete) return std::nullopt;
  return sys;
}

void MatrixCache::store(const std::string& key, const SpatialSystem& sys) const {
  std::error_code ec;
  fs::create_directories(directory_ / key, ec);
  if (ec) throw IoError("cannot create " + (directory_ / key).string());

  write_matrix(entry(key, "mass"), dense(sys.mass), key, true);
  write_matrix(entry(key, "stiffness"), dense(sys.stiffness), key, true);
  if (!sys.homogenized) {
    write_matrix(entry(key, "weighted_mass"), dense(sys.weighted_mass), key, true);
    write_matrix(entry(key, "inverse_weighted_mass"), dense(sys.inverse_weighted_mass), key, true);
  }
  for (int k = 0; k < sys.dimension; ++k) {
    const std::string axis = std::to_string(k);
    write_matrix(entry(key, "gradient_" + axis), dense(sys.gradient[k]), key, false);
    write_matrix(entry(key, "weighted_gradient_" + axis), dense(sys.weighted_gradient[k]), key,
                 false);
    write_matrix(entry(key, "limit_part_" + axis), sys.limit_parts[k], key, false);
  }
  write_matrix(entry(key, "limit"), sys.limit, key, false);

  // The metadata goes last; its presence marks a complete entry.
  const json meta = {{"dimension", sys.dimension},
                     {"basis", mode_name(sys.mode)},
                     {"homogenized", sys.homogenized}};
  write_atomic(directory_ / key / "meta.json", meta.dump(2) + "\n");
}

SpatialSystem cached_spatial_system(const MatrixCache* cache, const MediaSpec& media,
                                    const NestedMesh& mesh, BasisMode mode, int order,
                                    int quadrature, int threads, bool* hit) {
  const std::string key = fingerprint(spatial_identity(media, mesh, mode, order, quadrature));
  if (cache) {
    if (auto sys = cache->load(key)) {
      if (hit) *hit = true;
      return std::move(*sys);
    }
  }
  if (hit) *hit = false;
  const BasisSet basis = build_global_basis(mesh, media, mode, threads);
  SpatialSystem sys = assemble_spatial(basis, media, threads);
  if (cache) cache->store(key, sys);
  return sys;
}

}  // namespace msap
