#pragma once

// Piecewise (bi)linear kernels on a single fine cell. Local node order is
// (0,0), (1,0), (0,1), (1,1); in 1D only the first two are used.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "msap/types.hpp"

namespace msap::detail {

/// Exact stiffness int grad(phi_i) . grad(phi_j) of one cell.
inline Eigen::Matrix4d q1_stiffness(Real hx, Real hy) {
  const Real sx[2][2] = {{1 / hx, -1 / hx}, {-1 / hx, 1 / hx}};
  const Real sy[2][2] = {{1 / hy, -1 / hy}, {-1 / hy, 1 / hy}};
  const Real mx[2][2] = {{hx / 3, hx / 6}, {hx / 6, hx / 3}};
  const Real my[2][2] = {{hy / 3, hy / 6}, {hy / 6, hy / 3}};
  Eigen::Matrix4d k;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int ai = i % 2, bi = i / 2, aj = j % 2, bj = j / 2;
      k(i, j) = sx[ai][aj] * my[bi][bj] + mx[ai][aj] * sy[bi][bj];
    }
  return k;
}

inline Eigen::Matrix2d p1_stiffness(Real h) {
  Eigen::Matrix2d k;
  k << 1 / h, -1 / h, -1 / h, 1 / h;
  return k;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace msap::detail

namespace msap::detail {

/// int grad(phi_i)^T coeff grad(phi_j) over one hx x hy cell.
inline Eigen::Matrix4d q1_stiffness(Real hx, Real hy, const Mat2& coeff) {
  const Real sx[2][2] = {{1 / hx, -1 / hx}, {-1 / hx, 1 / hx}};
  const Real sy[2][2] = {{1 / hy, -1 / hy}, {-1 / hy, 1 / hy}};
  const Real mx[2][2] = {{hx / 3, hx / 6}, {hx / 6, hx / 3}};
  const Real my[2][2] = {{hy / 3, hy / 6}, {hy / 6, hy / 3}};
  // g[a][b] = int phi_a' phi_b along one axis.
  const Real g[2][2] = {{-0.5, -0.5}, {0.5, 0.5}};
  Eigen::Matrix4d k;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int ai = i % 2, bi = i / 2, aj = j % 2, bj = j / 2;
      const Real kxx = sx[ai][aj] * my[bi][bj];
      const Real kyy = mx[ai][aj] * sy[bi][bj];
      const Real kxy = g[ai][aj] * g[bj][bi];  // dphi_i/dx dphi_j/dy
      const Real kyx = g[aj][ai] * g[bi][bj];  // dphi_i/dy dphi_j/dx
      k(i, j) = coeff(0, 0) * kxx + coeff(1, 1) * kyy + coeff(0, 1) * kxy + coeff(1, 0) * kyx;
    }
  return k;
}

}  // namespace msap::detail
