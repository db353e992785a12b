#pragma once

// Deterministic low-discrepancy sampling used by every estimator. Nothing here
// draws from a random engine: a (count, seed) pair always yields the same set.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace vopt {

/// Radical inverse of `index` in `base` (van der Corput), in [0, 1).
inline double radical_inverse(std::uint64_t index, unsigned base)
{
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

/// The first primes, enough for Halton points in dimension <= 16.
inline unsigned halton_base(int axis)
{
  static constexpr unsigned primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                        23, 29, 31, 37, 41, 43, 47, 53};
  return primes[axis % 16];
}

/// Halton point `index` in [0,1)^dim, starting at axis offset `first_axis`.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> halton_point(std::uint64_t index, Eigen::Index dim,
                                                      int first_axis = 0)
{
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    u(i) = static_cast<Scalar>(radical_inverse(index, halton_base(first_axis + static_cast<int>(i))));
  return u;
}

/// Unit directions in R^dim, one per column.
///
/// dim 1: alternating +1/-1. dim 2: `m` equally spaced angles (rotated by a
/// seed-dependent offset; seed 0 keeps the axes and diagonals when m % 8 == 0).
/// dim >= 3: the 2*dim signed axes followed by Halton points pushed through
/// Box-Muller and normalized.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sphere_directions(Eigen::Index dim, Eigen::Index m,
                                                                       std::uint64_t seed = 0)
{
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat dirs(dim, m);
  if (dim == 1) {
    for (Eigen::Index j = 0; j < m; ++j)
      dirs(0, j) = (j % 2 == 0) ? Scalar(1) : Scalar(-1);
    return dirs;
  }
  if (dim == 2) {
    const double offset = seed == 0 ? 0.0 : radical_inverse(seed, 2);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double theta = 2.0 * std::numbers::pi * (static_cast<double>(j) + offset) / static_cast<double>(m);
      dirs(0, j) = static_cast<Scalar>(std::cos(theta));
      dirs(1, j) = static_cast<Scalar>(std::sin(theta));
    }
    return dirs;
  }
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < dim && col < m; ++i) {
    for (int sign : {1, -1}) {
      if (col >= m)
        break;
      dirs.col(col).setZero();
      dirs(i, col) = Scalar(sign);
      ++col;
    }
  }
  std::uint64_t index = seed * 7919 + 1;
  while (col < m) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> g(dim);
    for (Eigen::Index i = 0; i < dim; i += 2) {
      const double u1 = std::max(radical_inverse(index, halton_base(static_cast<int>(i))), 1e-12);
      const double u2 = radical_inverse(index, halton_base(static_cast<int>(i) + 1));
      const double r = std::sqrt(-2.0 * std::log(u1));
      g(i) = static_cast<Scalar>(r * std::cos(2.0 * std::numbers::pi * u2));
      if (i + 1 < dim)
        g(i + 1) = static_cast<Scalar>(r * std::sin(2.0 * std::numbers::pi * u2));
    }
    ++index;
    const Scalar n = g.norm();
    if (n < Scalar(1e-9))
      continue;
    dirs.col(col++) = g / n;
  }
  return dirs;
}

/// `m` points of the closed ball B(center, radius), one per column: the center
/// is not included; radii follow r*u^(1/dim) with u from a Halton axis.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
ball_samples(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& center, Scalar radius, Eigen::Index m,
             std::uint64_t seed = 0)
{
  const Eigen::Index dim = center.size();
  const auto dirs = sphere_directions<Scalar>(dim, m, seed);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> pts(dim, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double u = radical_inverse(static_cast<std::uint64_t>(j) + 1 + seed * 104729, 3);
    const double rho = radius * std::pow(std::max(u, 1e-6), 1.0 / static_cast<double>(dim));
    pts.col(j) = center + static_cast<Scalar>(rho) * dirs.col(j);
  }
  return pts;
}

} // namespace vopt
