#pragma once

// Random instance generators shared by the test binaries.

#include <cstdint>
#include <random>
#include <vector>

#include "rectspec/rectspec.hpp"

namespace rstest {

using namespace rectspec;

inline double unit(std::mt19937_64& rng) { return detail::uniform(rng, 0.0, 1.0); }

// Every cell filled with probability `density`, values uniform in [lo, hi).
inline RectTensor random_tensor(TensorShape shape, std::mt19937_64& rng,
                                double density = 1.0, double lo = 0.0, double hi = 1.0,
                                Storage storage = Storage::automatic) {
  TensorBuilder b(shape);
  std::vector<Index> idx(shape.order(), 0);
  const std::uint64_t cells = shape.cells();
  for (std::uint64_t c = 0; c < cells; ++c) {
    std::uint64_t code = c;
    for (std::size_t k = shape.order(); k-- > 0;) {
      const std::size_t dim = k < shape.r ? shape.n : shape.m;
      idx[k] = static_cast<Index>(code % dim);
      code /= dim;
    }
    if (density < 1.0 && unit(rng) >= density) continue;
    const double v = detail::uniform(rng, lo, hi);
    b.set(std::span<const Index>(idx.data(), shape.r),
          std::span<const Index>(idx.data() + shape.r, shape.s), v);
  }
  return b.build(storage);
}

// Strictly positive entries in [0.1, 1).
inline RectTensor random_positive(TensorShape shape, std::mt19937_64& rng) {
  return random_tensor(shape, rng, 1.0, 0.1, 1.0);
}

inline VectorPair random_pair(std::size_t n, std::size_t m, std::mt19937_64& rng,
                              double lo = 0.1, double hi = 1.0) {
  VectorPair z{std::vector<double>(n), std::vector<double>(m)};
  for (auto& v : z.x) v = detail::uniform(rng, lo, hi);
  for (auto& v : z.y) v = detail::uniform(rng, lo, hi);
  return z;
}

inline VectorPair random_sphere_pair(std::size_t n, std::size_t m, PQNorms pq,
                                     std::mt19937_64& rng) {
  return normalize_to_sphere(random_pair(n, m, rng, 0.0, 1.0), pq);
}

// Naive evaluation straight from the definition: loop over every cell.
inline double naive_form(const RectTensor& a, const VectorPair& z) {
  const auto& sh = a.shape();
  std::vector<Index> idx(sh.order(), 0);
  double total = 0.0;
  for (std::uint64_t c = 0; c < sh.cells(); ++c) {
    std::uint64_t code = c;
    for (std::size_t k = sh.order(); k-- > 0;) {
      const std::size_t dim = k < sh.r ? sh.n : sh.m;
      idx[k] = static_cast<Index>(code % dim);
      code /= dim;
    }
    double term = a.at(std::span<const Index>(idx.data(), sh.r),
                       std::span<const Index>(idx.data() + sh.r, sh.s));
    for (std::size_t k = 0; k < sh.r; ++k) term *= z.x[idx[k]];
    for (std::size_t k = sh.r; k < sh.order(); ++k) term *= z.y[idx[k]];
    total += term;
  }
  return total;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace rstest
