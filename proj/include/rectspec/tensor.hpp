#pragma once

// Rectangular tensors a_{i_1..i_r}^{j_1..j_s}: storage, the multilinear form
// f_A(x, y) = A x^r y^s, the two partial contractions, and the symmetry,
// transpose and Gram operations built on them.
//
// Indices are 0-based in this API. File formats and error messages are
// 1-based.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rectspec/errors.hpp"

namespace rectspec {

using Index = std::uint32_t;

// Tensors with at most this many cells are stored densely by default.
inline constexpr std::uint64_t kDenseCellLimit = 4096;

// Absolute tolerance used by is_partially_symmetric when none is given.
inline constexpr double kSymmetryTolerance = 1e-12;

struct TensorShape {
  std::size_t r = 1;  // number of lower indices
  std::size_t s = 1;  // number of upper indices
  std::size_t n = 1;  // range of each lower index
  std::size_t m = 1;  // range of each upper index

  std::size_t order() const noexcept { return r + s; }

  // Total number of cells n^r * m^s. Throws DimensionError on overflow.
  std::uint64_t cells() const {
    std::uint64_t total = 1;
    auto mul = [&](std::size_t f) {
      if (f != 0 && total > std::numeric_limits<std::uint64_t>::max() / f)
        throw DimensionError("tensor shape overflows a 64-bit cell index");
      total *= f;
    };
    for (std::size_t k = 0; k < r; ++k) mul(n);
    for (std::size_t k = 0; k < s; ++k) mul(m);
    return total;
  }

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

inline std::string to_string(const TensorShape& sh) {
  return "(" + std::to_string(sh.r) + "," + std::to_string(sh.s) +
         ")-order (" + std::to_string(sh.n) + "," + std::to_string(sh.m) +
         ")-dimensional";
}

// One cell address: r lower indices in [0, n) and s upper indices in [0, m).
struct MultiIndex {
  std::vector<Index> lower;
  std::vector<Index> upper;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

// A point (x, y) of R^n x R^m.
struct VectorPair {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return x.size() + y.size(); }

  // Coordinate k of the concatenation (x, y).
  double operator[](std::size_t k) const {
    return k < x.size() ? x[k] : y[k - x.size()];
  }

  friend bool operator==(const VectorPair&, const VectorPair&) = default;
};

enum class Storage { automatic, sparse, dense };

enum class Symmetry : int { unchecked = 0, yes = 1, no = 2 };

namespace detail {

inline void check_pair(const TensorShape& sh, const VectorPair& z,
                       const char* op) {
  if (z.x.size() != sh.n || z.y.size() != sh.m)
    throw DimensionError(std::string(op) + ": expected vectors of length (" +
                         std::to_string(sh.n) + "," + std::to_string(sh.m) +
                         "), got (" + std::to_string(z.x.size()) + "," +
                         std::to_string(z.y.size()) + ")");
}

// Atomic flag that can live inside a copyable value type.
class SymmetryCache {
 public:
  SymmetryCache() = default;
  SymmetryCache(const SymmetryCache& o) : v_(o.v_.load()) {}
  SymmetryCache& operator=(const SymmetryCache& o) {
    v_.store(o.v_.load());
    return *this;
  }
  Symmetry get() const { return static_cast<Symmetry>(v_.load()); }
  void set(Symmetry s) const { v_.store(static_cast<int>(s)); }

 private:
  mutable std::atomic<int> v_{0};
};

}  // namespace detail

class TensorBuilder;

// Nonnegative-by-convention (r,s)-order (n,m)-dimensional tensor.
//
// Immutable after construction. Stored either as a sorted coordinate list or
// as a dense array; both are visited in lexicographic MultiIndex order
// (lower indices first, then upper) and skip zero cells, so every kernel
// performs the same floating-point operations in the same order regardless
// of storage.
class RectTensor {
 public:
  // Zero tensor of the given shape.
  explicit RectTensor(TensorShape shape = {}, Storage storage = Storage::automatic)
      : shape_(shape) {
    shape_.cells();
    if (shape.r == 0 || shape.s == 0 || shape.n == 0 || shape.m == 0)
      throw DimensionError("tensor orders and dimensions must be positive");
    dense_ = storage == Storage::dense ||
             (storage == Storage::automatic && shape.cells() <= kDenseCellLimit);
    if (dense_) cells_.assign(shape.cells(), 0.0);
  }

  // Every cell equal to value.
  static RectTensor constant(TensorShape shape, double value,
                             Storage storage = Storage::automatic);

  // (1,1)-order tensor a_i^j = rows[i][j].
  static RectTensor from_matrix(const std::vector<std::vector<double>>& rows,
                                Storage storage = Storage::automatic);

  const TensorShape& shape() const noexcept { return shape_; }
  std::size_t r() const noexcept { return shape_.r; }
  std::size_t s() const noexcept { return shape_.s; }
  std::size_t n() const noexcept { return shape_.n; }
  std::size_t m() const noexcept { return shape_.m; }

  bool is_dense() const noexcept { return dense_; }
  std::size_t nonzeros() const noexcept { return nnz_; }
  bool is_zero() const noexcept { return nnz_ == 0; }
  bool is_nonnegative() const noexcept { return nonnegative_; }

  // Smallest positive entry, or 0 when there is none.
  double min_positive() const noexcept { return min_positive_; }

  double at(std::span<const Index> lower, std::span<const Index> upper) const {
    return value_at_key(key_of(lower, upper));
  }
  double at(const MultiIndex& idx) const { return at(idx.lower, idx.upper); }

  // Calls f(std::span<const Index> idx, double value) for every nonzero cell
  // in lexicographic order. idx holds the r lower indices then the s upper.
  template <class F>
  void for_each_nonzero(F&& f) const {
    const std::size_t ord = shape_.order();
    if (!dense_) {
      for (std::size_t e = 0; e < values_.size(); ++e)
        f(std::span<const Index>(indices_.data() + e * ord, ord), values_[e]);
      return;
    }
    std::vector<Index> idx(ord, 0);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (cells_[c] != 0.0) f(std::span<const Index>(idx), cells_[c]);
      for (std::size_t k = ord; k-- > 0;) {
        const Index range = static_cast<Index>(k < shape_.r ? shape_.n : shape_.m);
        if (++idx[k] < range) break;
        idx[k] = 0;
      }
    }
  }

  // Cached partial-symmetry state at the default tolerance.
  Symmetry symmetry_flag() const noexcept { return symmetry_.get(); }
  void cache_symmetry(Symmetry s) const noexcept { symmetry_.set(s); }

  // Same entries, different storage.
  RectTensor with_storage(Storage storage) const;

  // Same entry map (storage mode is ignored).
  friend bool operator==(const RectTensor& a, const RectTensor& b) {
    if (!(a.shape_ == b.shape_) || a.nnz_ != b.nnz_) return false;
    std::vector<std::pair<std::uint64_t, double>> ea, eb;
    a.collect(ea);
    b.collect(eb);
    return ea == eb;
  }

  // Row-major cell key for lexicographic MultiIndex order.
  std::uint64_t key_of(std::span<const Index> lower,
                       std::span<const Index> upper) const {
    if (lower.size() != shape_.r || upper.size() != shape_.s)
      throw DimensionError("multi-index must have " + std::to_string(shape_.r) +
                           " lower and " + std::to_string(shape_.s) +
                           " upper entries");
    std::uint64_t key = 0;
    for (Index i : lower) {
      if (i >= shape_.n)
        throw DimensionError("lower index " + std::to_string(i + 1) +
                             " outside [1.." + std::to_string(shape_.n) + "]");
      key = key * shape_.n + i;
    }
    for (Index j : upper) {
      if (j >= shape_.m)
        throw DimensionError("upper index " + std::to_string(j + 1) +
                             " outside [1.." + std::to_string(shape_.m) + "]");
      key = key * shape_.m + j;
    }
    return key;
  }

 private:
  friend class TensorBuilder;

  double value_at_key(std::uint64_t key) const {
    if (dense_) return cells_[key];
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return 0.0;
    return values_[static_cast<std::size_t>(it - keys_.begin())];
  }

  void collect(std::vector<std::pair<std::uint64_t, double>>& out) const {
    out.clear();
    out.reserve(nnz_);
    if (dense_) {
      for (std::size_t c = 0; c < cells_.size(); ++c)
        if (cells_[c] != 0.0) out.emplace_back(c, cells_[c]);
    } else {
      for (std::size_t e = 0; e < keys_.size(); ++e)
        out.emplace_back(keys_[e], values_[e]);
    }
  }

  void decode(std::uint64_t key, Index* idx) const {
    for (std::size_t k = shape_.order(); k-- > 0;) {
      const std::uint64_t range = k < shape_.r ? shape_.n : shape_.m;
      idx[k] = static_cast<Index>(key % range);
      key /= range;
    }
  }

  // Takes ownership of a sorted, zero-free entry list.
  void assign(const std::vector<std::pair<std::uint64_t, double>>& entries) {
    nnz_ = entries.size();
    nonnegative_ = true;
    min_positive_ = 0.0;
    for (const auto& [key, v] : entries) {
      if (v < 0.0 || std::isnan(v)) nonnegative_ = false;
      if (v > 0.0 && (min_positive_ == 0.0 || v < min_positive_)) min_positive_ = v;
    }
    if (dense_) {
      cells_.assign(shape_.cells(), 0.0);
      for (const auto& [key, v] : entries) cells_[key] = v;
      return;
    }
    const std::size_t ord = shape_.order();
    keys_.resize(nnz_);
    values_.resize(nnz_);
    indices_.resize(nnz_ * ord);
    for (std::size_t e = 0; e < nnz_; ++e) {
      keys_[e] = entries[e].first;
      values_[e] = entries[e].second;
      decode(keys_[e], indices_.data() + e * ord);
    }
  }

  TensorShape shape_;
  bool dense_ = true;
  std::size_t nnz_ = 0;
  bool nonnegative_ = true;
  double min_positive_ = 0.0;
  std::vector<double> cells_;           // dense
  std::vector<std::uint64_t> keys_;     // sparse, ascending
  std::vector<double> values_;          // sparse
  std::vector<Index> indices_;          // sparse, decoded keys
  detail::SymmetryCache symmetry_;
};

// Collects entries (last write wins) and freezes them into a RectTensor.
class TensorBuilder {
 public:
  explicit TensorBuilder(TensorShape shape) : proto_(shape, Storage::sparse) {}

  const TensorShape& shape() const noexcept { return proto_.shape(); }

  // Returns true when the cell already held a value that is now replaced.
  bool set(std::span<const Index> lower, std::span<const Index> upper,
           double value) {
    const auto key = proto_.key_of(lower, upper);
    auto [it, inserted] = entries_.insert_or_assign(key, value);
    (void)it;
    return !inserted;
  }
  bool set(const MultiIndex& idx, double value) {
    return set(idx.lower, idx.upper, value);
  }

  // Adds to the current value of the cell.
  void add(std::span<const Index> lower, std::span<const Index> upper,
           double value) {
    entries_[proto_.key_of(lower, upper)] += value;
  }

  RectTensor build(Storage storage = Storage::automatic) const {
    RectTensor t(proto_.shape(), storage);
    std::vector<std::pair<std::uint64_t, double>> list;
    list.reserve(entries_.size());
    for (const auto& [key, v] : entries_)
      if (v != 0.0) list.emplace_back(key, v);
    t.assign(list);
    return t;
  }

 private:
  RectTensor proto_;
  std::map<std::uint64_t, double> entries_;
};

inline RectTensor RectTensor::constant(TensorShape shape, double value,
                                       Storage storage) {
  RectTensor t(shape, storage);
  std::vector<std::pair<std::uint64_t, double>> list;
  if (value != 0.0) {
    const auto cells = shape.cells();
    list.reserve(cells);
    for (std::uint64_t c = 0; c < cells; ++c) list.emplace_back(c, value);
  }
  t.assign(list);
  return t;
}

inline RectTensor RectTensor::from_matrix(
    const std::vector<std::vector<double>>& rows, Storage storage) {
  if (rows.empty() || rows.front().empty())
    throw DimensionError("matrix must be non-empty");
  const std::size_t cols = rows.front().size();
  TensorBuilder b({1, 1, rows.size(), cols});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw DimensionError("ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) {
      const Index li[1] = {static_cast<Index>(i)};
      const Index ui[1] = {static_cast<Index>(j)};
      b.set(li, ui, rows[i][j]);
    }
  }
  return b.build(storage);
}

inline RectTensor RectTensor::with_storage(Storage storage) const {
  RectTensor t(shape_, storage);
  std::vector<std::pair<std::uint64_t, double>> list;
  collect(list);
  t.assign(list);
  t.cache_symmetry(symmetry_flag());
  return t;
}

// ---------------------------------------------------------------------------
// Multilinear kernels

// f_A(x, y) = sum a_{i..}^{j..} x_{i_1}..x_{i_r} y_{j_1}..y_{j_s}.
inline double evaluate_form(const RectTensor& a, const VectorPair& z) {
  detail::check_pair(a.shape(), z, "evaluate_form");
  const std::size_t r = a.r();
  double acc = 0.0;
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    double term = v;
    for (std::size_t k = 0; k < r; ++k) term *= z.x[idx[k]];
    for (std::size_t k = r; k < idx.size(); ++k) term *= z.y[idx[k]];
    acc += term;
  });
  return acc;
}

// (A x^{r-1} y^s)_i: the first lower index is left free.
inline std::vector<double> contract_x(const RectTensor& a, const VectorPair& z) {
  detail::check_pair(a.shape(), z, "contract_x");
  const std::size_t r = a.r();
  std::vector<double> out(a.n(), 0.0);
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    double term = v;
    for (std::size_t k = 1; k < r; ++k) term *= z.x[idx[k]];
    for (std::size_t k = r; k < idx.size(); ++k) term *= z.y[idx[k]];
    out[idx[0]] += term;
  });
  return out;
}

// (A x^r y^{s-1})_j: the first upper index is left free.
inline std::vector<double> contract_y(const RectTensor& a, const VectorPair& z) {
  detail::check_pair(a.shape(), z, "contract_y");
  const std::size_t r = a.r();
  std::vector<double> out(a.m(), 0.0);
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    double term = v;
    for (std::size_t k = 0; k < r; ++k) term *= z.x[idx[k]];
    for (std::size_t k = r + 1; k < idx.size(); ++k) term *= z.y[idx[k]];
    out[idx[r]] += term;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Symmetry, transpose, Gram product

namespace detail {

// Number of distinct orderings of a sorted index tuple.
inline double distinct_permutations(std::span<const Index> sorted) {
  double count = 1.0;
  std::size_t run = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    count *= static_cast<double>(k + 1);
    run = (k > 0 && sorted[k] == sorted[k - 1]) ? run + 1 : 1;
    count /= static_cast<double>(run);
  }
  return count;
}

struct OrbitKey {
  std::vector<Index> lower;
  std::vector<Index> upper;
  friend auto operator<=>(const OrbitKey&, const OrbitKey&) = default;
};

struct OrbitStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double sum = 0.0;
  bool uniform = true;  // all stored values bit-identical
};

inline std::map<OrbitKey, OrbitStats> orbits(const RectTensor& a) {
  std::map<OrbitKey, OrbitStats> out;
  const std::size_t r = a.r();
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    OrbitKey key{{idx.begin(), idx.begin() + r}, {idx.begin() + r, idx.end()}};
    std::sort(key.lower.begin(), key.lower.end());
    std::sort(key.upper.begin(), key.upper.end());
    auto& st = out[key];
    if (st.count == 0) {
      st.min = st.max = v;
    } else {
      st.uniform = st.uniform && v == st.min && v == st.max;
      st.min = std::min(st.min, v);
      st.max = std::max(st.max, v);
    }
    st.sum += v;
    ++st.count;
  });
  return out;
}

inline double orbit_size(const OrbitKey& key) {
  return distinct_permutations(key.lower) * distinct_permutations(key.upper);
}

}  // namespace detail

// True iff every cell agrees (within tol, absolute) with all cells obtained
// by permuting its lower indices among themselves and its upper indices among
// themselves. The result at the default tolerance is cached on the tensor.
inline bool is_partially_symmetric(const RectTensor& a,
                                   double tol = kSymmetryTolerance) {
  const bool cacheable = tol == kSymmetryTolerance;
  if (cacheable && a.symmetry_flag() != Symmetry::unchecked)
    return a.symmetry_flag() == Symmetry::yes;
  bool ok = true;
  if (a.r() > 1 || a.s() > 1) {
    for (const auto& [key, st] : detail::orbits(a)) {
      double lo = st.min, hi = st.max;
      if (static_cast<double>(st.count) < detail::orbit_size(key)) {
        lo = std::min(lo, 0.0);  // missing members are zero
        hi = std::max(hi, 0.0);
      }
      if (hi - lo > tol) {
        ok = false;
        break;
      }
    }
  }
  if (cacheable) a.cache_symmetry(ok ? Symmetry::yes : Symmetry::no);
  return ok;
}

// Average over S_r x S_s orbits. Preserves f_A exactly in exact arithmetic;
// orbits that are already constant are copied bit-for-bit.
inline RectTensor symmetrize(const RectTensor& a) {
  TensorBuilder b(a.shape());
  for (const auto& [key, st] : detail::orbits(a)) {
    const double size = detail::orbit_size(key);
    const double value = (st.uniform && static_cast<double>(st.count) == size)
                             ? st.min
                             : st.sum / size;
    std::vector<Index> lower = key.lower;
    do {
      std::vector<Index> upper = key.upper;
      do {
        b.set(lower, upper, value);
      } while (std::next_permutation(upper.begin(), upper.end()));
    } while (std::next_permutation(lower.begin(), lower.end()));
  }
  RectTensor out = b.build(a.is_dense() ? Storage::dense : Storage::sparse);
  out.cache_symmetry(Symmetry::yes);
  return out;
}

// Swap the roles of lower and upper indices: (r,s,n,m) -> (s,r,m,n).
inline RectTensor transpose(const RectTensor& a) {
  TensorBuilder b({a.s(), a.r(), a.m(), a.n()});
  const std::size_t r = a.r();
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    b.set(idx.subspan(r), idx.first(r), v);
  });
  RectTensor out = b.build(a.is_dense() ? Storage::dense : Storage::sparse);
  out.cache_symmetry(a.symmetry_flag());
  return out;
}

// B = A'A for a (1,s)-order tensor: b_{k_1..k_s}^{j_1..j_s} =
// sum_i a_i^{k_1..k_s} a_i^{j_1..j_s}. Result is (s,s)-order (m,m)-dimensional.
inline RectTensor gram_tensor(const RectTensor& a) {
  if (a.r() != 1)
    throw UnsupportedOrderError(
        "gram_tensor: defined only for (1,s)-order tensors, got r = " +
        std::to_string(a.r()));
  const std::size_t s = a.s();
  TensorBuilder b({s, s, a.m(), a.m()});
  // Entries arrive grouped by the single lower index.
  std::vector<std::pair<std::vector<Index>, double>> slice;
  Index current = 0;
  auto flush = [&] {
    for (const auto& [k, ak] : slice)
      for (const auto& [j, aj] : slice) b.add(k, j, ak * aj);
    slice.clear();
  };
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    if (!slice.empty() && idx[0] != current) flush();
    current = idx[0];
    slice.emplace_back(std::vector<Index>(idx.begin() + 1, idx.end()), v);
  });
  flush();
  return b.build(Storage::automatic);
}

}  // namespace rectspec
