#pragma once

// Independent oracles: brute-force maximization of f_A over the product of
// unit spheres, finite-difference gradients, the (p,q) power-mean midpoint,
// power iteration on Gram matrices, and the analytic certificate for the
// classic 2x2x2x2 example tensor.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rectspec/errors.hpp"
#include "rectspec/solvers.hpp"
#include "rectspec/structure.hpp"
#include "rectspec/tensor.hpp"

namespace rectspec {

// ---------------------------------------------------------------------------
// Example tensor: r = s = 2, n = m = 2,
// a_{i1 i2}^{j1 j2} = 0 if i2 = 1 and j1 = j2 = 2 (1-based), else 1.

inline RectTensor example21_tensor() {
  TensorBuilder b({2, 2, 2, 2});
  for (Index i1 = 0; i1 < 2; ++i1)
    for (Index i2 = 0; i2 < 2; ++i2)
      for (Index j1 = 0; j1 < 2; ++j1)
        for (Index j2 = 0; j2 < 2; ++j2) {
          const Index lower[2] = {i1, i2};
          const Index upper[2] = {j1, j2};
          b.set(lower, upper, (i2 == 0 && j1 == 1 && j2 == 1) ? 0.0 : 1.0);
        }
  return b.build(Storage::dense);
}

struct CertificateItem {
  std::string name;
  double computed = 0.0;
  double reference = 0.0;
  double defect = 0.0;  // computed - reference
};

// Arithmetic of the reduced 4x4 system for example21_tensor at p = q = 4:
// x1 = x2 = 2^{-1/4}, lambda^2 - 3 sqrt2 lambda - 4 = 0, y1 = ((1+sqrt17)/4) y2,
// y1^4 + y2^4 = 18/17. Each item recomputes a quantity along one route and
// compares it with its closed form.
struct CounterexampleReport {
  std::pair<double, double> lambda_roots;     // (+, -)
  std::pair<double, double> y_fourth_powers;  // (y1^4, y2^4) at lambda_+
  double y_ratio = 0.0;                       // y1 / y2 at lambda_+
  double x_coordinate = 0.0;                  // x1 = x2
  double norm_defect = 0.0;                   // y1^4 + y2^4 - 1
  std::vector<CertificateItem> items;

  // boundary_solve on the tensor: the hypothesis it rejects.
  std::string failed_hypothesis;
  // psi iteration at p = q = 4 with the structure checks bypassed.
  SolverReport solver_outcome;
  EigenTriple solver_triple;

  bool holds(double tol) const {
    for (const auto& it : items)
      if (!(std::abs(it.defect) <= tol)) return false;
    return true;
  }
};

inline CounterexampleReport example21_analysis(const SolverConfig& cfg = {}) {
  CounterexampleReport rep;
  const double r2 = std::sqrt(2.0), r17 = std::sqrt(17.0), r34 = std::sqrt(34.0);
  auto item = [&](std::string name, double computed, double reference) {
    rep.items.push_back({std::move(name), computed, reference, computed - reference});
  };

  // Equal x-equations force x1 = x2; the 4-norm fixes the value.
  rep.x_coordinate = std::pow(2.0, -0.25);
  item("x_unit_4norm", 2.0 * std::pow(rep.x_coordinate, 4), 1.0);

  const double lp = (3.0 * r2 + r34) / 2.0, lm = (3.0 * r2 - r34) / 2.0;
  rep.lambda_roots = {lp, lm};
  item("lambda_plus_quadratic", lp * lp - 3.0 * r2 * lp - 4.0, 0.0);
  item("lambda_minus_quadratic", lm * lm - 3.0 * r2 * lm - 4.0, 0.0);

  // Third equation 2 sqrt2 (y1 + y2) = lambda y1 gives the ratio.
  const double c = 2.0 * r2 / (lp - 2.0 * r2);
  rep.y_ratio = c;
  item("y_ratio", c, (1.0 + r17) / 4.0);
  // Fourth equation divided by y2.
  item("fourth_equation", 2.0 * r2 * (c + 1.0) - r2, lp);

  // Second equation 2 (y1 + y2)^2 - y2^2 = lambda.
  const double y2sq = lp / (2.0 * (c + 1.0) * (c + 1.0) - 1.0);
  const double y2_4 = y2sq * y2sq;
  const double y1_4 = c * c * c * c * y2_4;
  rep.y_fourth_powers = {y1_4, y2_4};
  item("y1_fourth", y1_4, (9.0 + r17) / 17.0);
  item("y2_fourth", y2_4, (9.0 - r17) / 17.0);
  item("fourth_power_sum", y1_4 + y2_4, 18.0 / 17.0);
  rep.norm_defect = y1_4 + y2_4 - 1.0;
  item("norm_defect", rep.norm_defect, 1.0 / 17.0);

  const RectTensor a = example21_tensor();
  const PQNorms pq{4.0, 4.0};
  try {
    boundary_solve(a, pq, cfg);
  } catch (const StructureError& e) {
    rep.failed_hypothesis = e.hypothesis();
  }
  const auto run = psi_iterate(a, pq, cfg, VectorPair{{0.5, 0.5}, {0.5, 0.5}});
  rep.solver_outcome = run.report;
  rep.solver_triple = run.triple;
  return rep;
}

// ---------------------------------------------------------------------------
// Brute-force maximization

struct GridMaximum {
  double value = 0.0;
  VectorPair argmax;
};

namespace detail {

// Lattice points w of the simplex with step 1/divisions, mapped to the unit
// p-sphere by x = w^[1/p].
inline std::vector<std::vector<double>> sphere_grid(std::size_t dim,
                                                    std::size_t divisions, double p) {
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> parts(dim, 0);
  auto emit = [&] {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k)
      x[k] = std::pow(static_cast<double>(parts[k]) / static_cast<double>(divisions),
                      1.0 / p);
    out.push_back(std::move(x));
  };
  auto rec = [&](auto& self, std::size_t k, std::size_t left) -> void {
    if (k + 1 == dim) {
      parts[k] = left;
      emit();
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      parts[k] = c;
      self(self, k + 1, left - c);
    }
  };
  rec(rec, 0, divisions);
  return out;
}

inline std::size_t power_of(std::size_t base, std::size_t e) {
  std::size_t v = 1;
  for (std::size_t k = 0; k < e; ++k) v *= base;
  return v;
}

inline double binomial(std::size_t n, std::size_t k) {
  double v = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
  return v;
}

inline GridMaximum grid_search(const RectTensor& a, PQNorms pq, std::size_t divisions) {
  const std::size_t r = a.r(), s = a.s(), n = a.n(), m = a.m();
  const auto xs = sphere_grid(n, divisions, pq.p);
  const auto ys = sphere_grid(m, divisions, pq.q);
  const std::size_t up = power_of(m, s);

  // Upper multi-index monomials y_{j1}..y_{js} for every y on the grid.
  std::vector<double> ymono(ys.size() * up);
  for (std::size_t g = 0; g < ys.size(); ++g)
    for (std::size_t u = 0; u < up; ++u) {
      double v = 1.0;
      std::size_t code = u;
      for (std::size_t k = 0; k < s; ++k) {
        v *= ys[g][code % m];
        code /= m;
      }
      ymono[g * up + u] = v;
    }

  // Entries with their lower indices and the upper code used above.
  struct Cell {
    std::vector<Index> lower;
    std::size_t upper_code;
    double value;
  };
  std::vector<Cell> cells;
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    std::size_t code = 0;
    for (std::size_t k = r + s; k-- > r;) code = code * m + idx[k];
    cells.push_back({{idx.begin(), idx.begin() + r}, code, v});
  });

  GridMaximum best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<double> coeff(up);
  for (std::size_t gx = 0; gx < xs.size(); ++gx) {
    std::fill(coeff.begin(), coeff.end(), 0.0);
    for (const auto& c : cells) {
      double v = c.value;
      for (Index i : c.lower) v *= xs[gx][i];
      coeff[c.upper_code] += v;
    }
    for (std::size_t gy = 0; gy < ys.size(); ++gy) {
      const double* mono = &ymono[gy * up];
      double f = 0.0;
      for (std::size_t u = 0; u < up; ++u) f += coeff[u] * mono[u];
      if (f > best.value) {
        best.value = f;
        best.argmax = {xs[gx], ys[gy]};
      }
    }
  }
  return best;
}

}  // namespace detail

// Maximum of f_A over a lattice on S_{p,+}^n x S_{q,+}^m. The lattice is
// {w^[1/p] : w in the simplex with coordinates in multiples of grid_step}.
// Limited to n, m <= 4.
inline GridMaximum brute_force_max(const RectTensor& a, PQNorms pq, double grid_step) {
  if (a.n() > 4 || a.m() > 4)
    throw ScaleError("brute_force_max: dimensions above 4 are not enumerated");
  if (!(grid_step > 0.0) || grid_step > 0.5)
    throw DomainError("brute_force_max: grid_step must lie in (0, 0.5]");
  classify_regime(a, pq);
  const auto divisions = static_cast<std::size_t>(std::llround(1.0 / grid_step));
  const double count_x = detail::binomial(divisions + a.n() - 1, a.n() - 1);
  const double count_y = detail::binomial(divisions + a.m() - 1, a.m() - 1);
  const double lower_cells = static_cast<double>(detail::power_of(a.n(), a.r()));
  const double upper_cells = static_cast<double>(detail::power_of(a.m(), a.s()));
  // Enumerate over the side whose inner sum is shorter.
  const bool swap = lower_cells < upper_cells;
  const double work = count_x * count_y * std::min(lower_cells, upper_cells);
  if (work > 2e11)
    throw ScaleError("brute_force_max: grid too fine for these dimensions");
  if (!swap) return detail::grid_search(a, pq, divisions);
  GridMaximum t = detail::grid_search(transpose(a), {pq.q, pq.p}, divisions);
  return {t.value, {std::move(t.argmax.y), std::move(t.argmax.x)}};
}

// ---------------------------------------------------------------------------
// Gradient identity df/dx_i = r (A x^{r-1} y^s)_i, df/dy_j = s (A x^r y^{s-1})_j

// Largest central-difference defect over all n + m coordinates, relative to
// the largest analytic gradient component.
inline double gradient_identity_check(const RectTensor& a, const VectorPair& z, double h) {
  if (!is_partially_symmetric(a))
    throw StructureError("partial symmetry",
                         "gradient_identity_check: tensor is not partially symmetric");
  detail::check_pair(a.shape(), z, "gradient_identity_check");
  detail::require_positive(z, "gradient_identity_check");
  const auto cx = contract_x(a, z);
  const auto cy = contract_y(a, z);
  std::vector<double> analytic, numeric;
  for (std::size_t i = 0; i < a.n(); ++i) {
    VectorPair lo = z, hi = z;
    lo.x[i] -= h;
    hi.x[i] += h;
    numeric.push_back((evaluate_form(a, hi) - evaluate_form(a, lo)) / (2.0 * h));
    analytic.push_back(static_cast<double>(a.r()) * cx[i]);
  }
  for (std::size_t j = 0; j < a.m(); ++j) {
    VectorPair lo = z, hi = z;
    lo.y[j] -= h;
    hi.y[j] += h;
    numeric.push_back((evaluate_form(a, hi) - evaluate_form(a, lo)) / (2.0 * h));
    analytic.push_back(static_cast<double>(a.s()) * cy[j]);
  }
  double scale = max_abs(analytic);
  if (scale == 0.0) scale = 1.0;
  double defect = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k)
    defect = std::max(defect, std::abs(numeric[k] - analytic[k]));
  return defect / scale;
}

// ---------------------------------------------------------------------------
// Power-mean midpoint of two sphere pairs

inline VectorPair pq_midpoint(const VectorPair& a, const VectorPair& b, PQNorms pq) {
  if (a.x.size() != b.x.size() || a.y.size() != b.y.size())
    throw DimensionError("pq_midpoint: pairs have different shapes");
  auto check = [&](const VectorPair& z, const char* which) {
    for (std::size_t k = 0; k < z.size(); ++k)
      if (z[k] < 0.0)
        throw DomainError(std::string("pq_midpoint: ") + which + " has a negative coordinate");
    if (std::abs(lp_norm(z.x, pq.p) - 1.0) > 1e-10 || std::abs(lp_norm(z.y, pq.q) - 1.0) > 1e-10)
      throw DomainError(std::string("pq_midpoint: ") + which + " is off the unit spheres");
  };
  check(a, "first pair");
  check(b, "second pair");
  VectorPair out{std::vector<double>(a.x.size()), std::vector<double>(a.y.size())};
  for (std::size_t i = 0; i < out.x.size(); ++i)
    out.x[i] = std::pow((std::pow(a.x[i], pq.p) + std::pow(b.x[i], pq.p)) / 2.0, 1.0 / pq.p);
  for (std::size_t j = 0; j < out.y.size(); ++j)
    out.y[j] = std::pow((std::pow(a.y[j], pq.q) + std::pow(b.y[j], pq.q)) / 2.0, 1.0 / pq.q);
  return out;
}

// ---------------------------------------------------------------------------
// Matrix singular values

using DenseMatrix = std::vector<std::vector<double>>;

struct PowerIterationResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Dominant eigenvalue of a symmetric positive semidefinite matrix. Start is
// the normalized all-ones vector; stops when the unit iterate moves by at
// most tol in the infinity norm.
inline PowerIterationResult power_iteration(const DenseMatrix& mat, double tol = 1e-12,
                                            std::size_t max_iter = 100000) {
  const std::size_t n = mat.size();
  PowerIterationResult res;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), w(n);
  auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += mat[i][j] * in[j];
      out[i] = acc;
    }
  };
  for (std::size_t k = 1; k <= max_iter; ++k) {
    apply(v, w);
    double norm = 0.0;
    for (double e : w) norm += e * e;
    norm = std::sqrt(norm);
    res.iterations = k;
    if (norm == 0.0) {
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= norm;
      step = std::max(step, std::abs(w[i] - v[i]));
    }
    std::swap(v, w);
    if (step <= tol) {
      res.converged = true;
      break;
    }
  }
  apply(v, w);
  double rq = 0.0;
  for (std::size_t i = 0; i < n; ++i) rq += v[i] * w[i];
  res.value = rq;
  return res;
}

inline DenseMatrix matrix_of(const RectTensor& a) {
  if (a.r() != 1 || a.s() != 1)
    throw UnsupportedOrderError("expected a (1,1)-order tensor (a matrix)");
  DenseMatrix out(a.n(), std::vector<double>(a.m(), 0.0));
  a.for_each_nonzero([&](std::span<const Index> idx, double v) { out[idx[0]][idx[1]] = v; });
  return out;
}

// M M' for an n x m matrix M.
inline DenseMatrix gram_rows(const DenseMatrix& mat) {
  const std::size_t n = mat.size();
  DenseMatrix out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < mat[i].size(); ++j) acc += mat[i][j] * mat[k][j];
      out[i][k] = acc;
    }
  return out;
}

inline DenseMatrix transposed(const DenseMatrix& mat) {
  DenseMatrix out(mat.front().size(), std::vector<double>(mat.size()));
  for (std::size_t i = 0; i < mat.size(); ++i)
    for (std::size_t j = 0; j < mat[i].size(); ++j) out[j][i] = mat[i][j];
  return out;
}

struct SvdCrosscheck {
  double solver_lambda = 0.0;  // (2,2)-eigenvalue from the psi iteration
  double oracle_lambda = 0.0;  // sqrt(rho(A A'))
  double rho_aat = 0.0;
  double rho_ata = 0.0;
  SolverReport solver_report;
};

// Largest singular value two ways. The solver side is boundary_solve at
// p = q = 2 when A is weakly irreducible; otherwise the same psi iteration is
// run from the uniform start without the irreducibility requirement.
inline SvdCrosscheck svd_crosscheck(const RectTensor& a, const SolverConfig& cfg = {}) {
  const DenseMatrix mat = matrix_of(a);
  SvdCrosscheck out;
  out.rho_aat = power_iteration(gram_rows(mat)).value;
  out.rho_ata = power_iteration(gram_rows(transposed(mat))).value;
  out.oracle_lambda = std::sqrt(std::max(out.rho_aat, 0.0));
  if (a.is_zero()) {
    out.solver_report.converged = true;
    return out;
  }
  const PQNorms pq{2.0, 2.0};
  SolveResult res = is_weakly_irreducible(a)
                        ? boundary_solve(a, pq, cfg)
                        : psi_iterate(a, pq, cfg, detail::uniform_pair(a.n(), a.m()));
  out.solver_lambda = res.triple.lambda;
  out.solver_report = std::move(res.report);
  return out;
}

struct Case2Crosscheck {
  double direct_lambda = 0.0;  // (2,q)-eigenvalue of A
  double gram_lambda = 0.0;    // sqrt of the (q,q)-eigenvalue of A'A
  SolverReport direct_report;
  SolverReport gram_report;
};

// Routes to strong_solve, boundary_solve or weak_solve by regime.
inline SolveResult solve_by_regime(const RectTensor& a, PQNorms pq, const SolverConfig& cfg) {
  switch (classify_regime(a, pq).regime) {
    case Regime::contractive: return strong_solve(a, pq, cfg);
    case Regime::boundary: return boundary_solve(a, pq, cfg);
    case Regime::supercritical: return weak_solve(a, pq, cfg);
  }
  return weak_solve(a, pq, cfg);
}

// For a (1,s)-order tensor with p = 2 and q >= 2s - 1: the (2,q)-eigenvalue of
// A against sqrt of the (q,q)-eigenvalue of the Gram tensor A'A. With s = 1,
// q = 2 this is the matrix singular value again.
inline Case2Crosscheck case2_crosscheck(const RectTensor& a, PQNorms pq,
                                        const SolverConfig& cfg = {}) {
  if (a.r() != 1)
    throw UnsupportedOrderError("case2_crosscheck: expected a (1,s)-order tensor");
  if (pq.p != 2.0) throw DomainError("case2_crosscheck: requires p = 2");
  if (pq.q < 2.0 * static_cast<double>(a.s()) - 1.0)
    throw DomainError("case2_crosscheck: requires q >= 2s - 1");
  Case2Crosscheck out;
  if (a.is_zero()) {
    out.direct_report.converged = out.gram_report.converged = true;
    return out;
  }
  auto direct = solve_by_regime(a, pq, cfg);
  auto gram = solve_by_regime(gram_tensor(a), {pq.q, pq.q}, cfg);
  out.direct_lambda = direct.triple.lambda;
  out.gram_lambda = std::sqrt(std::max(gram.triple.lambda, 0.0));
  out.direct_report = std::move(direct.report);
  out.gram_report = std::move(gram.report);
  return out;
}

}  // namespace rectspec
