#pragma once

// (p,q)-eigenvalue solvers for nonnegative rectangular tensors.
//
//   strong triple:  A x^{r-1} y^s       = lambda x^[p-1],
//                   A x^r y^{s-1}       = lambda y^[q-1]
//   weak triple:    (A x^{r-1} y^s) o x = lambda x^[p],
//                   (A x^r y^{s-1}) o y = lambda y^[q]
//
// with ||x||_p = ||y||_q = 1. The ratio xi = r/p + s/q decides which solver
// applies: xi < 1 gives a contraction for the psi map in the log-ratio
// distance, xi = 1 needs partial symmetry and weak irreducibility, and for
// xi > 1 only weak triples are guaranteed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rectspec/errors.hpp"
#include "rectspec/structure.hpp"
#include "rectspec/tensor.hpp"

namespace rectspec {

struct PQNorms {
  double p = 2.0;
  double q = 2.0;
};

enum class Regime { contractive, boundary, supercritical };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::contractive: return "contractive";
    case Regime::boundary: return "boundary";
    case Regime::supercritical: return "supercritical";
  }
  return "?";
}

struct RegimeInfo {
  Regime regime = Regime::contractive;
  double xi = 0.0;
  // When r, s, p, q are all integers xi = xi_num / xi_den exactly.
  bool exact = false;
  long long xi_num = 0;
  long long xi_den = 1;
};

// Reals within this band of xi = 1 count as the boundary when p or q is not
// an integer.
inline constexpr double kBoundaryBand = 1e-12;

namespace detail {

inline bool small_integer(double v) {
  return v == std::floor(v) && v <= 1e6;
}

}  // namespace detail

inline RegimeInfo classify_regime(std::size_t r, std::size_t s, double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0))
    throw DomainError("norm exponents must satisfy p >= 1 and q >= 1 (got p = " +
                      std::to_string(p) + ", q = " + std::to_string(q) + ")");
  RegimeInfo info;
  info.xi = static_cast<double>(r) / p + static_cast<double>(s) / q;
  if (detail::small_integer(p) && detail::small_integer(q)) {
    const auto ip = static_cast<long long>(p), iq = static_cast<long long>(q);
    info.exact = true;
    info.xi_num = static_cast<long long>(r) * iq + static_cast<long long>(s) * ip;
    info.xi_den = ip * iq;
    const long long g = std::gcd(info.xi_num, info.xi_den);
    info.xi_num /= g;
    info.xi_den /= g;
    info.regime = info.xi_num < info.xi_den    ? Regime::contractive
                  : info.xi_num == info.xi_den ? Regime::boundary
                                               : Regime::supercritical;
  } else {
    info.regime = std::abs(info.xi - 1.0) <= kBoundaryBand ? Regime::boundary
                  : info.xi < 1.0                        ? Regime::contractive
                                                         : Regime::supercritical;
  }
  return info;
}

inline RegimeInfo classify_regime(const RectTensor& a, PQNorms pq) {
  return classify_regime(a.r(), a.s(), pq.p, pq.q);
}

// ---------------------------------------------------------------------------
// Vector helpers

inline double lp_norm(std::span<const double> v, double p) {
  double acc = 0.0;
  for (double e : v) acc += std::pow(std::abs(e), p);
  return std::pow(acc, 1.0 / p);
}

inline std::vector<double> entrywise_pow(std::span<const double> v, double e) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = e == 1.0 ? v[i] : std::pow(v[i], e);
  return out;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

// Scale each side to unit p- (resp. q-) norm.
inline VectorPair normalize_to_sphere(VectorPair z, PQNorms pq) {
  const double nx = lp_norm(z.x, pq.p), ny = lp_norm(z.y, pq.q);
  if (!(nx > 0.0) || !(ny > 0.0))
    throw DomainError("cannot normalize a pair with a zero side");
  for (auto& v : z.x) v /= nx;
  for (auto& v : z.y) v /= ny;
  return z;
}

// d(z, z') = log(max_k z_k/z'_k) - log(min_k z_k/z'_k) over all n + m
// coordinates. Invariant under z -> c z, z' -> c' z'.
inline double log_distance(const VectorPair& z, const VectorPair& zp) {
  if (z.x.size() != zp.x.size() || z.y.size() != zp.y.size())
    throw DimensionError("log_distance: pairs have different shapes");
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double a = z[k], b = zp[k];
    if (!(a > 0.0) || !(b > 0.0))
      throw DomainError("log_distance: coordinate " + std::to_string(k + 1) +
                        " is not strictly positive");
    const double ratio = a / b;
    hi = std::max(hi, ratio);
    lo = std::min(lo, ratio);
  }
  return std::log(hi / lo);
}

// ---------------------------------------------------------------------------
// The two fixed-point maps

namespace detail {

inline void require_nonnegative(const RectTensor& a, const char* op) {
  if (!a.is_nonnegative())
    throw DomainError(std::string(op) + ": tensor has negative entries");
}

inline void require_positive(const VectorPair& z, const char* op) {
  for (std::size_t k = 0; k < z.size(); ++k)
    if (!(z[k] > 0.0))
      throw DomainError(std::string(op) + ": coordinate " + std::to_string(k + 1) +
                        " is not strictly positive");
}

}  // namespace detail

// psi(x, y) = ((A u^{r-1} v^s) o u, (A u^r v^{s-1}) o v) with u = x^[1/p],
// v = y^[1/q]. Homogeneous of degree xi.
inline VectorPair psi_step(const RectTensor& a, const VectorPair& z, PQNorms pq) {
  detail::require_nonnegative(a, "psi_step");
  detail::check_pair(a.shape(), z, "psi_step");
  detail::require_positive(z, "psi_step");
  const VectorPair uv{entrywise_pow(z.x, 1.0 / pq.p), entrywise_pow(z.y, 1.0 / pq.q)};
  VectorPair out{contract_x(a, uv), contract_y(a, uv)};
  for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] *= uv.x[i];
  for (std::size_t j = 0; j < out.y.size(); ++j) out.y[j] *= uv.y[j];
  return out;
}

struct PhiStep {
  VectorPair next;
  double form = 0.0;       // f_A at the input pair
  bool zero_form = false;  // f_A = 0: input is already a weak triple with lambda 0
};

// phi(x, y) = (((A x^{r-1} y^s) o x / f)^[1/p], ((A x^r y^{s-1}) o y / f)^[1/q])
// with f = f_A(x, y). Maps the product of unit spheres to itself.
inline PhiStep phi_step(const RectTensor& a, const VectorPair& z, PQNorms pq) {
  detail::require_nonnegative(a, "phi_step");
  detail::check_pair(a.shape(), z, "phi_step");
  PhiStep step;
  step.form = evaluate_form(a, z);
  if (!(step.form > 0.0)) {
    step.zero_form = true;
    step.next = z;
    return step;
  }
  step.next = {contract_x(a, z), contract_y(a, z)};
  for (std::size_t i = 0; i < z.x.size(); ++i)
    step.next.x[i] = std::pow(step.next.x[i] * z.x[i] / step.form, 1.0 / pq.p);
  for (std::size_t j = 0; j < z.y.size(); ++j)
    step.next.y[j] = std::pow(step.next.y[j] * z.y[j] / step.form, 1.0 / pq.q);
  return step;
}

// ---------------------------------------------------------------------------
// Triples and residuals

enum class TripleKind { weak, strong };

inline const char* to_string(TripleKind k) {
  return k == TripleKind::weak ? "weak" : "strong";
}

struct Residuals {
  double x = 0.0;
  double y = 0.0;
  double max() const { return std::max(x, y); }
};

struct EigenTriple {
  double lambda = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  TripleKind kind = TripleKind::strong;
  PQNorms norms;
  double residual_x = 0.0;
  double residual_y = 0.0;

  VectorPair pair() const { return {x, y}; }
};

// Infinity norms of (A x^{r-1} y^s) o x - lambda x^[p] and its y analogue.
inline Residuals residual_weak(const RectTensor& a, double lambda,
                               const VectorPair& z, PQNorms pq) {
  const auto cx = contract_x(a, z);
  const auto cy = contract_y(a, z);
  Residuals res;
  for (std::size_t i = 0; i < cx.size(); ++i)
    res.x = std::max(res.x, std::abs(cx[i] * z.x[i] - lambda * std::pow(z.x[i], pq.p)));
  for (std::size_t j = 0; j < cy.size(); ++j)
    res.y = std::max(res.y, std::abs(cy[j] * z.y[j] - lambda * std::pow(z.y[j], pq.q)));
  return res;
}

// Infinity norms of A x^{r-1} y^s - lambda x^[p-1] and its y analogue.
inline Residuals residual_strong(const RectTensor& a, double lambda,
                                 const VectorPair& z, PQNorms pq) {
  const auto cx = contract_x(a, z);
  const auto cy = contract_y(a, z);
  Residuals res;
  for (std::size_t i = 0; i < cx.size(); ++i)
    res.x = std::max(res.x, std::abs(cx[i] - lambda * std::pow(z.x[i], pq.p - 1.0)));
  for (std::size_t j = 0; j < cy.size(); ++j)
    res.y = std::max(res.y, std::abs(cy[j] - lambda * std::pow(z.y[j], pq.q - 1.0)));
  return res;
}

inline Residuals residual_weak(const RectTensor& a, const EigenTriple& t) {
  return residual_weak(a, t.lambda, t.pair(), t.norms);
}

inline Residuals residual_strong(const RectTensor& a, const EigenTriple& t) {
  return residual_strong(a, t.lambda, t.pair(), t.norms);
}

// ---------------------------------------------------------------------------
// Solver configuration and reports

struct SolverConfig {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  // Lower clamp for psi iterates; derived from the tensor when unset.
  std::optional<double> epsilon_floor;
  std::uint64_t seed = 42;
  std::size_t restarts = 8;
  // Upper bound on threads used for independent restarts.
  std::size_t threads = 1;
  // Consecutive clamped iterations that count as a boundary collapse.
  std::size_t collapse_window = 10;
  // weak_solve: return a zero-form triple (0, x, y) when one exists.
  bool zero_form_shortcut = true;
};

enum class FailureReason { max_iter, boundary_collapse, zero_form };

inline const char* to_string(FailureReason f) {
  switch (f) {
    case FailureReason::max_iter: return "max_iter";
    case FailureReason::boundary_collapse: return "boundary_collapse";
    case FailureReason::zero_form: return "zero_form";
  }
  return "?";
}

struct SolverReport {
  bool converged = false;
  std::size_t iterations = 0;
  // psi solvers: log-ratio distance between consecutive iterates.
  // phi solver: infinity-norm step between consecutive iterates.
  std::vector<double> distance_trace;
  Residuals final_residuals;
  RegimeInfo regime;
  std::optional<FailureReason> failure_reason;
  // weak_solve found (0, x, y) by support search without iterating.
  bool zero_form_shortcut = false;
  // Per-restart reports, when the solver ran several starts.
  std::vector<SolverReport> restarts;
  std::vector<double> restart_lambdas;
  std::size_t selected_restart = 0;
};

struct SolveResult {
  EigenTriple triple;
  SolverReport report;
};

// Floor used by the psi iteration on the 1-norm-normalized ray:
// min(delta, 1)^{1/(1 - xi)} * 1e-6 for xi < 1, never below 1e-300.
inline double default_epsilon_floor(const RectTensor& a, double xi) {
  double floor = 0.0;
  if (xi < 1.0) {
    const double delta = std::min(a.min_positive(), 1.0);
    floor = std::pow(delta, 1.0 / (1.0 - xi)) * 1e-6;
  }
  return std::max(floor, 1e-300);
}

namespace detail {

// Deterministic uniform draw in [lo, hi), independent of the standard
// library's distribution implementations.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

inline std::mt19937_64 restart_rng(std::uint64_t seed, std::size_t restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), 0x5eedu};
  return std::mt19937_64(seq);
}

// Runs fn(k) for k in [0, count) on up to `threads` threads. Results land by
// index so the outcome does not depend on scheduling.
template <class Result, class Fn>
std::vector<Result> run_indexed(std::size_t count, std::size_t threads, Fn fn) {
  std::vector<std::optional<Result>> slots(count);
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) slots[k].emplace(fn(k));
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < count; k += threads) slots[k].emplace(fn(k));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline VectorPair uniform_pair(std::size_t n, std::size_t m) {
  return {std::vector<double>(n, 1.0 / static_cast<double>(n)),
          std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

inline EigenTriple triple_from_ray(const RectTensor& a, const VectorPair& z,
                                   PQNorms pq) {
  EigenTriple t;
  t.kind = TripleKind::strong;
  t.norms = pq;
  VectorPair uv{entrywise_pow(z.x, 1.0 / pq.p), entrywise_pow(z.y, 1.0 / pq.q)};
  uv = normalize_to_sphere(std::move(uv), pq);
  t.lambda = evaluate_form(a, uv);
  t.x = std::move(uv.x);
  t.y = std::move(uv.y);
  return t;
}

}  // namespace detail

// Random start with coordinates uniform in [0.1, 1).
inline VectorPair random_start(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  VectorPair z{std::vector<double>(n), std::vector<double>(m)};
  for (auto& v : z.x) v = detail::uniform(rng, 0.1, 1.0);
  for (auto& v : z.y) v = detail::uniform(rng, 0.1, 1.0);
  return z;
}

// Start used for restart k of a solver configured with `seed`.
inline VectorPair restart_start(std::size_t n, std::size_t m, std::uint64_t seed,
                                std::size_t k) {
  auto rng = detail::restart_rng(seed, k);
  return random_start(n, m, rng);
}

// Ray-normalized psi iteration from `start`, without regime or structure
// checks. Each step computes u = x^[1/p], v = y^[1/q], t = f_A(u, v) and
// replaces (x, y) by psi(x, y) / t, so both sides keep unit 1-norm. A ray
// fixed point psi(w) = t w gives the strong triple (t, u, v).
//
// Converges when the log-ratio step and the strong residuals are both at or
// below cfg.tol.
inline SolveResult psi_iterate(const RectTensor& a, PQNorms pq,
                               const SolverConfig& cfg, VectorPair start) {
  detail::require_nonnegative(a, "psi_iterate");
  detail::check_pair(a.shape(), start, "psi_iterate");
  detail::require_positive(start, "psi_iterate");
  SolveResult res;
  res.report.regime = classify_regime(a, pq);
  res.triple.norms = pq;
  const double floor =
      cfg.epsilon_floor.value_or(default_epsilon_floor(a, res.report.regime.xi));

  VectorPair z = std::move(start);
  {
    const double sx = std::accumulate(z.x.begin(), z.x.end(), 0.0);
    const double sy = std::accumulate(z.y.begin(), z.y.end(), 0.0);
    for (auto& v : z.x) v /= sx;
    for (auto& v : z.y) v /= sy;
  }

  std::size_t clamp_streak = 0;
  auto& rep = res.report;
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const VectorPair uv{entrywise_pow(z.x, 1.0 / pq.p), entrywise_pow(z.y, 1.0 / pq.q)};
    const double t = evaluate_form(a, uv);
    if (!(t > 0.0)) {
      rep.failure_reason = FailureReason::zero_form;
      rep.iterations = k - 1;
      res.triple = detail::triple_from_ray(a, z, pq);
      res.triple.lambda = 0.0;
      break;
    }
    VectorPair next{contract_x(a, uv), contract_y(a, uv)};
    bool clamped = false;
    for (std::size_t i = 0; i < next.x.size(); ++i) {
      next.x[i] = next.x[i] * uv.x[i] / t;
      if (!(next.x[i] >= floor)) next.x[i] = floor, clamped = true;
    }
    for (std::size_t j = 0; j < next.y.size(); ++j) {
      next.y[j] = next.y[j] * uv.y[j] / t;
      if (!(next.y[j] >= floor)) next.y[j] = floor, clamped = true;
    }
    clamp_streak = clamped ? clamp_streak + 1 : 0;
    const double d = log_distance(next, z);
    rep.distance_trace.push_back(d);
    rep.iterations = k;
    z = std::move(next);

    if (clamp_streak >= cfg.collapse_window) {
      rep.failure_reason = FailureReason::boundary_collapse;
      break;
    }
    if (d <= cfg.tol) {
      res.triple = detail::triple_from_ray(a, z, pq);
      rep.final_residuals = residual_strong(a, res.triple);
      if (rep.final_residuals.max() <= cfg.tol) {
        rep.converged = true;
        break;
      }
    }
  }
  if (!rep.converged) {
    if (!rep.failure_reason) rep.failure_reason = FailureReason::max_iter;
    if (rep.failure_reason != FailureReason::zero_form)
      res.triple = detail::triple_from_ray(a, z, pq);
    rep.final_residuals = residual_strong(a, res.triple);
  }
  res.triple.residual_x = rep.final_residuals.x;
  res.triple.residual_y = rep.final_residuals.y;
  return res;
}

// Unique positive strong triple for xi < 1, from the uniform start.
inline SolveResult strong_solve(const RectTensor& a, PQNorms pq,
                                const SolverConfig& cfg = {}) {
  const auto info = classify_regime(a, pq);
  if (info.regime != Regime::contractive)
    throw RegimeError("strong_solve requires r/p + s/q < 1 (got " +
                      std::to_string(info.xi) + ", " + to_string(info.regime) +
                      "); for xi > 1 only weak triples are guaranteed");
  detail::require_nonnegative(a, "strong_solve");
  return psi_iterate(a, pq, cfg, detail::uniform_pair(a.n(), a.m()));
}

// psi iteration from `count` seeded random starts (restart k uses
// restart_start(n, m, cfg.seed, k)).
inline std::vector<SolveResult> psi_restarts(const RectTensor& a, PQNorms pq,
                                             const SolverConfig& cfg,
                                             std::size_t count) {
  return detail::run_indexed<SolveResult>(count, cfg.threads, [&](std::size_t k) {
    return psi_iterate(a, pq, cfg, restart_start(a.n(), a.m(), cfg.seed, k));
  });
}

// strong_solve from `count` random starts; useful to observe uniqueness.
inline std::vector<SolveResult> strong_solve_restarts(const RectTensor& a, PQNorms pq,
                                                      const SolverConfig& cfg,
                                                      std::size_t count) {
  const auto info = classify_regime(a, pq);
  if (info.regime != Regime::contractive)
    throw RegimeError("strong_solve requires r/p + s/q < 1");
  return psi_restarts(a, pq, cfg, count);
}

// Strong triple at xi = 1 for partially symmetric, weakly irreducible tensors.
// Runs the same normalized psi iteration from the uniform start, then
// cfg.restarts random starts whose eigenvalues are recorded in the report.
inline SolveResult boundary_solve(const RectTensor& a, PQNorms pq,
                                  const SolverConfig& cfg = {}) {
  const auto info = classify_regime(a, pq);
  if (info.regime != Regime::boundary)
    throw RegimeError("boundary_solve requires r/p + s/q = 1 (got " +
                      std::to_string(info.xi) + ", " + to_string(info.regime) + ")");
  detail::require_nonnegative(a, "boundary_solve");
  if (!is_partially_symmetric(a))
    throw StructureError("partial symmetry",
                         "boundary_solve: hypothesis 'partial symmetry' fails: the "
                         "tensor is not partially symmetric");
  if (!is_weakly_irreducible(a))
    throw StructureError("weak irreducibility",
                         "boundary_solve: hypothesis 'weak irreducibility' fails: "
                         "the induced bipartite graph is disconnected");
  SolveResult res = psi_iterate(a, pq, cfg, detail::uniform_pair(a.n(), a.m()));
  for (auto& extra : psi_restarts(a, pq, cfg, cfg.restarts)) {
    res.report.restart_lambdas.push_back(extra.triple.lambda);
    res.report.restarts.push_back(std::move(extra.report));
  }
  return res;
}

// phi iteration from one start on the product of unit spheres. Converges when
// the infinity-norm step and the weak residuals are at or below cfg.tol.
inline SolveResult phi_iterate(const RectTensor& a, PQNorms pq,
                               const SolverConfig& cfg, VectorPair start) {
  detail::require_nonnegative(a, "phi_iterate");
  detail::check_pair(a.shape(), start, "phi_iterate");
  SolveResult res;
  auto& rep = res.report;
  rep.regime = classify_regime(a, pq);
  res.triple.kind = TripleKind::weak;
  res.triple.norms = pq;
  VectorPair z = normalize_to_sphere(std::move(start), pq);
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    PhiStep step = phi_step(a, z, pq);
    if (step.zero_form) {
      rep.converged = true;
      rep.iterations = k - 1;
      break;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      delta = std::max(delta, std::abs(step.next[i] - z[i]));
    rep.distance_trace.push_back(delta);
    rep.iterations = k;
    z = std::move(step.next);
    if (delta <= cfg.tol) {
      const double lambda = evaluate_form(a, z);
      rep.final_residuals = residual_weak(a, lambda, z, pq);
      if (rep.final_residuals.max() <= cfg.tol) {
        rep.converged = true;
        break;
      }
    }
  }
  if (!rep.converged) rep.failure_reason = FailureReason::max_iter;
  res.triple.lambda = evaluate_form(a, z);
  rep.final_residuals = residual_weak(a, res.triple.lambda, z, pq);
  res.triple.x = std::move(z.x);
  res.triple.y = std::move(z.y);
  res.triple.residual_x = rep.final_residuals.x;
  res.triple.residual_y = rep.final_residuals.y;
  return res;
}

// A pair of standard basis vectors (e_i, e_j) with f_A(e_i, e_j) = 0, if any.
// f_A vanishes on a support pair (S, T) only if it vanishes on every singleton
// pair inside it, so singletons are the only candidates worth testing.
inline std::optional<VectorPair> find_zero_form_pair(const RectTensor& a) {
  std::vector<Index> lower(a.r()), upper(a.s());
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.m(); ++j) {
      std::fill(lower.begin(), lower.end(), static_cast<Index>(i));
      std::fill(upper.begin(), upper.end(), static_cast<Index>(j));
      if (!(a.at(lower, upper) > 0.0)) {
        VectorPair z{std::vector<double>(a.n(), 0.0), std::vector<double>(a.m(), 0.0)};
        z.x[i] = 1.0;
        z.y[j] = 1.0;
        return z;
      }
    }
  return std::nullopt;
}

// Weak triple for any nonnegative tensor and any p, q >= 1.
//
// First looks for a pair with f_A = 0, which gives (0, x, y) directly. Then
// runs phi from max(cfg.restarts, 1) random starts and keeps the converged
// fixed point with the largest eigenvalue (ties go to the lower restart
// index). If nothing converges the triple with the smallest residual is
// returned with converged = false.
inline SolveResult weak_solve(const RectTensor& a, PQNorms pq,
                              const SolverConfig& cfg = {}) {
  detail::require_nonnegative(a, "weak_solve");
  const auto info = classify_regime(a, pq);
  if (cfg.zero_form_shortcut) {
    if (auto z = find_zero_form_pair(a)) {
      SolveResult res;
      res.report.regime = info;
      res.report.converged = true;
      res.report.zero_form_shortcut = true;
      res.triple.kind = TripleKind::weak;
      res.triple.norms = pq;
      res.triple.lambda = 0.0;
      res.report.final_residuals = residual_weak(a, 0.0, *z, pq);
      res.triple.x = std::move(z->x);
      res.triple.y = std::move(z->y);
      res.triple.residual_x = res.report.final_residuals.x;
      res.triple.residual_y = res.report.final_residuals.y;
      return res;
    }
  }
  const std::size_t count = std::max<std::size_t>(cfg.restarts, 1);
  auto runs = detail::run_indexed<SolveResult>(count, cfg.threads, [&](std::size_t k) {
    auto rng = detail::restart_rng(cfg.seed, k);
    return phi_iterate(a, pq, cfg, random_start(a.n(), a.m(), rng));
  });
  std::size_t best = 0;
  bool any = false;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!runs[k].report.converged) continue;
    if (!any || runs[k].triple.lambda > runs[best].triple.lambda) best = k;
    any = true;
  }
  if (!any)
    for (std::size_t k = 1; k < runs.size(); ++k)
      if (runs[k].report.final_residuals.max() < runs[best].report.final_residuals.max())
        best = k;
  SolveResult res = runs[best];
  res.report.selected_restart = best;
  res.report.restarts.clear();
  for (auto& run : runs) {
    res.report.restart_lambdas.push_back(run.triple.lambda);
    res.report.restarts.push_back(std::move(run.report));
  }
  return res;
}

}  // namespace rectspec
