#pragma once

// Command-line front end. run_cli() is the whole program; main() forwards to
// it so tests can drive every subcommand in-process.
//
// Exit codes: 0 success, 1 certificate or crosscheck failure, 2 usage or
// parse error, 3 solver did not converge, 4 a precondition (regime or
// structure hypothesis) fails.

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rectspec/rectspec.hpp"

namespace rectspec::cli {

enum Exit : int {
  kOk = 0,
  kCertificateFailure = 1,
  kUsage = 2,
  kNotConverged = 3,
  kPrecondition = 4,
};

struct RunRequest {
  std::string command;
  std::string input_path;
  double p = 2.0;
  double q = 2.0;
  bool p_set = false;
  bool q_set = false;
  SolverConfig cfg;
  bool tol_set = false;
  std::string format = "human";
  bool force_strong = false;
  bool force_weak = false;
};

// ---------------------------------------------------------------------------
// Output records. Reals are written with 17 significant digits.

class Record {
 public:
  Record(std::string kind) { add("record", kind); }

  Record& add(const std::string& key, const std::string& v) {
    fields_.emplace_back(key, nlohmann::json(v).dump(), v);
    return *this;
  }
  Record& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
  Record& add(const std::string& key, double v) {
    const std::string text = real(v);
    fields_.emplace_back(key, text, text);
    return *this;
  }
  Record& add(const std::string& key, bool v) {
    fields_.emplace_back(key, v ? "true" : "false", v ? "yes" : "no");
    return *this;
  }
  Record& add(const std::string& key, std::size_t v) {
    fields_.emplace_back(key, std::to_string(v), std::to_string(v));
    return *this;
  }
  Record& add(const std::string& key, int v) { return add(key, static_cast<std::size_t>(v)); }
  Record& add(const std::string& key, const std::vector<double>& v) {
    std::string js = "[", hu;
    for (std::size_t i = 0; i < v.size(); ++i) {
      js += (i ? "," : "") + real(v[i]);
      hu += (i ? " " : "") + real(v[i]);
    }
    fields_.emplace_back(key, js + "]", hu);
    return *this;
  }
  template <class Int>
  Record& add_ints(const std::string& key, const std::vector<Int>& v, int offset = 0) {
    std::string js = "[", hu;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto s = std::to_string(static_cast<long long>(v[i]) + offset);
      js += (i ? "," : "") + s;
      hu += (i ? " " : "") + s;
    }
    fields_.emplace_back(key, js + "]", hu);
    return *this;
  }
  Record& add_null(const std::string& key) {
    fields_.emplace_back(key, "null", "-");
    return *this;
  }

  void write(std::ostream& out, const std::string& format) const {
    if (format == "jsonl") {
      out << '{';
      for (std::size_t i = 0; i < fields_.size(); ++i)
        out << (i ? "," : "") << nlohmann::json(fields_[i].key).dump() << ':'
            << fields_[i].json;
      out << "}\n";
      return;
    }
    out << "[" << fields_.front().human << "]\n";
    for (std::size_t i = 1; i < fields_.size(); ++i)
      out << "  " << fields_[i].key << ": " << fields_[i].human << '\n';
  }

 private:
  struct Field {
    Field(std::string k, std::string j, std::string h)
        : key(std::move(k)), json(std::move(j)), human(std::move(h)) {}
    std::string key, json, human;
  };

  static std::string real(double v) {
    if (!std::isfinite(v)) return "null";
    return detail::format_real(v);
  }

  std::vector<Field> fields_;
};

// ---------------------------------------------------------------------------
// Input loading

struct LoadedInput {
  RectTensor tensor;
  std::optional<DirectedHypergraph> hypergraph;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LoadedInput load_input(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path);
  const auto header = detail::split_ws(peek_header(text));
  if (!header.empty() && header[0] == "dhg") {
    auto h = parse_hypergraph(text);
    RectTensor a = adjacency_tensor(h);
    return {std::move(a), std::move(h)};
  }
  return {parse_tensor(text, &err), std::nullopt};
}

// ---------------------------------------------------------------------------
// Reporting helpers

inline void add_regime(Record& rec, const RegimeInfo& info) {
  rec.add("regime", to_string(info.regime)).add("xi", info.xi);
  if (info.exact)
    rec.add("xi_exact", std::to_string(info.xi_num) + "/" + std::to_string(info.xi_den));
}

inline Record solution_record(const std::string& solver, const SolveResult& res) {
  Record rec("solution");
  add_regime(rec, res.report.regime);
  rec.add("solver", solver)
      .add("kind", to_string(res.triple.kind))
      .add("p", res.triple.norms.p)
      .add("q", res.triple.norms.q)
      .add("lambda", res.triple.lambda)
      .add("x", res.triple.x)
      .add("y", res.triple.y)
      .add("residual_x", res.triple.residual_x)
      .add("residual_y", res.triple.residual_y)
      .add("iterations", res.report.iterations)
      .add("converged", res.report.converged);
  if (res.report.failure_reason)
    rec.add("failure_reason", to_string(*res.report.failure_reason));
  else
    rec.add_null("failure_reason");
  rec.add("zero_form_shortcut", res.report.zero_form_shortcut);
  const auto& tr = res.report.distance_trace;
  rec.add("trace_length", tr.size());
  if (!tr.empty())
    rec.add("trace_first", tr.front()).add("trace_last", tr.back());
  if (!res.report.restart_lambdas.empty())
    rec.add("restart_lambdas", res.report.restart_lambdas)
        .add("selected_restart", res.report.selected_restart);
  return rec;
}

inline Record precondition_record(const std::string& hypothesis, const std::string& what) {
  Record rec("precondition_failed");
  rec.add("hypothesis", hypothesis).add("message", what);
  return rec;
}

// Does the reduced-exponent condition (r-1)/p + s/q < 1 and r/p + (s-1)/q < 1
// hold? Used for the existence guarantee beyond the boundary.
inline bool reduced_exponents_below_one(std::size_t r, std::size_t s, double p, double q) {
  auto below = [&](std::size_t ra, std::size_t sa) {
    if (ra == 0 && sa == 0) return true;
    if (ra == 0) return static_cast<double>(sa) < q;
    if (sa == 0) return static_cast<double>(ra) < p;
    return classify_regime(ra, sa, p, q).regime == Regime::contractive;
  };
  return below(r - 1, s) && below(r, s - 1);
}

// ---------------------------------------------------------------------------
// Subcommands

inline int solve_tensor(const RunRequest& req, const RectTensor& a, std::ostream& out,
                        std::ostream& err) {
  const PQNorms pq{req.p, req.q};
  const auto info = classify_regime(a, pq);
  std::string solver;
  try {
    SolveResult res;
    if (req.force_weak || (!req.force_strong && info.regime == Regime::supercritical)) {
      solver = "weak_solve";
      res = weak_solve(a, pq, req.cfg);
    } else if (info.regime == Regime::contractive) {
      solver = "strong_solve";
      res = strong_solve(a, pq, req.cfg);
    } else if (info.regime == Regime::boundary) {
      solver = "boundary_solve";
      res = boundary_solve(a, pq, req.cfg);
    } else {
      throw RegimeError("strong triples are only computed for r/p + s/q <= 1 (xi = " +
                        detail::format_real(info.xi) + ")");
    }
    solution_record(solver, res).write(out, req.format);
    return res.report.converged ? kOk : kNotConverged;
  } catch (const StructureError& e) {
    precondition_record(e.hypothesis(), e.what()).write(out, req.format);
    err << "precondition failed: " << e.hypothesis() << '\n';
    return kPrecondition;
  } catch (const RegimeError& e) {
    precondition_record("regime", e.what()).write(out, req.format);
    err << "precondition failed: regime\n";
    return kPrecondition;
  } catch (const DomainError& e) {
    precondition_record("nonnegativity", e.what()).write(out, req.format);
    err << "precondition failed: " << e.what() << '\n';
    return kPrecondition;
  }
}

inline int cmd_solve(const RunRequest& req, std::ostream& out, std::ostream& err) {
  const auto input = load_input(req.input_path, err);
  return solve_tensor(req, input.tensor, out, err);
}

inline int cmd_hypergraph(const RunRequest& req, std::ostream& out, std::ostream& err) {
  const auto input = load_input(req.input_path, err);
  if (!input.hypergraph) throw ParseError(1, "expected a 'dhg v1' hypergraph file");
  const auto& h = *input.hypergraph;
  const auto deg = degrees(h);
  Record rec("hypergraph");
  rec.add("vertices", h.vertex_count)
      .add("r", h.r)
      .add("s", h.s)
      .add("edges", h.edges.size())
      .add_ints("outdegree", deg.outdegree)
      .add_ints("indegree", deg.indegree)
      .add_ints("tail_vertices", deg.tail_vertices(), 1)
      .add_ints("head_vertices", deg.head_vertices(), 1)
      .add("tensor_nonzeros", input.tensor.nonzeros())
      .add("weakly_irreducible", is_weakly_irreducible(input.tensor));
  rec.write(out, req.format);
  return solve_tensor(req, input.tensor, out, err);
}

inline int cmd_check(const RunRequest& req, std::ostream& out, std::ostream& err) {
  const auto input = load_input(req.input_path, err);
  const RectTensor& a = input.tensor;
  const auto info = classify_regime(a, {req.p, req.q});
  const bool nonneg = a.is_nonnegative();
  const bool sym = is_partially_symmetric(a);
  const bool irr = is_weakly_irreducible(a);

  std::vector<std::string> guarantees;
  std::string summary = to_string(info.regime);
  if (!nonneg) {
    summary += "; tensor has negative entries; no guarantee applies";
  } else {
    guarantees.push_back("weak-triple-exists");
    if (info.regime == Regime::contractive) {
      guarantees.push_back("unique-positive-strong-triple");
      summary += "; unique positive strong triple (r/p + s/q < 1)";
    } else if (info.regime == Regime::boundary) {
      if (sym && irr) {
        guarantees.push_back("unique-positive-strong-triple");
        summary += "; unique positive strong triple (r/p + s/q = 1, partially symmetric, "
                   "weakly irreducible)";
      } else {
        if (!sym) summary += "; not partially symmetric";
        if (!irr) summary += "; not weakly irreducible";
        summary += "; no strong-triple guarantee applies";
      }
    } else {
      if (sym && irr && reduced_exponents_below_one(a.r(), a.s(), req.p, req.q)) {
        guarantees.push_back("positive-strong-triple-exists");
        summary += "; positive strong triple exists (partially symmetric, weakly "
                   "irreducible, (r-1)/p + s/q < 1 and r/p + (s-1)/q < 1)";
      } else {
        if (!sym) summary += "; not partially symmetric";
        if (!irr) summary += "; not weakly irreducible";
        summary += "; no strong-triple guarantee applies";
      }
    }
    summary += "; weak triple exists";
  }

  Record rec("check");
  rec.add("shape", to_string(a.shape()));
  add_regime(rec, info);
  rec.add("nonnegative", nonneg)
      .add("partially_symmetric", sym)
      .add("weakly_irreducible", irr);
  std::string g;
  for (const auto& s : guarantees) g += (g.empty() ? "" : ",") + s;
  rec.add("guarantees", g).add("summary", summary);
  rec.write(out, req.format);
  return kOk;
}

inline int cmd_crosscheck(const RunRequest& req, std::ostream& out, std::ostream& err) {
  const auto input = load_input(req.input_path, err);
  const RectTensor& a = input.tensor;
  auto agree = [](double u, double v) {
    return std::abs(u - v) <= 1e-6 * std::max(1.0, std::abs(u));
  };
  try {
    if (a.r() == 1 && a.s() == 1) {
      const auto c = svd_crosscheck(a, req.cfg);
      const bool ok = agree(c.solver_lambda, c.oracle_lambda) && agree(c.rho_aat, c.rho_ata);
      Record rec("crosscheck");
      rec.add("case", "matrix")
          .add("solver_lambda", c.solver_lambda)
          .add("oracle_lambda", c.oracle_lambda)
          .add("rho_aat", c.rho_aat)
          .add("rho_ata", c.rho_ata)
          .add("solver_converged", c.solver_report.converged)
          .add("agree", ok);
      rec.write(out, req.format);
      if (!c.solver_report.converged) return kNotConverged;
      return ok ? kOk : kCertificateFailure;
    }
    if (a.r() != 1 && a.s() != 1)
      throw UnsupportedOrderError("crosscheck needs r = 1 or s = 1, got " + to_string(a.shape()));
    // With s = 1 the roles of the two sides swap.
    const bool swapped = a.r() != 1;
    const RectTensor t = swapped ? transpose(a) : a;
    const double exponent = swapped ? (req.p_set ? req.p : 2.0 * static_cast<double>(t.s()))
                                    : (req.q_set ? req.q : 2.0 * static_cast<double>(t.s()));
    const auto c = case2_crosscheck(t, {2.0, exponent}, req.cfg);
    const bool ok = agree(c.direct_lambda, c.gram_lambda);
    Record rec("crosscheck");
    rec.add("case", swapped ? "lower-gram" : "upper-gram")
        .add("exponent", exponent)
        .add("direct_lambda", c.direct_lambda)
        .add("gram_lambda", c.gram_lambda)
        .add("direct_converged", c.direct_report.converged)
        .add("gram_converged", c.gram_report.converged)
        .add("agree", ok);
    rec.write(out, req.format);
    if (!c.direct_report.converged || !c.gram_report.converged) return kNotConverged;
    return ok ? kOk : kCertificateFailure;
  } catch (const StructureError& e) {
    precondition_record(e.hypothesis(), e.what()).write(out, req.format);
    return kPrecondition;
  } catch (const UnsupportedOrderError& e) {
    precondition_record("order", e.what()).write(out, req.format);
    return kPrecondition;
  } catch (const RegimeError& e) {
    precondition_record("regime", e.what()).write(out, req.format);
    return kPrecondition;
  } catch (const DomainError& e) {
    precondition_record("domain", e.what()).write(out, req.format);
    return kPrecondition;
  }
}

inline int cmd_counterexample(const RunRequest& req, std::ostream& out, std::ostream&) {
  // The certificate tolerance; solver evidence uses the default solver config
  // apart from seed and threads.
  const double tol = req.tol_set ? req.cfg.tol : 1e-12;
  SolverConfig cfg;
  cfg.seed = req.cfg.seed;
  cfg.threads = req.cfg.threads;
  const auto rep = example21_analysis(cfg);

  Record summary("certificate");
  summary.add("lambda_plus", rep.lambda_roots.first)
      .add("lambda_minus", rep.lambda_roots.second)
      .add("x_coordinate", rep.x_coordinate)
      .add("y_ratio", rep.y_ratio)
      .add("y1_fourth", rep.y_fourth_powers.first)
      .add("y2_fourth", rep.y_fourth_powers.second)
      .add("norm_defect", rep.norm_defect)
      .add("tolerance", tol)
      .add("holds", rep.holds(tol));
  summary.write(out, req.format);
  for (const auto& it : rep.items) {
    Record rec("certificate_item");
    rec.add("name", it.name)
        .add("computed", it.computed)
        .add("reference", it.reference)
        .add("defect", it.defect)
        .add("holds", std::abs(it.defect) <= tol);
    rec.write(out, req.format);
  }
  Record ev("solver_evidence");
  ev.add("boundary_solve_rejects", rep.failed_hypothesis.empty() ? "-" : rep.failed_hypothesis)
      .add("unchecked_iteration_converged", rep.solver_outcome.converged)
      .add("iterations", rep.solver_outcome.iterations)
      .add("lambda", rep.solver_triple.lambda)
      .add("x", rep.solver_triple.x)
      .add("y", rep.solver_triple.y)
      .add("strong_residual", rep.solver_outcome.final_residuals.max());
  if (rep.solver_outcome.failure_reason)
    ev.add("failure_reason", to_string(*rep.solver_outcome.failure_reason));
  else
    ev.add_null("failure_reason");
  ev.write(out, req.format);
  return rep.holds(tol) ? kOk : kCertificateFailure;
}

// ---------------------------------------------------------------------------

inline std::size_t threads_from_env() {
  if (const char* v = std::getenv("RECTSPEC_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return 1;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perron-Frobenius (p,q)-eigenvalues of nonnegative rectangular tensors",
               "rectspec"};
  app.require_subcommand(1);
  RunRequest req;
  req.cfg.threads = threads_from_env();

  auto add_common = [&](CLI::App* sub, bool needs_input, bool needs_pq) {
    if (needs_input)
      sub->add_option("input", req.input_path, "rect-tensor v1 or dhg v1 file")->required();
    auto* p = sub->add_option("--p", req.p, "norm exponent for x (>= 1)");
    auto* q = sub->add_option("--q", req.q, "norm exponent for y (>= 1)");
    if (needs_pq) {
      p->required();
      q->required();
    }
    sub->add_option("--tol", req.cfg.tol, "convergence tolerance");
    sub->add_option("--max-iter", req.cfg.max_iter, "iteration cap per start");
    sub->add_option("--restarts", req.cfg.restarts, "random restarts");
    sub->add_option("--seed", req.cfg.seed, "seed for random restarts");
    sub->add_option("--format", req.format, "output format")
        ->check(CLI::IsMember({"human", "jsonl"}));
    auto* strong = sub->add_flag("--strong", req.force_strong, "compute a strong triple");
    auto* weak = sub->add_flag("--weak", req.force_weak, "compute a weak triple");
    strong->excludes(weak);
  };
  add_common(app.add_subcommand("solve", "solve for the Perron triple, routed by regime"), true, true);
  add_common(app.add_subcommand("weak-solve", "solve for a weak triple"), true, true);
  add_common(app.add_subcommand("check", "report which structural guarantees apply"), true, true);
  add_common(app.add_subcommand("hypergraph", "degrees and Perron triple of a dhg file"), true, true);
  add_common(app.add_subcommand("crosscheck", "matrix and Gram-tensor singular value checks"), true, false);
  add_common(app.add_subcommand("counterexample", "certificate for the 2x2x2x2 example tensor"), false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  for (auto* sub : app.get_subcommands()) {
    req.command = sub->get_name();
    req.p_set = sub->count("--p") > 0;
    req.q_set = sub->count("--q") > 0;
    req.tol_set = sub->count("--tol") > 0;
  }
  if (req.command == "weak-solve") req.force_weak = true;

  try {
    if (req.command != "counterexample" && req.command != "crosscheck")
      classify_regime(1, 1, req.p, req.q);
    if (!(req.cfg.tol > 0.0)) throw DomainError("--tol must be positive");
    if (req.cfg.max_iter == 0) throw DomainError("--max-iter must be positive");
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (req.command == "solve" || req.command == "weak-solve") return cmd_solve(req, out, err);
    if (req.command == "hypergraph") return cmd_hypergraph(req, out, err);
    if (req.command == "check") return cmd_check(req, out, err);
    if (req.command == "crosscheck") return cmd_crosscheck(req, out, err);
    return cmd_counterexample(req, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    err << "input error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace rectspec::cli
