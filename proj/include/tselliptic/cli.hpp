#pragma once

// Command-line front end: tselliptic spectrum|solve|greens|reproduce.
// Exit codes: 0 success, 2 not converged / no solution / failed check,
// 3 invalid configuration or usage, 1 internal error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tselliptic/config.hpp"
#include "tselliptic/error.hpp"
#include "tselliptic/io.hpp"
#include "tselliptic/reproduce.hpp"
#include "tselliptic/solver.hpp"
#include "tselliptic/spectral.hpp"

namespace tselliptic::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_failed = 2;
inline constexpr int exit_config = 3;

struct Options {
  std::string config;
  std::vector<std::string> domains;
  std::optional<double> h;
  std::size_t k = 10;
  std::string method;
  std::string out;
  std::string format;
  bool eigenfunctions = false;
  std::string f;
  std::string L, alpha, C;
  std::optional<double> t, s;
  std::string function;
  std::string function_file;
  std::string id;
  bool force = false;
  bool accept_estimated_L = false;
};

namespace detail {

inline std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string join12(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + g12(v[k]);
  return s;
}

/// Config from --config, or assembled from --domain/--f flags; flags override.
inline Config gather(const Options& o) {
  Config c;
  if (!o.config.empty()) {
    c = load_config(o.config);
    if (!o.domains.empty()) c.axes = o.domains;
  } else {
    if (o.domains.empty()) throw ConfigError("give --config or at least one --domain");
    c.axes = o.domains;
  }
  if (c.axes.size() > 4) throw ConfigError("at most 4 axes are supported");
  if (o.h) {
    if (!(*o.h > 0.0)) throw ConfigError("--h must be positive");
    if (c.mesh.empty()) c.mesh.emplace_back();
    for (auto& m : c.mesh) {
      m.h = *o.h;
      m.counts.clear();
    }
  }
  if (!o.f.empty()) c.f = o.f;
  if (!o.L.empty()) c.L = o.L;
  if (!o.alpha.empty()) c.alpha = o.alpha;
  if (!o.C.empty()) c.C = o.C;
  if (!o.method.empty()) {
    if (o.method != "picard" && o.method != "homotopy" && o.method != "enumerate")
      throw ConfigError("--method must be picard, homotopy or enumerate");
    c.solver.method = o.method;
  }
  if (o.force) c.solver.settings.force = true;
  if (o.accept_estimated_L) c.solver.settings.accept_estimated_L = true;
  return c;
}

inline std::vector<std::string> formats(const Options& o, const Config* c) {
  if (!o.format.empty()) return {o.format};
  if (c) return c->output.formats;
  return OutputSection{}.formats;
}

inline bool wants(const std::vector<std::string>& f, const char* name) {
  return std::find(f.begin(), f.end(), name) != f.end();
}

inline std::optional<std::filesystem::path> out_dir(const Options& o, const Config* c) {
  if (!o.out.empty()) return std::filesystem::path(o.out);
  if (c && c->output.dir) return std::filesystem::path(*c->output.dir);
  return std::nullopt;
}

inline std::vector<GridPtr> axis_grids(const Config& c) {
  const auto axes = parse_axes(c.axes);
  if (!(c.mesh.empty() || c.mesh.size() == 1 || c.mesh.size() == axes.size()))
    throw ConfigError("mesh list must have one entry or one per axis");
  std::vector<GridPtr> grids;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    const MeshParams m = c.mesh.empty() ? MeshParams{} : c.mesh[c.mesh.size() == 1 ? 0 : d];
    try {
      grids.push_back(discretize(axes[d], m));
    } catch (const DomainError& e) {
      throw ConfigError("axes[" + std::to_string(d) + "]: " + e.what());
    } catch (const PreconditionError& e) {
      throw ConfigError("axes[" + std::to_string(d) + "]: " + e.what());
    }
  }
  return grids;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_spectrum(const Options& o, std::ostream& out) {
  const Config c = detail::gather(o);
  if (o.k < 1) throw ConfigError("--k must be >= 1");
  const auto axes = parse_axes(c.axes);
  const auto grids = detail::axis_grids(c);
  std::vector<Spectrum1D> spectra;
  for (const auto& g : grids) spectra.push_back(spectrum_1d(g, std::min(o.k, g->interior_size())));
  const auto spec = tensor_spectrum(spectra, o.k);
  std::vector<double> values;
  for (const auto& e : spec.entries) values.push_back(e.eigenvalue);
  const double bound = lambda1_lower_bound(axes);

  out << "lambda1: " << detail::g12(values.front()) << '\n';
  out << "lower bound: " << detail::g12(bound) << '\n';
  out << "eigenvalues: " << detail::join12(values) << '\n';
  if (spec.short_of_request) out << "note: only " << values.size() << " modes exist on this grid\n";

  std::vector<double> shooting;
  if (axes.size() == 1) {
    std::size_t want = std::min<std::size_t>(o.k, 10);
    if (axes[0].is_discrete()) want = std::min(want, grids[0]->interior_size());
    try {
      shooting = eigen_shooting(axes[0], want);
    } catch (const InsufficientRootsError& e) {
      out << "shooting: " << e.what() << '\n';
    }
    if (!shooting.empty()) {
      out << "shooting: " << detail::join12(shooting) << '\n';
      double diff = 0.0;
      for (std::size_t j = 0; j < shooting.size() && j < values.size(); ++j)
        diff = std::max(diff, std::abs(values[j] - shooting[j]));
      out << "max |matrix - shooting|: " << detail::g12(diff) << '\n';
    }
  }

  const auto fmts = detail::formats(o, o.config.empty() ? nullptr : &c);
  if (const auto dir = detail::out_dir(o, o.config.empty() ? nullptr : &c)) {
    if (detail::wants(fmts, "csv")) {
      auto f = io::open_output(*dir / "eigenvalues.csv");
      io::write_eigenvalues_csv(f, spec);
      if (o.eigenfunctions && axes.size() == 1) {
        auto g = io::open_output(*dir / "eigenfunctions.csv");
        io::write_eigenfunctions_csv(g, spec.axes.front());
      }
    }
    if (detail::wants(fmts, "json")) {
      auto f = io::open_output(*dir / "spectrum.json");
      f << io::spectrum_json(spec, bound, shooting, o.eigenfunctions).dump(2) << '\n';
    }
    if (o.eigenfunctions && axes.size() == 1) {
      auto f = io::open_output(*dir / "eigenfunctions.dat");
      io::write_eigenfunctions_dat(f, spec.axes.front());
    }
  }
  return exit_ok;
}

inline int cmd_solve(const Options& o, std::ostream& out) {
  const Config c = detail::gather(o);
  const auto fmts = detail::formats(o, o.config.empty() ? nullptr : &c);
  const auto dir = detail::out_dir(o, &c).value_or("tselliptic-out");
  const PreparedProblem pp = prepare(c);
  const auto& disc = *pp.disc;
  const auto& p = pp.problem;

  const auto write_json = [&](const nlohmann::json& j) {
    auto f = io::open_output(dir / "solution.json");
    f << j.dump(2) << '\n';
  };

  try {
    if (c.solver.method == "enumerate") {
      Enumeration e;
      try {
        e = enumerate_small(disc, p, c.solver.box, c.solver.density);
      } catch (const PreconditionError& err) {
        throw ConfigError(err.what());
      }
      auto j = io::enumeration_json(e, detail::wants(fmts, "json"));
      j["method"] = "enumerate";
      write_json(j);
      if (detail::wants(fmts, "csv")) {
        auto f = io::open_output(dir / "roots.csv");
        io::write_roots_csv(f, e, disc.grid()->dim());
      }
      out << "status: " << to_string(e.status) << '\n';
      out << "solutions: " << e.solutions.size() << '\n';
      for (std::size_t r = 0; r < e.solutions.size(); ++r)
        out << "root " << r + 1 << ": " << detail::join12(interior_values(e.solutions[r].u)) << '\n';
      return e.solutions.empty() ? exit_failed : exit_ok;
    }

    Solution s;
    try {
      s = c.solver.method == "homotopy" ? homotopy_solve(disc, p) : picard_solve(disc, p);
    } catch (const HypothesisError& err) {
      throw ConfigError(err.what());
    }
    auto j = io::solution_json(s, detail::wants(fmts, "json"));
    j["method"] = c.solver.method;
    write_json(j);
    if (detail::wants(fmts, "csv")) {
      auto f = io::open_output(dir / "solution.csv");
      io::write_field_csv(f, s.u);
    }
    {
      auto f = io::open_output(dir / "solution.dat");
      io::write_field_dat(f, s.u);
    }
    out << "status: " << to_string(s.status) << '\n';
    out << "residual: " << detail::g12(s.residual) << '\n';
    out << "iterations: " << s.iterations << '\n';
    out << "lambda1: " << detail::g12(s.lambda1) << '\n';
    if (s.apriori_radius) out << "a priori radius: " << detail::g12(*s.apriori_radius) << '\n';
    if (s.non_uniqueness_risk) out << "warning: solution may not be unique\n";
    if (!s.message.empty()) out << "message: " << s.message << '\n';
    const auto v = interior_values(s.u);
    if (v.size() <= 10) out << "u: " << detail::join12(v) << '\n';
    return s.converged() ? exit_ok : exit_failed;
  } catch (const EvaluationError& err) {
    write_json({{"method", c.solver.method}, {"status", "evaluation_error"}, {"message", err.what()}});
    out << "status: evaluation_error\nmessage: " << err.what() << '\n';
    return exit_failed;
  }
}

inline int cmd_greens(const Options& o, std::ostream& out) {
  const Config c = detail::gather(o);
  if (c.axes.size() != 1) throw ConfigError("greens needs exactly one axis");
  if (o.t.has_value() != o.s.has_value()) throw ConfigError("give both --t and --s");
  if (!o.function.empty() && !o.function_file.empty()) throw ConfigError("give --function or --function-file, not both");
  if (!o.t && o.function.empty() && o.function_file.empty())
    throw ConfigError("nothing to do: give --t/--s or a function");

  const auto grid = detail::axis_grids(c).front();
  const GreenKernel G{grid->a(), grid->b()};
  const auto fmts = detail::formats(o, o.config.empty() ? nullptr : &c);
  const auto dir = detail::out_dir(o, o.config.empty() ? nullptr : &c);
  nlohmann::json report;

  if (o.t) {
    for (double v : {*o.t, *o.s})
      if (!(v >= G.a && v <= G.b)) throw ConfigError("t and s must lie in [" + detail::g12(G.a) + ", " + detail::g12(G.b) + "]");
    const double g = G(*o.t, *o.s);
    out << "G(" << detail::g12(*o.t) << "," << detail::g12(*o.s) << ") = " << detail::g12(g) << '\n';
    report["t"] = *o.t;
    report["s"] = *o.s;
    report["G"] = g;
  }

  std::string text = o.function;
  if (!o.function_file.empty()) {
    std::ifstream in(o.function_file);
    if (!in) throw ConfigError("cannot open function file " + o.function_file);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  if (!text.empty()) {
    Expression e;
    try {
      e = Expression::parse(text, c.params);
    } catch (const ParseError& err) {
      throw ConfigError(std::string("function: ") + err.what());
    }
    if (e.max_variable_index() > 1) throw ConfigError("function may only use t (x1)");
    GridFunction f = GridFunction::zeros(grid);
    try {
      for (std::size_t i = 0; i < grid->size(); ++i) {
        const double x = grid->point(i);
        f[i] = e.eval(std::span<const double>(&x, 1), 0.0);
      }
    } catch (const EvaluationError& err) {
      out << "function evaluation failed: " << err.what() << '\n';
      return exit_failed;
    }
    const auto op = assemble(grid);
    const auto y = green_inverse(op, f);
    const auto ay = apply(op, y);
    double err = 0.0;
    for (std::size_t i = 1; i < grid->last(); ++i) err = std::max(err, std::abs(ay[i] - f[i]));
    out << "A^-1 f on " << grid->size() << " grid points; max |A y - f| = " << detail::g12(err) << '\n';
    if (grid->size() <= 12) out << "y: " << detail::join12(y.values) << '\n';
    report["function"] = e.to_string();
    report["t_grid"] = std::vector<double>(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) report["t_grid"][i] = grid->point(i);
    report["f"] = f.values;
    report["y"] = y.values;
    report["max_operator_error"] = err;
    if (dir && detail::wants(fmts, "csv")) {
      auto file = io::open_output(*dir / "greens.csv");
      file << "t,f,y\n";
      for (std::size_t i = 0; i < grid->size(); ++i)
        file << io::csv_number(grid->point(i)) << ',' << io::csv_number(f[i]) << ',' << io::csv_number(y[i]) << '\n';
      auto plot = io::open_output(*dir / "greens.dat");
      for (std::size_t i = 0; i < grid->size(); ++i) plot << io::csv_number(grid->point(i)) << ' ' << io::csv_number(y[i]) << '\n';
    }
  } else if (dir && detail::wants(fmts, "csv")) {
    auto file = io::open_output(*dir / "greens.csv");
    file << "t,s,G\n" << io::csv_number(*o.t) << ',' << io::csv_number(*o.s) << ',' << io::csv_number(G(*o.t, *o.s)) << '\n';
  }
  if (dir && detail::wants(fmts, "json")) {
    auto file = io::open_output(*dir / "greens.json");
    file << report.dump(2) << '\n';
  }
  return exit_ok;
}

inline int cmd_reproduce(const Options& o, std::ostream& out) {
  std::vector<std::string> ids;
  if (o.id == "all") {
    ids = reproduce_ids();
  } else {
    const auto& known = reproduce_ids();
    if (std::find(known.begin(), known.end(), o.id) == known.end())
      throw ConfigError("unknown reproduce id '" + o.id + "'; expected one of ex-7.1 ... ex-7.9, table-1, all");
    ids = {o.id};
  }
  std::vector<ReproReport> reports;
  bool ok = true;
  for (const auto& id : ids) {
    reports.push_back(reproduce(id));
    print_report(out, reports.back());
    ok = ok && reports.back().pass();
  }
  out << (ok ? "ALL PASS" : "SOME CHECKS FAILED") << '\n';

  if (!o.out.empty()) {
    const std::filesystem::path dir(o.out);
    const auto fmts = detail::formats(o, nullptr);
    if (detail::wants(fmts, "csv")) {
      auto f = io::open_output(dir / "reproduce.csv");
      f << "id,item,value,expected,tolerance,compare,pass\n";
      for (const auto& r : reports)
        for (const auto& i : r.items) {
          const char* cmp = i.cmp == Compare::near ? "near" : i.cmp == Compare::at_most ? "at_most" : "at_least";
          f << r.id << ",\"" << i.name << "\"," << io::csv_number(i.value) << ',' << io::csv_number(i.expected) << ','
            << io::csv_number(i.tol) << ',' << cmp << ',' << (i.pass() ? "true" : "false") << '\n';
        }
    }
    if (detail::wants(fmts, "json")) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : reports) j.push_back(report_json(r));
      auto f = io::open_output(dir / "reproduce.json");
      f << j.dump(2) << '\n';
    }
  }
  return ok ? exit_ok : exit_failed;
}

// ---------------------------------------------------------------------------

/// Runs the CLI on `args` (program name excluded).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elliptic Dirichlet problems on products of time scales", "tselliptic"};
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON problem configuration");
    // One literal per occurrence; "[0,3]" must not be read as a list.
    sub->add_option("--domain", o.domains, "time-scale literal, once per axis")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->allow_extra_args(false);
    sub->add_option("--h", o.h, "mesh step for every interval");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and eigenfunctions");
  add_common(spectrum);
  spectrum->add_option("--k", o.k, "number of eigenvalues")->default_val(10);
  spectrum->add_flag("--eigenfunctions", o.eigenfunctions, "also write eigenfunction tables (1D)");

  auto* solve = app.add_subcommand("solve", "solve -Laplacian u + f(x,u) = 0");
  add_common(solve);
  solve->add_option("--method", o.method, "picard, homotopy or enumerate");
  solve->add_option("--f", o.f, "nonlinearity expression");
  solve->add_option("--L", o.L, "Lipschitz constant (number or constant expression)");
  solve->add_option("--alpha", o.alpha, "one-sided growth alpha");
  solve->add_option("--C", o.C, "one-sided growth C");
  solve->add_flag("--force", o.force, "iterate even without a contraction guarantee");
  solve->add_flag("--accept-estimated-L", o.accept_estimated_L, "use a sampled Lipschitz estimate when L is absent");

  auto* greens = app.add_subcommand("greens", "Green's function values and A^-1 f");
  add_common(greens);
  greens->add_option("--t", o.t, "first argument of G");
  greens->add_option("--s", o.s, "second argument of G");
  greens->add_option("--function", o.function, "f(t) expression for A^-1 f");
  greens->add_option("--function-file", o.function_file, "file holding an f(t) expression");

  auto* repro = app.add_subcommand("reproduce", "run a reference scenario");
  repro->add_option("id", o.id, "ex-7.1 ... ex-7.9, table-1 or all")->required();
  repro->add_option("--out", o.out, "output directory");
  repro->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));

  std::vector<const char*> argv{"tselliptic"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_config;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(o, out);
    if (solve->parsed()) return cmd_solve(o, out);
    if (greens->parsed()) return cmd_greens(o, out);
    return cmd_reproduce(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
}

}  // namespace tselliptic::cli
