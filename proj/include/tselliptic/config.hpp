#pragma once

// JSON problem configuration. Schema (all keys optional unless noted):
//
//   axes        (required) list of time-scale literals, one per axis
//   mesh        {h, counts, default_subintervals, junction_weights}, or a list of such objects (one per axis)
//   f           expression string (default "0")
//   params      {name: number} bindings for f and the hypotheses
//   hypotheses  {L, alpha, C}: numbers or constant expressions (may use params and lambda1)
//   solver      {method, step_tol, residual_tol, max_iter, homotopy_steps, initial_guess,
//                force, accept_estimated_L, box, density}
//   output      {dir, formats}
//
// Unknown keys anywhere are rejected.

#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tselliptic/error.hpp"
#include "tselliptic/expression.hpp"
#include "tselliptic/nonlinearity.hpp"
#include "tselliptic/solver.hpp"
#include "tselliptic/timescale.hpp"

namespace tselliptic {

using json = nlohmann::json;

struct SolverSection {
  std::string method = "picard";  // picard | homotopy | enumerate
  SolverConfig settings;
  double box = 100.0;
  std::size_t density = 400;
};

struct OutputSection {
  std::optional<std::string> dir;
  std::vector<std::string> formats{"csv", "json"};
};

using HypothesisValue = std::variant<double, std::string>;

struct Config {
  std::vector<std::string> axes;
  std::vector<MeshParams> mesh;
  std::string f = "0";
  Bindings params;
  std::optional<HypothesisValue> L, alpha, C;
  SolverSection solver;
  OutputSection output;
};

namespace detail {

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

inline double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + " must be a number");
  return j.get<double>();
}

inline std::size_t get_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(where + " must be a non-negative integer");
  return j.get<std::size_t>();
}

inline bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + " must be true or false");
  return j.get<bool>();
}

inline MeshParams parse_mesh(const json& j, const std::string& where) {
  reject_unknown(j, {"h", "counts", "default_subintervals", "junction_weights"}, where);
  MeshParams m;
  if (j.contains("h")) {
    m.h = get_number(j["h"], where + ".h");
    if (!(*m.h > 0.0)) throw ConfigError(where + ".h must be positive");
  }
  if (j.contains("counts")) {
    if (!j["counts"].is_array()) throw ConfigError(where + ".counts must be a list of integers");
    for (const auto& c : j["counts"]) {
      const auto n = get_count(c, where + ".counts[]");
      if (n < 2) throw ConfigError(where + ".counts entries must be >= 2");
      m.counts.push_back(static_cast<int>(n));
    }
  }
  if (j.contains("default_subintervals")) {
    const auto n = get_count(j["default_subintervals"], where + ".default_subintervals");
    if (n < 1) throw ConfigError(where + ".default_subintervals must be >= 1");
    m.default_subintervals = static_cast<int>(n);
  }
  if (j.contains("junction_weights")) m.junction_weights = get_bool(j["junction_weights"], where + ".junction_weights");
  return m;
}

inline HypothesisValue parse_hypothesis(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ConfigError(where + " must be a number or a constant expression string");
}

}  // namespace detail

inline Config parse_config(const json& j) {
  detail::reject_unknown(j, {"axes", "mesh", "f", "params", "hypotheses", "solver", "output"}, "config");
  Config c;
  if (!j.contains("axes") || !j["axes"].is_array() || j["axes"].empty())
    throw ConfigError("config.axes must be a non-empty list of time-scale literals");
  for (const auto& a : j["axes"]) {
    if (!a.is_string()) throw ConfigError("config.axes entries must be strings");
    c.axes.push_back(a.get<std::string>());
  }
  if (c.axes.size() > 4) throw ConfigError("config.axes supports at most 4 axes");

  if (j.contains("mesh")) {
    const auto& m = j["mesh"];
    if (m.is_array()) {
      if (m.size() != c.axes.size()) throw ConfigError("config.mesh list must have one entry per axis");
      for (std::size_t k = 0; k < m.size(); ++k) c.mesh.push_back(detail::parse_mesh(m[k], "mesh[" + std::to_string(k) + "]"));
    } else {
      c.mesh.push_back(detail::parse_mesh(m, "mesh"));
    }
  }
  if (j.contains("f")) {
    if (!j["f"].is_string()) throw ConfigError("config.f must be an expression string");
    c.f = j["f"].get<std::string>();
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("config.params must be an object");
    for (const auto& [k, v] : j["params"].items()) c.params[k] = detail::get_number(v, "params." + k);
  }
  if (j.contains("hypotheses")) {
    const auto& h = j["hypotheses"];
    detail::reject_unknown(h, {"L", "alpha", "C"}, "hypotheses");
    if (h.contains("L")) c.L = detail::parse_hypothesis(h["L"], "hypotheses.L");
    if (h.contains("alpha")) c.alpha = detail::parse_hypothesis(h["alpha"], "hypotheses.alpha");
    if (h.contains("C")) c.C = detail::parse_hypothesis(h["C"], "hypotheses.C");
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    detail::reject_unknown(s, {"method", "step_tol", "residual_tol", "max_iter", "homotopy_steps", "initial_guess", "force",
                               "accept_estimated_L", "box", "density"},
                           "solver");
    auto& out = c.solver;
    if (s.contains("method")) {
      if (!s["method"].is_string()) throw ConfigError("solver.method must be a string");
      out.method = s["method"].get<std::string>();
    }
    if (s.contains("step_tol")) out.settings.step_tol = detail::get_number(s["step_tol"], "solver.step_tol");
    if (s.contains("residual_tol")) out.settings.residual_tol = detail::get_number(s["residual_tol"], "solver.residual_tol");
    if (s.contains("max_iter")) out.settings.max_iter = detail::get_count(s["max_iter"], "solver.max_iter");
    if (s.contains("homotopy_steps"))
      out.settings.homotopy_steps = detail::get_count(s["homotopy_steps"], "solver.homotopy_steps");
    if (s.contains("initial_guess")) out.settings.initial_guess = detail::get_number(s["initial_guess"], "solver.initial_guess");
    if (s.contains("force")) out.settings.force = detail::get_bool(s["force"], "solver.force");
    if (s.contains("accept_estimated_L"))
      out.settings.accept_estimated_L = detail::get_bool(s["accept_estimated_L"], "solver.accept_estimated_L");
    if (s.contains("box")) out.box = detail::get_number(s["box"], "solver.box");
    if (s.contains("density")) out.density = detail::get_count(s["density"], "solver.density");
  }
  if (c.solver.method != "picard" && c.solver.method != "homotopy" && c.solver.method != "enumerate")
    throw ConfigError("solver.method must be picard, homotopy or enumerate");
  if (j.contains("output")) {
    const auto& o = j["output"];
    detail::reject_unknown(o, {"dir", "formats"}, "output");
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) throw ConfigError("output.dir must be a string");
      c.output.dir = o["dir"].get<std::string>();
    }
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) throw ConfigError("output.formats must be a list");
      c.output.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string() || (f != "csv" && f != "json")) throw ConfigError("output.formats entries must be csv or json");
        c.output.formats.push_back(f.get<std::string>());
      }
    }
  }
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

inline std::vector<TimeScale> parse_axes(const std::vector<std::string>& axes) {
  std::vector<TimeScale> out;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    try {
      out.push_back(TimeScale::parse(axes[k]));
    } catch (const ParseError& e) {
      throw ConfigError("axes[" + std::to_string(k) + "]: " + e.what());
    } catch (const DomainError& e) {
      throw ConfigError("axes[" + std::to_string(k) + "]: " + e.what());
    }
  }
  return out;
}

/// A discretized problem ready for a solver.
struct PreparedProblem {
  Problem problem;
  std::shared_ptr<const Discretization> disc;
};

inline PreparedProblem prepare(const Config& c) {
  PreparedProblem out;
  auto& p = out.problem;
  p.axes = parse_axes(c.axes);
  p.mesh = c.mesh;
  try {
    out.disc = std::make_shared<const Discretization>(p);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  Bindings b = c.params;
  b["lambda1"] = out.disc->lambda1();
  try {
    p.f = Expression::parse(c.f, b);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("f: ") + e.what());
  }
  if (static_cast<std::size_t>(p.f.max_variable_index()) > p.axes.size())
    throw ConfigError("f uses x" + std::to_string(p.f.max_variable_index()) + " but only " +
                      std::to_string(p.axes.size()) + " axes are given");
  const auto value = [&](const std::optional<HypothesisValue>& h, const char* name) -> std::optional<double> {
    if (!h) return std::nullopt;
    if (const double* d = std::get_if<double>(&*h)) return *d;
    try {
      const auto e = Expression::parse(std::get<std::string>(*h), b);
      if (!e.is_constant()) throw ConfigError("must not depend on u or x");
      return e.eval({}, 0.0);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("hypotheses.") + name + ": " + e.what());
    }
  };
  p.hypotheses.L = value(c.L, "L");
  p.hypotheses.alpha = value(c.alpha, "alpha");
  p.hypotheses.C = value(c.C, "C");
  try {
    p.hypotheses.validate();
  } catch (const HypothesisError& e) {
    throw ConfigError(e.what());
  }
  p.config = c.solver.settings;
  return out;
}

}  // namespace tselliptic
