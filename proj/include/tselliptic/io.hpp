#pragma once

// CSV, JSON and plot-data writers for spectra and solutions.
// CSV uses '.' decimals and 17 significant digits; fields are never quoted
// because every field is numeric or a fixed identifier.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tselliptic/error.hpp"
#include "tselliptic/product_grid.hpp"
#include "tselliptic/solver.hpp"
#include "tselliptic/spectral.hpp"

namespace tselliptic::io {

using json = nlohmann::json;

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON cannot carry non-finite numbers; they become null.
inline json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// Spectra

/// index,eigenvalue (1D) or i1,...,in,eigenvalue (tensor).
inline void write_eigenvalues_csv(std::ostream& os, const TensorSpectrum& spec) {
  const std::size_t n = spec.axes.size();
  if (n == 1) {
    os << "index,eigenvalue\n";
  } else {
    for (std::size_t d = 0; d < n; ++d) os << 'i' << d + 1 << ',';
    os << "eigenvalue\n";
  }
  for (const auto& e : spec.entries) {
    for (std::size_t i : e.index) os << i << ',';
    os << csv_number(e.eigenvalue) << '\n';
  }
}

/// t,phi_1,...,phi_k over the closed 1D grid.
inline void write_eigenfunctions_csv(std::ostream& os, const Spectrum1D& spec) {
  os << 't';
  for (std::size_t k = 0; k < spec.size(); ++k) os << ",phi_" << k + 1;
  os << '\n';
  for (std::size_t i = 0; i < spec.grid->size(); ++i) {
    os << csv_number(spec.grid->point(i));
    for (const auto& phi : spec.eigenfunctions) os << ',' << csv_number(phi[i]);
    os << '\n';
  }
}

/// One two-column block per mode, blocks separated by two blank lines.
inline void write_eigenfunctions_dat(std::ostream& os, const Spectrum1D& spec) {
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (k) os << "\n\n";
    os << "# mode " << k + 1 << " eigenvalue " << csv_number(spec.eigenvalues[k]) << '\n';
    for (std::size_t i = 0; i < spec.grid->size(); ++i)
      os << csv_number(spec.grid->point(i)) << ' ' << csv_number(spec.eigenfunctions[k][i]) << '\n';
  }
}

inline json spectrum_json(const TensorSpectrum& spec, double lower_bound, const std::vector<double>& shooting,
                          bool with_functions) {
  json j;
  j["dimension"] = spec.axes.size();
  j["lambda1"] = spec.entries.empty() ? json(nullptr) : json_number(spec.entries.front().eigenvalue);
  j["lambda1_lower_bound"] = json_number(lower_bound);
  j["short_of_request"] = spec.short_of_request;
  json entries = json::array();
  for (const auto& e : spec.entries) entries.push_back({{"index", e.index}, {"eigenvalue", json_number(e.eigenvalue)}});
  j["eigenvalues"] = entries;
  if (!shooting.empty()) {
    json s = json::array();
    for (double v : shooting) s.push_back(json_number(v));
    j["shooting"] = s;
  }
  if (with_functions && spec.axes.size() == 1) {
    const auto& s1 = spec.axes.front();
    std::vector<double> t(s1.grid->size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = s1.grid->point(i);
    json fns = json::array();
    for (const auto& phi : s1.eigenfunctions) fns.push_back(phi.values);
    j["grid"] = t;
    j["eigenfunctions"] = fns;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Solutions

/// x1,...,xn,u over the closed product grid.
inline void write_field_csv(std::ostream& os, const Field& u) {
  const auto& g = *u.grid;
  for (std::size_t d = 0; d < g.dim(); ++d) os << 'x' << d + 1 << ',';
  os << "u\n";
  for_each_point(g, [&](std::size_t flat, std::span<const std::size_t> idx) {
    for (double x : g.coordinates(idx)) os << csv_number(x) << ',';
    os << csv_number(u[flat]) << '\n';
  });
}

/// Whitespace-separated columns; 2D data gets a blank line after each row
/// of the last axis so gnuplot's splot reads it as a surface.
inline void write_field_dat(std::ostream& os, const Field& u) {
  const auto& g = *u.grid;
  const std::size_t last = g.extent(g.dim() - 1);
  for_each_point(g, [&](std::size_t flat, std::span<const std::size_t> idx) {
    for (double x : g.coordinates(idx)) os << csv_number(x) << ' ';
    os << csv_number(u[flat]) << '\n';
    if (g.dim() == 2 && idx[1] + 1 == last) os << '\n';
  });
}

inline json optional_json(const std::optional<double>& v) { return v ? json_number(*v) : json(nullptr); }

inline json solution_json(const Solution& s, bool with_values) {
  json j;
  j["status"] = to_string(s.status);
  j["residual"] = json_number(s.residual);
  j["iterations"] = s.iterations;
  j["contraction_ratio"] = json_number(s.contraction_ratio);
  j["lambda1"] = json_number(s.lambda1);
  j["lambda1_lower_bound"] = json_number(s.lambda1_lower_bound);
  j["lipschitz"] = optional_json(s.lipschitz);
  j["lipschitz_is_estimate"] = s.lipschitz_is_estimate;
  j["apriori_radius"] = optional_json(s.apriori_radius);
  j["non_uniqueness_risk"] = s.non_uniqueness_risk;
  j["last_good_tau"] = optional_json(s.last_good_tau);
  j["one_sided_sampled_ok"] = s.one_sided_sampled_ok ? json(*s.one_sided_sampled_ok) : json(nullptr);
  j["message"] = s.message;
  if (with_values && s.u.grid) {
    json pts = json::array();
    const auto& g = *s.u.grid;
    for_each_point(g, [&](std::size_t flat, std::span<const std::size_t> idx) {
      pts.push_back({{"x", g.coordinates(idx)}, {"u", json_number(s.u[flat])}});
    });
    j["u"] = pts;
  }
  return j;
}

inline json enumeration_json(const Enumeration& e, bool with_values) {
  json j;
  j["status"] = to_string(e.status);
  j["starts"] = e.starts;
  j["candidates"] = e.candidates.size();
  json sols = json::array();
  for (const auto& s : e.solutions) {
    json one;
    one["interior"] = interior_values(s.u);
    one["residual"] = json_number(s.residual);
    if (with_values) one["solution"] = solution_json(s, true);
    sols.push_back(one);
  }
  j["solutions"] = sols;
  j["count"] = e.solutions.size();
  if (!e.solutions.empty()) j["lambda1"] = json_number(e.solutions.front().lambda1);
  return j;
}

/// One row per root: root,x1,...,xn,u over interior points only.
inline void write_roots_csv(std::ostream& os, const Enumeration& e, std::size_t dim) {
  os << "root,";
  for (std::size_t d = 0; d < dim; ++d) os << 'x' << d + 1 << ',';
  os << "u\n";
  for (std::size_t r = 0; r < e.solutions.size(); ++r) {
    const auto& u = e.solutions[r].u;
    const auto& g = *u.grid;
    for_each_interior(g, [&](std::size_t flat, std::span<const std::size_t> idx) {
      os << r + 1 << ',';
      for (double x : g.coordinates(idx)) os << csv_number(x) << ',';
      os << csv_number(u[flat]) << '\n';
    });
  }
}

}  // namespace tselliptic::io
