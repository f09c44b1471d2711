#pragma once

// Bounded time scales (finite unions of closed intervals and isolated
// points), their jump operators, the computational grid obtained by
// subdividing the intervals, and delta/nabla calculus on grid functions.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tselliptic/error.hpp"

namespace tselliptic {

struct Interval {
  double lo;
  double hi;
  bool operator==(const Interval&) const = default;
};

struct Point {
  double t;
  bool operator==(const Point&) const = default;
};

using Segment = std::variant<Interval, Point>;

inline double segment_lo(const Segment& s) {
  return std::visit([](const auto& v) {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Interval>) return v.lo;
    else return v.t;
  }, s);
}

inline double segment_hi(const Segment& s) {
  return std::visit([](const auto& v) {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Interval>) return v.hi;
    else return v.t;
  }, s);
}

inline bool is_interval(const Segment& s) { return std::holds_alternative<Interval>(s); }

/// An ordered, gap-separated union of closed intervals and isolated points.
class TimeScale {
 public:
  explicit TimeScale(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw DomainError("time scale has no segments");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const auto& s = segments_[i];
      if (const auto* iv = std::get_if<Interval>(&s)) {
        if (!std::isfinite(iv->lo) || !std::isfinite(iv->hi) || !(iv->lo < iv->hi))
          throw DomainError("interval [" + std::to_string(iv->lo) + "," + std::to_string(iv->hi) +
                            "] must have lo < hi");
      } else if (!std::isfinite(std::get<Point>(s).t)) {
        throw DomainError("point must be finite");
      }
      if (i > 0 && !(segment_hi(segments_[i - 1]) < segment_lo(s)))
        throw DomainError("segments must be strictly increasing and separated by a gap");
    }
    if (!has_interior()) throw DomainError("empty interior: (a,b) contains no point of the time scale");
  }

  /// Parses the literal syntax "[0,1],2,3" (intervals in brackets, points bare).
  static TimeScale parse(std::string_view text);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  double a() const { return segment_lo(segments_.front()); }
  double b() const { return segment_hi(segments_.back()); }
  double length() const { return b() - a(); }

  bool contains(double t) const { return locate(t).has_value(); }

  bool is_discrete() const {
    return std::none_of(segments_.begin(), segments_.end(), [](const Segment& s) { return is_interval(s); });
  }

  double sigma(double t) const {
    const std::size_t k = require(t);
    if (const auto* iv = std::get_if<Interval>(&segments_[k]); iv && t < iv->hi) return t;
    return k + 1 < segments_.size() ? segment_lo(segments_[k + 1]) : t;
  }

  double rho(double t) const {
    const std::size_t k = require(t);
    if (const auto* iv = std::get_if<Interval>(&segments_[k]); iv && t > iv->lo) return t;
    return k > 0 ? segment_hi(segments_[k - 1]) : t;
  }

  double mu(double t) const { return sigma(t) - t; }
  double nu(double t) const { return t - rho(t); }

  std::string to_string() const;

  bool operator==(const TimeScale&) const = default;

 private:
  bool has_interior() const {
    // (a,b) meets T iff some segment reaches strictly inside.
    const double lo = a(), hi = b();
    for (const auto& s : segments_) {
      if (is_interval(s)) return true;  // an interval always contains points strictly between a and b
      const double t = std::get<Point>(s).t;
      if (t > lo && t < hi) return true;
    }
    return false;
  }

  std::optional<std::size_t> locate(double t) const {
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      if (const auto* iv = std::get_if<Interval>(&segments_[k])) {
        if (t >= iv->lo && t <= iv->hi) return k;
      } else if (std::get<Point>(segments_[k]).t == t) {
        return k;
      }
    }
    return std::nullopt;
  }

  std::size_t require(double t) const {
    auto k = locate(t);
    if (!k) throw DomainError("point " + std::to_string(t) + " is not in the time scale");
    return *k;
  }

  std::vector<Segment> segments_;
};

namespace detail {

inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class LiteralReader {
 public:
  explicit LiteralReader(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }
  bool at_end() { skip_ws(); return pos_ >= s_.size(); }
  bool peek(char c) { skip_ws(); return pos_ < s_.size() && s_[pos_] == c; }
  void expect(char c) {
    if (!peek(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }
  double number() {
    skip_ws();
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    // from_chars rejects a leading '+'
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) throw ParseError("expected a number", pos_);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline TimeScale TimeScale::parse(std::string_view text) {
  detail::LiteralReader r(text);
  std::vector<Segment> segs;
  if (r.at_end()) throw ParseError("empty time-scale literal", 0);
  for (;;) {
    if (r.peek('[')) {
      r.expect('[');
      const double lo = r.number();
      r.expect(',');
      const double hi = r.number();
      r.expect(']');
      segs.emplace_back(Interval{lo, hi});
    } else {
      segs.emplace_back(Point{r.number()});
    }
    if (r.at_end()) break;
    r.expect(',');
  }
  return TimeScale(std::move(segs));
}

inline std::string TimeScale::to_string() const {
  std::string out;
  for (const auto& s : segments_) {
    if (!out.empty()) out += ',';
    if (const auto* iv = std::get_if<Interval>(&s))
      out += "[" + detail::format_real(iv->lo) + "," + detail::format_real(iv->hi) + "]";
    else
      out += detail::format_real(std::get<Point>(s).t);
  }
  return out;
}

/// How intervals are subdivided. Either a global step `h`, or `counts`
/// giving the number of grid points (>= 2, endpoints included) for each
/// interval in order. With neither, every interval gets
/// `default_subintervals` equal pieces.
struct MeshParams {
  std::optional<double> h;
  std::vector<int> counts;
  int default_subintervals = 8;
  /// Trapezoid-lump the Delta-measure at points where a continuous piece
  /// meets a gap. Off gives the raw forward-gap weights of the grid viewed
  /// as a time scale (first-order accurate at such junctions).
  bool junction_weights = true;

  bool operator==(const MeshParams&) const = default;
};

/// Whether a grid point is left/right dense in the source time scale.
struct PointKind {
  bool left_dense = false;
  bool right_dense = false;
  bool operator==(const PointKind&) const = default;
};

/// Finite ordered point set t_0 = a < ... < t_m = b with forward gaps mu_i.
class Grid {
 public:
  Grid(TimeScale source, MeshParams mesh, std::vector<double> points, std::vector<PointKind> kinds)
      : source_(std::move(source)), mesh_(std::move(mesh)), points_(std::move(points)), kinds_(std::move(kinds)) {
    if (points_.size() < 2) throw DomainError("grid needs at least two points");
    mu_.resize(points_.size() - 1);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      mu_[i] = points_[i + 1] - points_[i];
      if (!(mu_[i] > 0.0)) throw DomainError("grid points must be strictly increasing");
    }
    weights_.assign(points_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) weights_[i] = mu_[i];
    if (mesh_.junction_weights) {
      for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
        const auto k = kinds_[i];
        if (k.left_dense && !k.right_dense) weights_[i] = mu_[i] + 0.5 * mu_[i - 1];
        else if (k.right_dense && !k.left_dense) weights_[i] = 0.5 * mu_[i];
      }
    }
  }

  /// A purely discrete grid on the given points (itself a time scale).
  static std::shared_ptr<const Grid> from_points(std::vector<double> points) {
    std::vector<Segment> segs;
    segs.reserve(points.size());
    for (double t : points) segs.emplace_back(Point{t});
    std::vector<PointKind> kinds(points.size());
    return std::make_shared<const Grid>(TimeScale(std::move(segs)), MeshParams{}, std::move(points), std::move(kinds));
  }

  const TimeScale& source() const noexcept { return source_; }
  const MeshParams& mesh() const noexcept { return mesh_; }

  /// Number of points m + 1.
  std::size_t size() const noexcept { return points_.size(); }
  /// Index m of the last point b.
  std::size_t last() const noexcept { return points_.size() - 1; }
  std::size_t interior_size() const noexcept { return points_.size() - 2; }

  std::span<const double> points() const noexcept { return points_; }
  double point(std::size_t i) const { return points_[i]; }
  /// Forward gaps mu_i = t_{i+1} - t_i, i = 0..m-1.
  std::span<const double> mu() const noexcept { return mu_; }
  double mu(std::size_t i) const { return mu_[i]; }
  /// Backward gap nu_i = mu_{i-1}, i = 1..m.
  double nu(std::size_t i) const { return mu_[i - 1]; }
  /// Quadrature weights of the source Delta-measure (weights[m] = 0).
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const PointKind> kinds() const noexcept { return kinds_; }

  double a() const { return points_.front(); }
  double b() const { return points_.back(); }

  bool operator==(const Grid& o) const { return points_ == o.points_ && weights_ == o.weights_; }

 private:
  TimeScale source_;
  MeshParams mesh_;
  std::vector<double> points_;
  std::vector<PointKind> kinds_;
  std::vector<double> mu_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr discretize(const TimeScale& ts, const MeshParams& mesh = {}) {
  if (mesh.h && !(*mesh.h > 0.0)) throw PreconditionError("mesh step h must be positive");
  if (mesh.default_subintervals < 1) throw PreconditionError("default_subintervals must be >= 1");
  const auto& segs = ts.segments();
  const auto n_intervals = static_cast<std::size_t>(std::count_if(segs.begin(), segs.end(), is_interval));
  if (!mesh.counts.empty()) {
    if (mesh.counts.size() != n_intervals)
      throw PreconditionError("mesh counts must list one entry per interval");
    for (int c : mesh.counts)
      if (c < 2) throw PreconditionError("per-interval point counts must be >= 2");
  }

  std::vector<double> pts;
  std::vector<PointKind> kinds;
  std::size_t interval_index = 0;
  for (const auto& s : segs) {
    if (const auto* iv = std::get_if<Interval>(&s)) {
      const double len = iv->hi - iv->lo;
      std::size_t n;
      if (!mesh.counts.empty()) n = static_cast<std::size_t>(mesh.counts[interval_index] - 1);
      // A lone interval needs two subintervals for the grid to keep an interior point.
      else if (mesh.h) n = static_cast<std::size_t>(std::max(segs.size() == 1 ? 2.0 : 1.0, std::ceil(len / *mesh.h - 1e-9)));
      else n = static_cast<std::size_t>(mesh.default_subintervals);
      ++interval_index;
      for (std::size_t j = 0; j <= n; ++j) {
        const double t = j == n ? iv->hi : iv->lo + len * static_cast<double>(j) / static_cast<double>(n);
        pts.push_back(t);
        kinds.push_back(PointKind{j > 0, j < n});
      }
    } else {
      pts.push_back(std::get<Point>(s).t);
      kinds.push_back(PointKind{});
    }
  }
  if (pts.size() < 3) throw DomainError("empty interior");
  return std::make_shared<const Grid>(ts, mesh, std::move(pts), std::move(kinds));
}

/// Real values at every grid point, endpoints included.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw PreconditionError("grid function needs a grid");
    if (values.size() != grid->size()) throw PreconditionError("grid function length does not match grid");
  }
  static GridFunction zeros(GridPtr g) {
    const auto n = g->size();
    return GridFunction(std::move(g), std::vector<double>(n, 0.0));
  }
  template <class F>
  static GridFunction sample(GridPtr g, F&& f) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g->point(i));
    return GridFunction(std::move(g), std::move(v));
  }

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

inline bool same_grid(const GridPtr& a, const GridPtr& b) {
  return a && b && (a == b || *a == *b);
}

enum class DerivativeKind { Delta, Nabla };

/// Difference quotients; the end where the quotient is undefined (t_m for
/// Delta, t_0 for nabla) holds std::nullopt.
struct GridDerivative {
  GridPtr grid;
  DerivativeKind kind;
  std::vector<std::optional<double>> values;
};

inline GridDerivative delta_derivative(const GridFunction& u) {
  const auto& g = *u.grid;
  std::vector<std::optional<double>> d(g.size());
  for (std::size_t i = 0; i < g.last(); ++i) d[i] = (u[i + 1] - u[i]) / g.mu(i);
  return {u.grid, DerivativeKind::Delta, std::move(d)};
}

inline GridDerivative nabla_derivative(const GridFunction& u) {
  const auto& g = *u.grid;
  std::vector<std::optional<double>> d(g.size());
  for (std::size_t i = 1; i <= g.last(); ++i) d[i] = (u[i] - u[i - 1]) / g.nu(i);
  return {u.grid, DerivativeKind::Nabla, std::move(d)};
}

/// Sum_{i=0}^{m-1} u_i mu_i: the Delta-integral over [a,b) of the grid.
inline double delta_integral(const GridFunction& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.grid->last(); ++i) s += u[i] * u.grid->mu(i);
  return s;
}

/// Sum_{i=1}^{m} u_i nu_i: the nabla-integral over (a,b].
inline double nabla_integral(const GridFunction& u) {
  double s = 0.0;
  for (std::size_t i = 1; i <= u.grid->last(); ++i) s += u[i] * u.grid->nu(i);
  return s;
}

/// Delta-integral of a derivative times a grid function; every value on
/// [a,b) must be defined.
inline double delta_integral(const GridDerivative& d, const GridFunction& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.grid->last(); ++i) {
    if (!d.values[i]) throw PreconditionError("derivative undefined on [a,b)");
    s += *d.values[i] * g[i] * d.grid->mu(i);
  }
  return s;
}

inline double nabla_integral(const GridDerivative& d, const GridFunction& g) {
  double s = 0.0;
  for (std::size_t i = 1; i <= d.grid->last(); ++i) {
    if (!d.values[i]) throw PreconditionError("derivative undefined on (a,b]");
    s += *d.values[i] * g[i] * d.grid->nu(i);
  }
  return s;
}

/// Jump operators on the grid viewed as a time scale, by point index.
inline std::size_t grid_sigma(const Grid& g, std::size_t i) { return i < g.last() ? i + 1 : i; }
inline std::size_t grid_rho(const Grid&, std::size_t i) { return i > 0 ? i - 1 : i; }

}  // namespace tselliptic
