#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "hrush/encoding.hpp"
#include "hrush/errors.hpp"

namespace hrush {

// Continuous strictly increasing F with F(0) = 0: piecewise linear through
// the control points (the last segment extends to the right), switching to
// F(x) = ln x + F(x0) − ln x0 from x0 on when a log tail is set.
class GrowthFunction {
 public:
  using Point = std::pair<double, double>;

  GrowthFunction(std::vector<Point> control_points, std::optional<double> log_tail_from)
      : points_(std::move(control_points)), tail_from_(log_tail_from) {
    if (points_.size() < 2) throw DomainError("growth function needs at least two control points");
    if (points_.front().first != 0.0 || points_.front().second != 0.0) {
      throw DomainError("growth function must start at (0,0)");
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (!(points_[i].first > points_[i - 1].first) || !(points_[i].second > points_[i - 1].second)) {
        throw DomainError("control points must be strictly increasing in both coordinates");
      }
    }
    if (tail_from_ && !(*tail_from_ > 0.0)) throw DomainError("log tail must start at x0 > 0");
    if (tail_from_) tail_base_ = linear(*tail_from_);
  }

  // Values F(1)=2, F(2)=3, F(5)=5 joined linearly, natural-log tail from 5.
  static GrowthFunction example() {
    return GrowthFunction({{0, 0}, {1, 2}, {2, 3}, {5, 5}}, 5.0);
  }

  const std::vector<Point>& control_points() const { return points_; }
  std::optional<double> log_tail_from() const { return tail_from_; }

  double operator()(double x) const {
    if (x < 0) throw DomainError("growth function evaluated at a negative point");
    if (tail_from_ && x >= *tail_from_) return std::log(x) + tail_base_ - std::log(*tail_from_);
    return linear(x);
  }

  // Slope of F on [x, x + ε).
  double right_slope(double x) const {
    if (tail_from_ && x >= *tail_from_) return 1.0 / x;
    return slope(segment(x));
  }

  // The unique x with F(x) = y (0 for y ≤ 0).
  double inverse(double y) const {
    if (y <= 0) return 0.0;
    if (tail_from_ && y >= tail_base_) return *tail_from_ * std::exp(y - tail_base_);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      if (y <= points_[i + 1].second) return points_[i].first + (y - points_[i].second) / slope(i);
    }
    const std::size_t last = points_.size() - 2;
    return points_[last].first + (y - points_[last].second) / slope(last);
  }

  // Right slope non-increasing everywhere, which with F(0) = 0 gives
  // subadditivity.
  bool concave() const {
    double previous = slope(0);
    for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
      if (tail_from_ && points_[i].first >= *tail_from_) break;
      if (slope(i) > previous) return false;
      previous = slope(i);
    }
    if (tail_from_) {
      const double before = slope(segment(std::nextafter(*tail_from_, 0.0)));
      if (1.0 / *tail_from_ > before) return false;
    }
    return true;
  }

  Json to_json() const {
    Json pts = Json::array();
    for (const auto& [x, y] : points_) pts.push_back({x, y});
    Json out{{"control_points", std::move(pts)}};
    out["log_tail_from"] = tail_from_ ? Json(*tail_from_) : Json(nullptr);
    return out;
  }

  static GrowthFunction from_json(const Json& j, const std::string& where = "") {
    const Json& pts = detail::field(j, "control_points", where);
    if (!pts.is_array()) detail::schema_error(where + "/control_points", "expected an array");
    std::vector<Point> points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Json& p = pts[i];
      const std::string at = where + "/control_points/" + std::to_string(i);
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        detail::schema_error(at, "expected [x, y]");
      }
      points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    std::optional<double> tail;
    if (auto it = j.find("log_tail_from"); it != j.end() && !it->is_null()) {
      if (!it->is_number()) detail::schema_error(where + "/log_tail_from", "expected a number");
      tail = it->get<double>();
    }
    try {
      return GrowthFunction(std::move(points), tail);
    } catch (const DomainError& e) {
      detail::schema_error(where, e.what());
    }
  }

 private:
  std::size_t segment(double x) const {
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      if (x < points_[i + 1].first) return i;
    }
    return points_.size() - 2;
  }
  double slope(std::size_t i) const {
    return (points_[i + 1].second - points_[i].second) / (points_[i + 1].first - points_[i].first);
  }
  double linear(double x) const {
    const std::size_t i = segment(x);
    return points_[i].second + slope(i) * (x - points_[i].first);
  }

  std::vector<Point> points_;
  std::optional<double> tail_from_;
  double tail_base_ = 0.0;
};

struct GrowthSample {
  double x = 0;
  double value = 0;
  double slope = 0;   // right slope at x
  double bound = 0;   // 1/x
  bool flagged = false;  // slope > 1/x
};

struct GrowthReport {
  std::vector<GrowthSample> samples;
  bool monotone = true;
  bool slope_nonincreasing = true;
  std::size_t flagged_count = 0;
};

// Samples x = grid, 2·grid, … up to max_x (default: twice the last breakpoint).
inline GrowthReport growth_check(const GrowthFunction& f, double grid, double max_x = 0.0) {
  if (!(grid > 0)) throw DomainError("grid spacing must be positive");
  if (max_x <= 0) {
    max_x = f.control_points().back().first;
    if (f.log_tail_from()) max_x = std::max(max_x, *f.log_tail_from());
    max_x *= 2;
  }
  GrowthReport r;
  double previous_value = f(0.0);
  double previous_slope = f.right_slope(0.0);
  constexpr double kTolerance = 1e-12;
  for (std::size_t i = 1;; ++i) {
    const double x = grid * static_cast<double>(i);
    if (x > max_x + kTolerance) break;
    GrowthSample s{x, f(x), f.right_slope(x), 1.0 / x, false};
    s.flagged = s.slope > s.bound + kTolerance;
    if (s.flagged) ++r.flagged_count;
    if (!(s.value > previous_value)) r.monotone = false;
    if (s.slope > previous_slope + kTolerance) r.slope_nonincreasing = false;
    previous_value = s.value;
    previous_slope = s.slope;
    r.samples.push_back(s);
  }
  return r;
}

}  // namespace hrush
