#include "tdmp/geokin.hpp"

#include <algorithm>
#include <cmath>

namespace tdmp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double ray_angle(Point2 apex, Point2 a, Point2 b) {
  const Point2 u = a - apex;
  const Point2 v = b - apex;
  const double nu = std::hypot(u.x, u.y);
  const double nv = std::hypot(v.x, v.y);
  if (nu == 0.0 || nv == 0.0) {
    throw GeometryError(GeoErrc::DegenerateGeometry, "target_angle: zero-length ray");
  }
  return safe_acos((u.x * v.x + u.y * v.y) / (nu * nv));
}

}  // namespace

bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

bool WeightFactors::is_valid() const {
  return p >= 0.0 && q1 >= 0.0 && q2 >= 0.0 && std::abs(p + q1 + q2 - 1.0) <= kSumTolerance;
}

void WeightFactors::validate() const {
  if (!is_valid()) {
    throw GeometryError(GeoErrc::InvalidFactors,
                        "weight factors must be non-negative with p + q1 + q2 = 1");
  }
}

WeightFactors WeightFactors::normalized(double p, double q1, double q2) {
  const double sum = p + q1 + q2;
  if (p < 0.0 || q1 < 0.0 || q2 < 0.0 || !(sum > 0.0)) {
    throw GeometryError(GeoErrc::InvalidFactors, "weight factors must be non-negative, not all zero");
  }
  return {p / sum, q1 / sum, q2 / sum};
}

double normalize_heading(double radians) {
  double h = std::fmod(radians, kTwoPi);
  if (h < 0.0) h += kTwoPi;
  if (h >= kTwoPi) h = 0.0;
  return h;
}

double safe_acos(double cosine) { return std::acos(std::clamp(cosine, -1.0, 1.0)); }

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double direction_angle(double velocity_heading, double speed, Point2 from, Point2 to) {
  if (speed <= 0.0) {
    throw GeometryError(GeoErrc::ZeroVelocity, "direction_angle: vehicle is stationary");
  }
  const Point2 seg = to - from;
  const double len = std::hypot(seg.x, seg.y);
  if (len == 0.0) {
    throw GeometryError(GeoErrc::CoincidentPoints, "direction_angle: from == to");
  }
  // |v| cancels in the normalised dot product.
  const double c = (std::cos(velocity_heading) * seg.x + std::sin(velocity_heading) * seg.y) / len;
  return safe_acos(c);
}

Point2 predict_position(const Kinematics& k, double t) {
  const double travel = std::max(0.0, k.speed * t + 0.5 * k.acceleration * t * t);
  if (travel == 0.0) return k.position;
  return {k.position.x + travel * std::cos(k.heading), k.position.y + travel * std::sin(k.heading)};
}

Kinematics predict_kinematics(const Kinematics& k, double t) {
  Kinematics out = k;
  out.position = predict_position(k, t);
  out.speed = std::max(0.0, k.speed + k.acceleration * t);
  return out;
}

double predicted_distance(const Kinematics& k1, const Kinematics& k2, double t) {
  return distance(predict_position(k1, t), predict_position(k2, t));
}

double target_angle(Point2 predicted_neighbor, Point2 neighbor_target, Point2 destination_target) {
  return ray_angle(predicted_neighbor, neighbor_target, destination_target);
}

double neighbor_weight(const WeightFactors& factors, double pred_dist_source_dest,
                       double pred_dist_neighbor_dest, double neighbor_velocity_cos,
                       double target_cos) {
  if (pred_dist_source_dest == 0.0) {
    throw GeometryError(GeoErrc::ZeroSourceDistance,
                        "neighbor_weight: source already at destination");
  }
  const double progress = (pred_dist_source_dest - pred_dist_neighbor_dest) / pred_dist_source_dest;
  return factors.p * progress + factors.q1 * neighbor_velocity_cos + factors.q2 * target_cos;
}

double velocity_cosine(const Kinematics& predicted_neighbor, Point2 destination) {
  if (predicted_neighbor.speed <= 0.0 || predicted_neighbor.position == destination) return 0.0;
  return std::cos(direction_angle(predicted_neighbor.heading, predicted_neighbor.speed,
                                  predicted_neighbor.position, destination));
}

double target_cosine(Point2 predicted_neighbor, Point2 neighbor_target, Point2 destination_target) {
  if (predicted_neighbor == neighbor_target || predicted_neighbor == destination_target) return 0.0;
  return std::cos(target_angle(predicted_neighbor, neighbor_target, destination_target));
}

}  // namespace tdmp
