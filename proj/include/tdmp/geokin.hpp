#pragma once

// Planar geometry and short-horizon kinematic prediction used by the
// forwarding logic. Everything here is pure and re-entrant.

#include <numbers>
#include <stdexcept>
#include <string>

namespace tdmp {

struct Point2 {
  double x = 0.0;  // meters
  double y = 0.0;  // meters

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

bool is_finite(Point2 p);

/// Instantaneous motion state of one vehicle.
struct Kinematics {
  Point2 position;
  double speed = 0.0;         // m/s, >= 0
  double acceleration = 0.0;  // m/s^2
  double heading = 0.0;       // rad in [0, 2pi), measured from +x

  friend bool operator==(const Kinematics&, const Kinematics&) = default;
};

/// Weighting of the distance, direction and target terms of the neighbour
/// score. A usable triple is non-negative and sums to one.
struct WeightFactors {
  double p = 1.0 / 3.0;
  double q1 = 1.0 / 3.0;
  double q2 = 1.0 / 3.0;

  static constexpr double kSumTolerance = 1e-9;

  bool is_valid() const;
  /// Throws GeometryError(InvalidFactors) unless is_valid().
  void validate() const;
  /// Scales a non-negative triple with positive sum so it sums to one.
  static WeightFactors normalized(double p, double q1, double q2);

  friend bool operator==(const WeightFactors&, const WeightFactors&) = default;
};

enum class GeoErrc {
  ZeroVelocity,
  CoincidentPoints,
  DegenerateGeometry,
  ZeroSourceDistance,
  InvalidFactors,
};

class GeometryError : public std::domain_error {
 public:
  GeometryError(GeoErrc code, const std::string& what)
      : std::domain_error(what), code_(code) {}
  GeoErrc code() const noexcept { return code_; }

 private:
  GeoErrc code_;
};

/// Wraps any finite angle into [0, 2pi).
double normalize_heading(double radians);

/// Clamps to [-1, 1] before acos so rounding never produces NaN.
double safe_acos(double cosine);

double distance(Point2 a, Point2 b);

/// Angle in [0, pi] between the velocity vector (heading, speed) and the ray
/// from -> to.
double direction_angle(double velocity_heading, double speed, Point2 from, Point2 to);

/// Constant-acceleration extrapolation along the heading over horizon t.
/// A decelerating vehicle stops; it never reverses.
Point2 predict_position(const Kinematics& k, double t);

/// Kinematics extrapolated over horizon t: predicted position, speed
/// advanced by the acceleration (floored at zero), same heading.
Kinematics predict_kinematics(const Kinematics& k, double t);

double predicted_distance(const Kinematics& k1, const Kinematics& k2, double t);

/// Angle at `predicted_neighbor` between the rays towards the neighbour's own
/// target and towards the destination's target.
double target_angle(Point2 predicted_neighbor, Point2 neighbor_target, Point2 destination_target);

/// Linear score combining relative progress and the two cosines.
double neighbor_weight(const WeightFactors& factors, double pred_dist_source_dest,
                       double pred_dist_neighbor_dest, double neighbor_velocity_cos,
                       double target_cos);

// Cosine terms with the degenerate cases mapped to 0 (no evidence either way):
// a stationary neighbour, or a neighbour predicted exactly on the point.
double velocity_cosine(const Kinematics& predicted_neighbor, Point2 destination);
double target_cosine(Point2 predicted_neighbor, Point2 neighbor_target, Point2 destination_target);

}  // namespace tdmp
