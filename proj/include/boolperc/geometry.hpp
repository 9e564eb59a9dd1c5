#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "boolperc/errors.hpp"

namespace boolperc {

class RandomStream;

/// Upper bound on stored coordinates per point. Caps EuclideanN at n = 8 and
/// keeps every Point on the stack.
inline constexpr int kMaxCoords = 8;

template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxCoords, 1>;
using Point = PointT<double>;

/// One point per column.
using PointMatrix = Eigen::MatrixXd;

enum class SpaceKind { Euclidean, Hyperbolic2, H2xR };

/// A homogeneous space together with the grain radius of the Boolean model.
///
/// Model coordinates:
///   - Euclidean(n): Cartesian, n coordinates.
///   - Hyperbolic2: hyperboloid (x, y, t), x^2 + y^2 - t^2 = -1, t >= 1.
///   - H2xR: hyperboloid triple followed by the height.
///
/// The origin is the zero vector in R^n and (0, 0, 1[, 0]) otherwise.
class Space {
 public:
  static Space euclidean(int dim, double ball_radius = 1.0);
  static Space hyperbolic_plane(double ball_radius = 1.0);
  static Space hyperbolic_plane_times_line(double ball_radius = 1.0);

  SpaceKind kind() const noexcept { return kind_; }
  /// Manifold dimension.
  int dim() const noexcept { return dim_; }
  int coordinate_count() const noexcept { return kind_ == SpaceKind::Euclidean ? dim_ : dim_ + 1; }
  double ball_radius() const noexcept { return ball_radius_; }
  bool is_hyperbolic() const noexcept { return kind_ != SpaceKind::Euclidean; }

  Space with_ball_radius(double radius) const;
  Point origin() const;
  /// "euclidean<n>", "hyperbolic2" or "h2xr".
  std::string name() const;

  bool operator==(const Space&) const = default;

 private:
  Space(SpaceKind kind, int dim, double ball_radius);

  SpaceKind kind_;
  int dim_;
  double ball_radius_;
};

/// Geodesic ball S(center, radius). Not available on H2xR.
struct BallWindow {
  Point center;
  double radius;
};

/// {(u, h) in H2 x R : d(o, u) <= h2_radius, |h| <= height_half}, centred at
/// the origin. Only valid on H2xR.
struct CylinderWindow {
  double h2_radius;
  double height_half;
};

using Window = std::variant<BallWindow, CylinderWindow>;

namespace detail {

// d = acosh(1 + u) with u = -<p, q> - 1 = |p - q|^2_Minkowski / 2, written via
// log1p so that nearby points keep full relative precision.
template <typename A, typename B>
typename A::Scalar hyperboloid_distance(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  using Scalar = typename A::Scalar;
  using std::log1p;
  using std::sqrt;
  const Scalar dx = p(0) - q(0);
  const Scalar dy = p(1) - q(1);
  const Scalar dt = p(2) - q(2);
  const Scalar u = Scalar(0.5) * (dx * dx + dy * dy - dt * dt);
  if (!(u > Scalar(0))) return Scalar(0);
  return log1p(u + sqrt(u * (u + Scalar(2))));
}

/// No size checks; for inner loops over already-validated points.
template <typename A, typename B>
typename A::Scalar distance_unchecked(SpaceKind kind, const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  using std::hypot;
  switch (kind) {
    case SpaceKind::Euclidean:
      return (p - q).norm();
    case SpaceKind::Hyperbolic2:
      return hyperboloid_distance(p.template head<3>(), q.template head<3>());
    case SpaceKind::H2xR:
      return hypot(hyperboloid_distance(p.template head<3>(), q.template head<3>()), p(3) - q(3));
  }
  return typename A::Scalar(0);
}

}  // namespace detail

/// Geodesic distance d_M(p, q). Throws InvalidArgument when either point has
/// the wrong number of coordinates for `space`.
template <typename A, typename B>
typename A::Scalar distance(const Space& space, const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  if (p.size() != space.coordinate_count() || q.size() != space.coordinate_count())
    throw InvalidArgument("distance: point has " + std::to_string(p.size()) + "/" + std::to_string(q.size()) +
                          " coordinates, space " + space.name() + " expects " +
                          std::to_string(space.coordinate_count()));
  return detail::distance_unchecked(space.kind(), p, q);
}

/// Volume of a geodesic ball. Euclidean and Hyperbolic2 only; H2xR throws
/// UnsupportedOperation (use window_volume with a CylinderWindow).
double ball_volume(const Space& space, double radius);
double window_volume(const Space& space, const Window& window);

/// Throws InvalidArgument / UnsupportedOperation for windows that do not
/// belong to `space`.
void validate_window(const Space& space, const Window& window);

/// Throws InvalidArgument if `p` has the wrong size or is off the hyperboloid.
void validate_point(const Space& space, const Point& p);
bool is_valid_point(const Space& space, const Point& p);

/// Re-projects the hyperbolic part onto the hyperboloid (t = sqrt(1 + x^2 + y^2)).
Point normalized(const Space& space, Point p);

Point window_center(const Space& space, const Window& window);
bool window_contains(const Space& space, const Window& window, const Point& p);
/// Distance from p to the (closed) window region; 0 inside.
double distance_to_window(const Space& space, const Window& window, const Point& p);

/// Uniform sample w.r.t. the volume measure restricted to `window`.
Point sample_uniform_in_window(const Space& space, const Window& window, RandomStream& rng);

/// Lorentz boost of the hyperboloid mapping (0, 0, 1) to `target`.
Eigen::Matrix3d hyperboloid_translation(const Eigen::Vector3d& target);

/// Point on the hyperboloid at geodesic polar coordinates (r, theta) around
/// the origin.
Eigen::Vector3d hyperboloid_polar(double r, double theta);

/// Point at geodesic distance `d` from the origin along the first axis (the
/// hyperbolic factor on H2xR).
Point point_along_axis(const Space& space, double d);

/// Image of `local` under an isometry that maps the origin to `target`
/// (translation in R^n, a Lorentz boost on the hyperbolic factor otherwise).
Point transport_from_origin(const Space& space, const Point& target, const Point& local);

/// Geodesic midpoint of p and q.
Point midpoint(const Space& space, const Point& p, const Point& q);

/// Deterministic net of S(center, radius): every point of the ball is within
/// `mesh` of some returned point. Returned outermost first.
std::vector<Point> covering_net(const Space& space, const Point& center, double radius, double mesh);

}  // namespace boolperc
