#include "boolperc/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include "boolperc/random.hpp"
#include "boolperc/tolerances.hpp"

namespace boolperc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// acosh(1 + v) without forming 1 + v.
double acosh1p(double v) { return std::log1p(v + std::sqrt(v * (v + 2.0))); }

// Volume of the geodesic disk in H2: 2 pi (cosh r - 1) = 4 pi sinh^2(r / 2).
double hyperbolic_disk_area(double r) {
  const double s = std::sinh(0.5 * r);
  return 4.0 * std::numbers::pi * s * s;
}

double euclidean_unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

// Uniform radius in a hyperbolic disk of radius R: cosh r - 1 = U (cosh R - 1).
double sample_hyperbolic_radius(double radius, RandomStream& rng) {
  const double s = std::sinh(0.5 * radius);
  return acosh1p(rng.uniform() * 2.0 * s * s);
}

Eigen::Vector3d hyperbolic_part(const Point& p) { return p.head<3>(); }

// Net of the hyperbolic disk S(o, radius) with covering radius `mesh`.
std::vector<Eigen::Vector3d> hyperbolic_disk_net(double radius, double mesh) {
  std::vector<Eigen::Vector3d> net;
  net.push_back(hyperboloid_polar(0.0, 0.0));
  const int rings = static_cast<int>(std::ceil(radius / mesh));
  for (int k = 1; k <= rings; ++k) {
    const double r = k * mesh;
    const int count = std::max(1, static_cast<int>(std::ceil(kTwoPi * std::sinh(r) / mesh)));
    for (int j = 0; j < count; ++j) net.push_back(hyperboloid_polar(r, kTwoPi * j / count));
  }
  return net;
}

}  // namespace

Space::Space(SpaceKind kind, int dim, double ball_radius) : kind_(kind), dim_(dim), ball_radius_(ball_radius) {
  require_positive(ball_radius, "ball_radius");
}

Space Space::euclidean(int dim, double ball_radius) {
  if (dim < 2 || dim > kMaxCoords)
    throw InvalidArgument("euclidean dimension must be in [2, " + std::to_string(kMaxCoords) + "]");
  return Space(SpaceKind::Euclidean, dim, ball_radius);
}

Space Space::hyperbolic_plane(double ball_radius) { return Space(SpaceKind::Hyperbolic2, 2, ball_radius); }

Space Space::hyperbolic_plane_times_line(double ball_radius) { return Space(SpaceKind::H2xR, 3, ball_radius); }

Space Space::with_ball_radius(double radius) const { return Space(kind_, dim_, radius); }

Point Space::origin() const {
  Point p = Point::Zero(coordinate_count());
  if (is_hyperbolic()) p(2) = 1.0;
  return p;
}

std::string Space::name() const {
  switch (kind_) {
    case SpaceKind::Euclidean:
      return "euclidean" + std::to_string(dim_);
    case SpaceKind::Hyperbolic2:
      return "hyperbolic2";
    case SpaceKind::H2xR:
      return "h2xr";
  }
  return "unknown";
}

double ball_volume(const Space& space, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("ball_volume: radius must be >= 0");
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return euclidean_unit_ball_volume(space.dim()) * std::pow(radius, space.dim());
    case SpaceKind::Hyperbolic2:
      return hyperbolic_disk_area(radius);
    case SpaceKind::H2xR:
      break;
  }
  throw UnsupportedOperation("ball_volume: no closed form on h2xr; use window_volume with a cylinder window");
}

void validate_point(const Space& space, const Point& p) {
  if (p.size() != space.coordinate_count())
    throw InvalidArgument("point has " + std::to_string(p.size()) + " coordinates, space " + space.name() +
                          " expects " + std::to_string(space.coordinate_count()));
  if (!p.allFinite()) throw InvalidArgument("point has non-finite coordinates");
  if (space.is_hyperbolic()) {
    const double t = p(2);
    if (t < 1.0 - tolerance::kModel) throw InvalidArgument("hyperboloid point must have t >= 1");
    // Compare relative to t^2 so far-out points are not rejected for rounding.
    const double residual = p(0) * p(0) + p(1) * p(1) - t * t + 1.0;
    if (std::fabs(residual) > tolerance::kModel * std::max(1.0, t * t))
      throw InvalidArgument("point is off the hyperboloid x^2 + y^2 - t^2 = -1");
  }
}

bool is_valid_point(const Space& space, const Point& p) {
  try {
    validate_point(space, p);
    return true;
  } catch (const InvalidArgument&) {
    return false;
  }
}

Point normalized(const Space& space, Point p) {
  if (space.is_hyperbolic()) p(2) = std::sqrt(1.0 + p(0) * p(0) + p(1) * p(1));
  return p;
}

void validate_window(const Space& space, const Window& window) {
  if (const auto* ball = std::get_if<BallWindow>(&window)) {
    if (space.kind() == SpaceKind::H2xR)
      throw UnsupportedOperation("ball windows are not supported on h2xr; use a cylinder window");
    require_positive(ball->radius, "window radius");
    validate_point(space, ball->center);
    return;
  }
  const auto& cylinder = std::get<CylinderWindow>(window);
  if (space.kind() != SpaceKind::H2xR) throw InvalidArgument("cylinder windows are only valid on h2xr");
  require_positive(cylinder.h2_radius, "cylinder h2_radius");
  require_positive(cylinder.height_half, "cylinder height_half");
}

double window_volume(const Space& space, const Window& window) {
  validate_window(space, window);
  if (const auto* ball = std::get_if<BallWindow>(&window)) return ball_volume(space, ball->radius);
  const auto& cylinder = std::get<CylinderWindow>(window);
  return hyperbolic_disk_area(cylinder.h2_radius) * 2.0 * cylinder.height_half;
}

Point window_center(const Space& space, const Window& window) {
  if (const auto* ball = std::get_if<BallWindow>(&window)) return ball->center;
  return space.origin();
}

double distance_to_window(const Space& space, const Window& window, const Point& p) {
  if (const auto* ball = std::get_if<BallWindow>(&window))
    return std::max(0.0, distance(space, ball->center, p) - ball->radius);
  const auto& cylinder = std::get<CylinderWindow>(window);
  const Point o = space.origin();
  const double radial =
      std::max(0.0, detail::hyperboloid_distance(o.head<3>(), p.head<3>()) - cylinder.h2_radius);
  const double vertical = std::max(0.0, std::fabs(p(3)) - cylinder.height_half);
  return std::hypot(radial, vertical);
}

bool window_contains(const Space& space, const Window& window, const Point& p) {
  const double scale = std::visit(
      [](const auto& w) {
        if constexpr (std::is_same_v<std::decay_t<decltype(w)>, BallWindow>)
          return w.radius;
        else
          return std::max(w.h2_radius, w.height_half);
      },
      window);
  return distance_to_window(space, window, p) <= tolerance::kModel * std::max(1.0, scale);
}

Eigen::Matrix3d hyperboloid_translation(const Eigen::Vector3d& target) {
  const Eigen::Vector2d s = target.head<2>();
  const double t = target(2);
  Eigen::Matrix3d boost;
  boost.topLeftCorner<2, 2>() = Eigen::Matrix2d::Identity() + s * s.transpose() / (1.0 + t);
  boost.topRightCorner<2, 1>() = s;
  boost.bottomLeftCorner<1, 2>() = s.transpose();
  boost(2, 2) = t;
  return boost;
}

Eigen::Vector3d hyperboloid_polar(double r, double theta) {
  const double sr = std::sinh(r);
  return {sr * std::cos(theta), sr * std::sin(theta), std::cosh(r)};
}

Point point_along_axis(const Space& space, double d) {
  Point p = space.origin();
  if (space.kind() == SpaceKind::Euclidean) {
    p(0) = d;
  } else {
    p.head<3>() = hyperboloid_polar(d, 0.0);
  }
  return p;
}

Point midpoint(const Space& space, const Point& p, const Point& q) {
  if (space.kind() == SpaceKind::Euclidean) return (0.5 * (p + q)).eval();
  Point m = p;
  const Eigen::Vector3d sum = p.head<3>() + q.head<3>();
  const double norm = std::sqrt(sum(2) * sum(2) - sum(0) * sum(0) - sum(1) * sum(1));
  m.head<3>() = sum / norm;
  if (space.kind() == SpaceKind::H2xR) m(3) = 0.5 * (p(3) + q(3));
  return normalized(space, m);
}

Point sample_uniform_in_window(const Space& space, const Window& window, RandomStream& rng) {
  validate_window(space, window);
  if (const auto* cylinder = std::get_if<CylinderWindow>(&window)) {
    Point p = space.origin();
    p.head<3>() = hyperboloid_polar(sample_hyperbolic_radius(cylinder->h2_radius, rng), kTwoPi * rng.uniform());
    p(3) = rng.uniform(-cylinder->height_half, cylinder->height_half);
    return normalized(space, p);
  }

  const auto& ball = std::get<BallWindow>(window);
  if (space.kind() == SpaceKind::Euclidean) {
    const int n = space.dim();
    Point direction(n);
    double norm = 0.0;
    do {
      for (int i = 0; i < n; ++i) direction(i) = rng.normal();
      norm = direction.norm();
    } while (norm == 0.0);
    const double r = ball.radius * std::pow(rng.uniform(), 1.0 / n);
    return (ball.center + (r / norm) * direction).eval();
  }

  const Eigen::Vector3d local = hyperboloid_polar(sample_hyperbolic_radius(ball.radius, rng), kTwoPi * rng.uniform());
  Point p(3);
  p = hyperboloid_translation(hyperbolic_part(ball.center)) * local;
  return normalized(space, p);
}

Point transport_from_origin(const Space& space, const Point& target, const Point& local) {
  if (space.kind() == SpaceKind::Euclidean) return (target + local).eval();
  Point p = local;
  p.head<3>() = hyperboloid_translation(hyperbolic_part(target)) * local.head<3>();
  if (space.kind() == SpaceKind::H2xR) p(3) = target(3) + local(3);
  return normalized(space, p);
}

std::vector<Point> covering_net(const Space& space, const Point& center, double radius, double mesh) {
  require_positive(mesh, "covering mesh");
  if (!(radius >= 0.0)) throw InvalidArgument("covering_net: radius must be >= 0");
  validate_point(space, center);
  const double reach = radius + mesh;
  const Point origin = space.origin();
  std::vector<Point> local;

  if (space.kind() == SpaceKind::Euclidean) {
    // Cubic lattice with spacing h has covering radius h sqrt(n) / 2.
    const int n = space.dim();
    const double h = 2.0 * mesh / std::sqrt(static_cast<double>(n));
    const int k = static_cast<int>(std::ceil(reach / h));
    std::vector<int> index(n, -k);
    Point offset(n);
    for (;;) {
      for (int i = 0; i < n; ++i) offset(i) = index[i] * h;
      if (offset.norm() <= reach) local.push_back(offset);
      int axis = 0;
      while (axis < n && ++index[axis] > k) index[axis++] = -k;
      if (axis == n) break;
    }
  } else if (space.kind() == SpaceKind::Hyperbolic2) {
    for (const auto& p : hyperbolic_disk_net(reach, mesh)) {
      Point q(3);
      q = p;
      local.push_back(q);
    }
  } else {
    // Product net: height spacing a and disk mesh b with (a/2)^2 + b^2 = mesh^2.
    const double b = mesh / std::numbers::sqrt2;
    const double a = 2.0 * b;
    const int k = static_cast<int>(std::ceil(reach / a));
    const auto disk = hyperbolic_disk_net(reach, b);
    for (int j = -k; j <= k; ++j) {
      for (const auto& p : disk) {
        Point q(4);
        q.head<3>() = p;
        q(3) = j * a;
        if (distance(space, origin, q) <= reach) local.push_back(q);
      }
    }
  }

  // Outermost first: these are the points most likely to be uncovered.
  std::vector<double> dist(local.size());
  for (std::size_t i = 0; i < local.size(); ++i) dist[i] = distance(space, origin, local[i]);
  std::vector<std::size_t> order(local.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
  std::vector<Point> net;
  net.reserve(local.size());
  for (auto i : order)
    if (dist[i] <= reach) net.push_back(transport_from_origin(space, center, local[i]));
  return net;
}

}  // namespace boolperc
