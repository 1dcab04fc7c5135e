#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cdmgen/cdm.hpp"
#include "cdmgen/numerics.hpp"

namespace cdmgen::cdm {

namespace {

// Any unit vector orthogonal to `u`.
Vec3 perpendicular(const Vec3& u) {
  const Vec3 axis = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return u.cross(axis).normalized();
}

}  // namespace

CollisionProbability collision_probability_2d(const Vec3& relative_position, const Vec3& relative_velocity,
                                              const Mat6& combined_covariance, double hard_body_radius) {
  if (!(hard_body_radius >= 0.0)) throw std::invalid_argument("hard body radius must be non-negative");
  const double speed = relative_velocity.norm();
  if (!(speed > 0.0)) throw std::invalid_argument("relative velocity must be nonzero");

  CollisionProbability out;
  if (hard_body_radius == 0.0) return out;

  const Vec3 u = relative_velocity / speed;
  const Vec3 in_plane = relative_position - relative_position.dot(u) * u;
  const Vec3 e1 = in_plane.norm() > 1e-12 * std::max(1.0, relative_position.norm()) ? in_plane.normalized()
                                                                                      : perpendicular(u);
  const Vec3 e2 = u.cross(e1);

  Eigen::Matrix<double, 2, 3> proj;
  proj.row(0) = e1.transpose();
  proj.row(1) = e2.transpose();
  Eigen::Matrix2d cov = proj * combined_covariance.topLeftCorner<3, 3>() * proj.transpose();
  cov = 0.5 * (cov + cov.transpose());
  const Eigen::Vector2d miss = proj * relative_position;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > kCovarianceFloor)) {
    cov += kCovarianceFloor * Eigen::Matrix2d::Identity();
    eig.compute(cov);
    out.regularized = true;
  }
  const Eigen::Vector2d sigma = eig.eigenvalues().cwiseMax(kCovarianceFloor).cwiseSqrt();
  const Eigen::Vector2d centre = eig.eigenvectors().transpose() * miss;

  // x = R sin(theta) keeps the integrand smooth at the disc edges. The range is cut to
  // +-10 sigma around the centre and split at it, so narrow densities are not stepped over.
  const double r = hard_body_radius;
  auto integrand = [&](double theta) {
    const double x = r * std::sin(theta);
    const double half_chord = r * std::cos(theta);
    const double density = numerics::normal_pdf((x - centre[0]) / sigma[0]) / sigma[0];
    const double strip = numerics::normal_interval_mass((-half_chord - centre[1]) / sigma[1],
                                                        (half_chord - centre[1]) / sigma[1]);
    return density * strip * half_chord;
  };
  auto angle_of = [r](double x) { return std::asin(std::clamp(x / r, -1.0, 1.0)); };
  const double lo = angle_of(centre[0] - 10.0 * sigma[0]);
  const double hi = angle_of(centre[0] + 10.0 * sigma[0]);
  const double mid = angle_of(centre[0]);
  double p = 0.0;
  if (mid > lo) p += numerics::integrate(integrand, lo, mid, 1e-10);
  if (hi > mid) p += numerics::integrate(integrand, mid, hi, 1e-10);
  out.probability = std::clamp(p, 0.0, 1.0);
  return out;
}

}  // namespace cdmgen::cdm
