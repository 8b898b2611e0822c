#include "gmpc/liegroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gmpc {

namespace {

constexpr double kSmallAngle = 1e-6;
constexpr double kOrthoTol = 1e-10;
constexpr double kBranchTol = 1e-12;

// V(w) = (1/w) [[sin w, -(1 - cos w)], [1 - cos w, sin w]]
Mat2 left_jacobian_so2(double w)
{
  double a, b;  // sin(w)/w, (1 - cos(w))/w
  if (std::abs(w) < kSmallAngle) {
    const double w2 = w * w;
    a = 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
    b = w / 2.0 - w * w2 / 24.0 + w * w2 * w2 / 720.0;
  } else {
    a = std::sin(w) / w;
    const double s = std::sin(0.5 * w);
    b = 2.0 * s * s / w;  // 1 - cos(w) without cancellation
  }
  Mat2 v;
  v << a, -b, b, a;
  return v;
}

// V(w)^-1 = [[h, w/2], [-w/2, h]] with h = (w/2) cot(w/2)
Mat2 left_jacobian_so2_inv(double w)
{
  double h;
  if (std::abs(w) < kSmallAngle) {
    const double w2 = w * w;
    h = 1.0 - w2 / 12.0 - w2 * w2 / 720.0;
  } else {
    h = 0.5 * w / std::tan(0.5 * w);
  }
  Mat2 v;
  v << h, 0.5 * w, -0.5 * w, h;
  return v;
}

}  // namespace

double wrap_angle(double angle)
{
  double r = std::remainder(angle, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) { r += 2.0 * std::numbers::pi; }
  return r;
}

Rotation Rotation::from_angle(double theta)
{
  if (!std::isfinite(theta)) { throw std::invalid_argument("rotation angle must be finite"); }
  return Rotation(wrap_angle(theta));
}

Rotation Rotation::from_matrix(const Mat2 & m)
{
  if (!m.allFinite()) { throw std::invalid_argument("rotation matrix must be finite"); }
  if (((m.transpose() * m) - Mat2::Identity()).cwiseAbs().maxCoeff() > kOrthoTol
      || std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) - 1.0) > kOrthoTol) {
    throw std::invalid_argument("matrix is not in SO(2)");
  }
  return Rotation(std::atan2(m(1, 0), m(0, 0)));
}

Mat2 Rotation::matrix() const
{
  const double c = std::cos(angle_), s = std::sin(angle_);
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

Rotation Rotation::inverse() const { return Rotation(wrap_angle(-angle_)); }

Rotation Rotation::operator*(const Rotation & other) const
{
  return Rotation(wrap_angle(angle_ + other.angle_));
}

Vec2 Rotation::operator*(const Vec2 & v) const
{
  const double c = std::cos(angle_), s = std::sin(angle_);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

bool Twist::is_finite() const { return std::isfinite(vx) && std::isfinite(vy) && std::isfinite(w); }

Pose Pose::from_matrix(const Mat3 & m)
{
  if (m(2, 0) != 0.0 || m(2, 1) != 0.0 || m(2, 2) != 1.0) {
    throw std::invalid_argument("homogeneous matrix must have bottom row (0, 0, 1)");
  }
  return Pose(Rotation::from_matrix(m.topLeftCorner<2, 2>()), m.topRightCorner<2, 1>());
}

Mat3 Pose::matrix() const
{
  Mat3 m = Mat3::Identity();
  m.topLeftCorner<2, 2>() = rot_.matrix();
  m.topRightCorner<2, 1>() = trans_;
  return m;
}

Pose Pose::inverse() const
{
  const Rotation rinv = rot_.inverse();
  return Pose(rinv, -(rinv * trans_));
}

Pose Pose::operator*(const Pose & other) const
{
  return Pose(rot_ * other.rot_, rot_ * other.trans_ + trans_);
}

AlgebraMatrix::AlgebraMatrix(const Mat3 & m, double tol) : m_(m)
{
  const double skew_err = std::max({std::abs(m(0, 0)), std::abs(m(1, 1)), std::abs(m(0, 1) + m(1, 0))});
  const double row_err = m.row(2).cwiseAbs().maxCoeff();
  if (!m.allFinite() || skew_err > tol || row_err > tol) {
    throw std::invalid_argument(
      "matrix is not in se(2) (skew error " + std::to_string(skew_err) + ", bottom row "
      + std::to_string(row_err) + ")");
  }
}

Mat3 hat(const Twist & z)
{
  Mat3 m;
  m << 0.0, -z.w, z.vx, z.w, 0.0, z.vy, 0.0, 0.0, 0.0;
  return m;
}

AlgebraMatrix wedge(const Twist & z) { return AlgebraMatrix(hat(z)); }

Twist vee(const AlgebraMatrix & m) { return {m.matrix()(0, 2), m.matrix()(1, 2), m.matrix()(1, 0)}; }

Twist vee(const Mat3 & m) { return vee(AlgebraMatrix(m)); }

Pose exp(const Twist & z)
{
  return Pose(Rotation::from_angle(z.w), left_jacobian_so2(z.w) * Vec2(z.vx, z.vy));
}

LogResult log_checked(const Pose & x)
{
  const double theta = x.rotation().angle();
  const Vec2 rho = left_jacobian_so2_inv(theta) * x.translation();
  return {{rho.x(), rho.y(), theta}, std::numbers::pi - std::abs(theta) <= kBranchTol};
}

Twist log(const Pose & x) { return log_checked(x).value; }

Pose compose(const Pose & a, const Pose & b) { return a * b; }

Pose inverse(const Pose & x) { return x.inverse(); }

Mat3 adm(const Twist & z)
{
  Mat3 m;
  m << 0.0, z.w, -z.vy, -z.w, 0.0, z.vx, 0.0, 0.0, 0.0;
  return m;
}

}  // namespace gmpc
