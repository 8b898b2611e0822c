#pragma once

#include <Eigen/Core>

namespace gmpc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Wrap an angle into the principal interval (-pi, pi].
double wrap_angle(double angle);

/**
 * @brief Planar rotation, element of SO(2).
 *
 * Stored as its principal angle; the matrix form is computed on demand so the
 * orthonormality constraint can never drift.
 */
class Rotation
{
public:
  Rotation() = default;

  /// Throws std::invalid_argument for non-finite input.
  static Rotation from_angle(double theta);

  /// Throws std::invalid_argument unless m is orthonormal with det 1 (1e-10).
  static Rotation from_matrix(const Mat2 & m);

  static Rotation identity() { return Rotation{}; }

  /// Principal angle in (-pi, pi].
  double angle() const { return angle_; }

  Mat2 matrix() const;

  Rotation inverse() const;

  Rotation operator*(const Rotation & other) const;
  Vec2 operator*(const Vec2 & v) const;

  bool operator==(const Rotation &) const = default;

private:
  explicit Rotation(double wrapped) : angle_(wrapped) {}

  double angle_ = 0.0;
};

/// Body-frame velocity (vx, vy, w). Also used for se(2) coordinates of a pose error.
struct Twist
{
  double vx = 0.0;
  double vy = 0.0;
  double w  = 0.0;

  static Twist from_vector(const Vec3 & v) { return {v(0), v(1), v(2)}; }
  Vec3 vector() const { return {vx, vy, w}; }

  bool is_finite() const;

  Twist operator+(const Twist & o) const { return {vx + o.vx, vy + o.vy, w + o.w}; }
  Twist operator-(const Twist & o) const { return {vx - o.vx, vy - o.vy, w - o.w}; }
  Twist operator*(double s) const { return {vx * s, vy * s, w * s}; }

  bool operator==(const Twist &) const = default;
};

/// Element of SE(2): rotation plus translation (meters).
class Pose
{
public:
  Pose() = default;
  Pose(Rotation rot, Vec2 trans) : rot_(rot), trans_(std::move(trans)) {}
  Pose(double x, double y, double theta) : rot_(Rotation::from_angle(theta)), trans_(x, y) {}

  static Pose identity() { return Pose{}; }

  /// Accepts a homogeneous 3x3 matrix; throws std::invalid_argument on a bad embedding.
  static Pose from_matrix(const Mat3 & m);

  const Rotation & rotation() const { return rot_; }
  const Vec2 & translation() const { return trans_; }
  double x() const { return trans_.x(); }
  double y() const { return trans_.y(); }
  double theta() const { return rot_.angle(); }

  /// Homogeneous embedding; bottom row is exactly (0, 0, 1).
  Mat3 matrix() const;

  Pose inverse() const;

  Pose operator*(const Pose & other) const;

  bool operator==(const Pose & o) const { return rot_ == o.rot_ && trans_ == o.trans_; }

private:
  Rotation rot_;
  Vec2 trans_ = Vec2::Zero();
};

/// Matrix in se(2): skew 2x2 rotation block, zero bottom row.
class AlgebraMatrix
{
public:
  /// Throws std::invalid_argument if m leaves se(2) by more than tol.
  explicit AlgebraMatrix(const Mat3 & m, double tol = 1e-9);

  const Mat3 & matrix() const { return m_; }

private:
  Mat3 m_;
};

AlgebraMatrix wedge(const Twist & z);

/// Raw wedge without the se(2) wrapper, for matrix arithmetic.
Mat3 hat(const Twist & z);

Twist vee(const AlgebraMatrix & m);

/// Validates the structure first (1e-9); throws std::invalid_argument.
Twist vee(const Mat3 & m);

Pose exp(const Twist & z);

struct LogResult
{
  Twist value;
  /// The rotation angle sits on the branch cut (|angle| == pi within 1e-12).
  bool branch_boundary = false;
};

LogResult log_checked(const Pose & x);

Twist log(const Pose & x);

Pose compose(const Pose & a, const Pose & b);
Pose inverse(const Pose & x);

/**
 * @brief Matrix of the algebra commutator with a fixed twist.
 *
 * For every psi: vee(psi^ z^ - z^ psi^) = adm(z) * psi.
 *
 *   [  0   w  -vy ]
 *   [ -w   0   vx ]
 *   [  0   0   0  ]
 */
Mat3 adm(const Twist & z);

}  // namespace gmpc
