#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "spiralflow/errors.hpp"
#include "spiralflow/vec2.hpp"

namespace spiralflow {

//! Values on a regular lattice, bilinearly interpolated (clamped at the edges).
struct SampledField2D {
  Vec2 origin;
  double spacing = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // row-major, index j*nx + i

  void check() const {
    if (nx < 2 || ny < 2 || !(spacing > 0.0) ||
        values.size() != static_cast<std::size_t>(nx) * ny)
      throw ConfigError("sampled field: inconsistent dimensions");
  }

  double operator()(Vec2 x) const {
    const double fi = std::clamp((x.x - origin.x) / spacing, 0.0, nx - 1.0);
    const double fj = std::clamp((x.y - origin.y) / spacing, 0.0, ny - 1.0);
    const int i0 = std::min(static_cast<int>(fi), nx - 2);
    const int j0 = std::min(static_cast<int>(fj), ny - 2);
    const double tx = fi - i0, ty = fj - j0;
    auto v = [&](int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; };
    return (1 - tx) * (1 - ty) * v(i0, j0) + tx * (1 - ty) * v(i0 + 1, j0) +
           (1 - tx) * ty * v(i0, j0 + 1) + tx * ty * v(i0 + 1, j0 + 1);
  }

  //! Largest cell-wise gradient magnitude of the bilinear interpolant.
  double gradient_sup() const {
    double sup = 0.0;
    auto v = [&](int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; };
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i + 1 < nx; ++i) {
        for (int e = 0; e < 2; ++e) {
          const double gx = (v(i + 1, j + e) - v(i, j + e)) / spacing;
          const double gy = (v(i + e, j + 1) - v(i + e, j)) / spacing;
          sup = std::max(sup, std::hypot(gx, gy));
        }
      }
    }
    return sup;
  }
};

//! Step velocity c(x) > 0.
class Forcing {
 public:
  enum class Kind { constant, radial, sampled };

  static Forcing constant(double value) { return Forcing(Kind::constant, value, {}); }
  //! c(x) = c0 |x|.
  static Forcing radial(double c0) { return Forcing(Kind::radial, c0, {}); }
  static Forcing sampled(SampledField2D f) {
    f.check();
    return Forcing(Kind::sampled, 0.0, std::move(f));
  }

  Kind kind() const { return kind_; }
  double parameter() const { return value_; }
  const SampledField2D& samples() const { return samples_; }

  double operator()(Vec2 x) const {
    switch (kind_) {
      case Kind::constant: return value_;
      case Kind::radial: return value_ * norm(x);
      case Kind::sampled: return samples_(x);
    }
    return 0.0;
  }

  //! sup |Dc|: 0 for constant forcing, c0 for radial forcing.
  double gradient_sup() const {
    switch (kind_) {
      case Kind::constant: return 0.0;
      case Kind::radial: return std::abs(value_);
      case Kind::sampled: return samples_.gradient_sup();
    }
    return 0.0;
  }

 private:
  Forcing(Kind k, double v, SampledField2D s) : kind_(k), value_(v), samples_(std::move(s)) {}

  Kind kind_ = Kind::constant;
  double value_ = 1.0;
  SampledField2D samples_;
};

//! Affine profile g(y) = offset + slope . y evaluated on unit vectors y = x/|x|.
struct AngularProfile {
  double offset = 0.0;
  Vec2 slope;

  double operator()(Vec2 y) const { return offset + dot(slope, y); }
  double gradient_sup() const { return norm(slope); }
};

//! u0: a constant, g(x/|x|), or sampled values.
class InitialCondition {
 public:
  enum class Kind { constant, angular, sampled };

  static InitialCondition constant(double alpha) { return {Kind::constant, alpha, {}, {}}; }
  static InitialCondition angular(AngularProfile g) { return {Kind::angular, 0.0, g, {}}; }
  static InitialCondition sampled(SampledField2D f) {
    f.check();
    return {Kind::sampled, 0.0, {}, std::move(f)};
  }

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const AngularProfile& profile() const { return profile_; }
  const SampledField2D& samples() const { return samples_; }

  double operator()(Vec2 x) const {
    switch (kind_) {
      case Kind::constant: return alpha_;
      case Kind::angular: {
        const double r = norm(x);
        return r == 0.0 ? profile_.offset : profile_(x / r);
      }
      case Kind::sampled: return samples_(x);
    }
    return 0.0;
  }

 private:
  InitialCondition(Kind k, double a, AngularProfile g, SampledField2D s)
      : kind_(k), alpha_(a), profile_(g), samples_(std::move(s)) {}

  Kind kind_ = Kind::constant;
  double alpha_ = 0.0;
  AngularProfile profile_;
  SampledField2D samples_;
};

}  // namespace spiralflow
