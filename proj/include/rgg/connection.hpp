#pragma once

#include <string>

namespace rgg {

enum class ConnectionKind { ExpDecay, LinearClip };

struct Inverse {
  double x = 0.0;
  bool clamped = false;  // query below p(diam) or above p(0)
};

/// Non-increasing distance-to-probability map with Lipschitz data.
class ConnectionFunction {
 public:
  /// p(x) = exp(-x / scale); bi-Lipschitz on [0, r_p].
  static ConnectionFunction exp_decay(double scale, double r_p, double diam);
  /// p(x) = max(floor, 1 - L x); r_p must not exceed (1 - floor) / L.
  static ConnectionFunction linear_clip(double L, double floor, double r_p, double diam);

  ConnectionKind kind() const { return kind_; }
  double operator()(double x) const;
  /// Generalized inverse on [0, diam]; bisection for kinds without a closed form.
  Inverse inverse(double y) const;

  double L_p() const { return L_; }
  double ell_p() const { return ell_; }
  double r_p() const { return r_p_; }
  double diam() const { return diam_; }
  double scale() const { return a_; }
  double floor_value() const { return b_; }

  std::string descriptor() const;
  static ConnectionFunction from_descriptor(const std::string& s);
  bool operator==(const ConnectionFunction&) const = default;

 private:
  ConnectionKind kind_ = ConnectionKind::ExpDecay;
  double a_ = 1.0;  // scale or slope
  double b_ = 0.0;  // floor
  double r_p_ = 1.0;
  double diam_ = 1.0;
  double L_ = 1.0;
  double ell_ = 0.0;
};

/// Bisection inverse of a non-increasing function on [lo, hi] to tolerance tol.
double bisect_inverse(const ConnectionFunction& p, double y, double lo, double hi, double tol);

}  // namespace rgg
