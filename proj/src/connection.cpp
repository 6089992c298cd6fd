#include "rgg/connection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "rgg/errors.hpp"

namespace rgg {

namespace {
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

ConnectionFunction ConnectionFunction::exp_decay(double scale, double r_p, double diam) {
  if (!(scale > 0.0 && r_p > 0.0 && diam > 0.0)) throw InvalidInput("bad exp-decay parameters");
  ConnectionFunction p;
  p.kind_ = ConnectionKind::ExpDecay;
  p.a_ = scale;
  p.r_p_ = r_p;
  p.diam_ = diam;
  p.L_ = 1.0 / scale;
  p.ell_ = std::exp(-r_p / scale) / scale;
  return p;
}

ConnectionFunction ConnectionFunction::linear_clip(double L, double floor, double r_p, double diam) {
  if (!(L >= 0.0 && floor >= 0.0 && floor <= 1.0 && r_p > 0.0 && diam > 0.0))
    throw InvalidInput("bad linear-clip parameters");
  if (L > 0.0 && r_p > (1.0 - floor) / L + 1e-15)
    throw InvalidInput("linear-clip r_p beyond the linear range");
  ConnectionFunction p;
  p.kind_ = ConnectionKind::LinearClip;
  p.a_ = L;
  p.b_ = floor;
  p.r_p_ = r_p;
  p.diam_ = diam;
  p.L_ = L;
  p.ell_ = L;
  return p;
}

double ConnectionFunction::operator()(double x) const {
  if (kind_ == ConnectionKind::ExpDecay) return std::exp(-x / a_);
  return std::max(b_, 1.0 - a_ * x);
}

double bisect_inverse(const ConnectionFunction& p, double y, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (p(mid) > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Inverse ConnectionFunction::inverse(double y) const {
  if (y >= (*this)(0.0)) return {0.0, y > (*this)(0.0)};
  if (y <= (*this)(diam_)) return {diam_, y < (*this)(diam_)};
  if (kind_ == ConnectionKind::ExpDecay) return {std::min(diam_, -a_ * std::log(y)), false};
  return {bisect_inverse(*this, y, 0.0, diam_, 1e-12), false};
}

std::string ConnectionFunction::descriptor() const {
  if (kind_ == ConnectionKind::ExpDecay)
    return "exp:" + num(a_) + ":" + num(r_p_) + ":" + num(diam_);
  return "linear:" + num(a_) + ":" + num(b_) + ":" + num(r_p_) + ":" + num(diam_);
}

ConnectionFunction ConnectionFunction::from_descriptor(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 4 && parts[0] == "exp")
      return exp_decay(std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]));
    if (parts.size() == 5 && parts[0] == "linear")
      return linear_clip(std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]),
                         std::stod(parts[4]));
  } catch (const std::logic_error&) {
  }
  throw InvalidInput("bad connection descriptor: " + s);
}

}  // namespace rgg
