#include "qcanon/qmath.hpp"

#include <cmath>
#include <sstream>

#include "qcanon/errors.hpp"

namespace qcanon {

DeformationParameter::DeformationParameter(double q) : q_(q) {
  if (!(std::isfinite(q) && q > 0.0)) {
    std::ostringstream msg;
    msg << "deformation parameter must be positive and finite, got " << q;
    throw Error(ErrorCode::domain_error, msg.str());
  }
}

bool DeformationParameter::near_unity() const noexcept {
  return std::abs(q_ - 1.0) < kUnityThreshold;
}

double q_log(double x, DeformationParameter q) {
  if (!(std::isfinite(x) && x > 0.0)) {
    std::ostringstream msg;
    msg << "q_log requires x > 0, got " << x;
    throw Error(ErrorCode::domain_error, msg.str());
  }
  return q_log_from_log(std::log(x), q);
}

double q_log_from_log(double log_x, DeformationParameter q) {
  if (q.near_unity()) return log_x;
  const double one_minus_q = 1.0 - q.value();
  return std::expm1(one_minus_q * log_x) / one_minus_q;
}

double q_exp(double x, DeformationParameter q) {
  if (q.near_unity()) return std::exp(x);
  const double one_minus_q = 1.0 - q.value();
  const double u = one_minus_q * x;
  if (u <= -1.0) return 0.0;
  return std::exp(std::log1p(u) / one_minus_q);
}

double q_log_ratio(double x, double y, DeformationParameter q) {
  if (!(std::isfinite(x) && x > 0.0) || !(std::isfinite(y) && y > 0.0)) {
    throw Error(ErrorCode::domain_error, "q_log_ratio requires x > 0 and y > 0");
  }
  if (q.near_unity()) return std::log(x) - std::log(y);
  return std::pow(y, q.value() - 1.0) * (q_log(x, q) - q_log(y, q));
}

}  // namespace qcanon
