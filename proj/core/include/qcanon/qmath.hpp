#ifndef QCANON_QMATH_HPP
#define QCANON_QMATH_HPP

// q-deformed logarithm and exponential.
//
//   ln_q x = (x^(1-q) - 1) / (1-q)            (x > 0)
//   e_q(x) = [1 + (1-q) x]^(1/(1-q))          when the bracket is positive,
//            0                                otherwise (hard cutoff).
//
// Both reduce to ln/exp as q -> 1; below a small |q-1| threshold the limit
// forms are used directly because the generic expressions cancel
// catastrophically there.

namespace qcanon {

// |q - 1| below this switches ln_q/e_q to their q = 1 limit forms.
inline constexpr double kUnityThreshold = 1e-8;

// Entropic index q. Positive and finite, rejected otherwise.
class DeformationParameter {
 public:
  explicit DeformationParameter(double q);

  double value() const noexcept { return q_; }
  bool near_unity() const noexcept;

 private:
  double q_;
};

double q_log(double x, DeformationParameter q);

// q_log evaluated at exp(log_x). Never forms exp(log_x) itself, so it is
// safe for arguments whose plain value would overflow (logs of big counts).
double q_log_from_log(double log_x, DeformationParameter q);

// Hard cutoff branch returns exactly 0.0, not a subnormal; downstream
// probability code tests support with p == 0.
double q_exp(double x, DeformationParameter q);

// ln_q(x/y) computed as y^(q-1) * (ln_q x - ln_q y).
double q_log_ratio(double x, double y, DeformationParameter q);

}  // namespace qcanon

#endif
