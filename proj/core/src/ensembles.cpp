#include "qcanon/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "qcanon/errors.hpp"

namespace qcanon {

namespace {

constexpr double kRelFloor = 1e-12;

double rel_residual(double x, double y) {
  const double denom = std::max({std::abs(x), std::abs(y), kRelFloor});
  return std::abs(x - y) / denom;
}

// Per-microstate weights of the q-canonical family, kept in log domain so
// that arbitrarily sharp factors normalize without overflow. States past
// the q < 1 cutoff carry probability exactly zero.
struct QWeights {
  std::vector<double> probs;
  double log_ztilde = 0.0;
};

QWeights q_weights(const Spectrum& spec, DeformationParameter q, double beta_star, double center) {
  const std::size_t n = spec.size();
  std::vector<double> log_w(n, -std::numeric_limits<double>::infinity());
  bool any_support = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -beta_star * (spec[i].energy - center);
    if (q.near_unity()) {
      log_w[i] = x;
      any_support = true;
    } else {
      const double one_minus_q = 1.0 - q.value();
      const double u = one_minus_q * x;
      if (u <= -1.0) continue;  // cutoff
      log_w[i] = std::log1p(u) / one_minus_q;
      any_support = true;
    }
  }
  if (!any_support) {
    std::ostringstream msg;
    msg << "q-exponential support is empty at beta_star=" << beta_star << ", center=" << center;
    throw Error(ErrorCode::empty_support, msg.str());
  }

  const double shift = *std::max_element(log_w.begin(), log_w.end());
  double norm = 0.0;
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isinf(log_w[i]) && log_w[i] < 0) continue;
    w[i] = std::exp(log_w[i] - shift);
    norm += static_cast<double>(spec[i].degeneracy) * w[i];
  }
  QWeights result;
  result.probs.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) result.probs[i] = w[i] / norm;
  result.log_ztilde = shift + std::log(norm);
  return result;
}

double escort_mean_raw(const Spectrum& spec, const std::vector<double>& probs, double q) {
  double norm = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    const double w = static_cast<double>(spec[i].degeneracy) * std::pow(probs[i], q);
    norm += w;
    acc += w * spec[i].energy;
  }
  return acc / norm;
}

void require_solvable(const Spectrum& spec) {
  if (spec.distinct_energy_count() < 2) {
    throw Error(ErrorCode::degenerate_spectrum,
                "solver requires at least two distinct energy values");
  }
}

void require_feasible_mean(const Spectrum& spec, double abar) {
  if (!(abar > spec.min_energy() && abar < spec.max_energy())) {
    std::ostringstream msg;
    msg << "target mean " << abar << " must lie strictly inside (" << spec.min_energy() << ", "
        << spec.max_energy() << ")";
    throw Error(ErrorCode::infeasible_mean, msg.str());
  }
}

struct Bracket {
  double lo = 0.0, hi = 0.0;
  double f_lo = 0.0, f_hi = 0.0;
};

// Bisection to relative width 1e-14 followed by a short secant polish.
// f must change sign over the bracket.
double refine_root(const std::function<double(double)>& f, Bracket b) {
  for (int iter = 0; iter < 300; ++iter) {
    const double width = std::abs(b.hi - b.lo);
    if (width <= 1e-14 * std::max({1.0, std::abs(b.lo), std::abs(b.hi)})) break;
    const double mid = 0.5 * (b.lo + b.hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (b.f_lo > 0.0)) {
      b.lo = mid;
      b.f_lo = fm;
    } else {
      b.hi = mid;
      b.f_hi = fm;
    }
  }

  double best = std::abs(b.f_lo) < std::abs(b.f_hi) ? b.lo : b.hi;
  double f_best = std::min(std::abs(b.f_lo), std::abs(b.f_hi));
  for (int iter = 0; iter < 6; ++iter) {
    if (b.f_hi == b.f_lo) break;
    double x = b.hi - b.f_hi * (b.hi - b.lo) / (b.f_hi - b.f_lo);
    const double lo = std::min(b.lo, b.hi), hi = std::max(b.lo, b.hi);
    if (!(x >= lo && x <= hi)) x = 0.5 * (b.lo + b.hi);
    const double fx = f(x);
    if (std::abs(fx) < f_best) {
      best = x;
      f_best = std::abs(fx);
    }
    if (fx == 0.0) break;
    if ((fx > 0.0) == (b.f_lo > 0.0)) {
      b.lo = x;
      b.f_lo = fx;
    } else {
      b.hi = x;
      b.f_hi = fx;
    }
  }
  return best;
}

}  // namespace

double IdentityReport::worst() const {
  return std::max({beta_decomposition, entropy_vs_qlog_z, escort_norm_vs_z, cq_recomputed,
                   entropy_vs_tsallis});
}

BGSolution bg_from_beta(const Spectrum& spec, double beta) {
  if (!std::isfinite(beta)) {
    throw Error(ErrorCode::domain_error, "beta must be finite");
  }
  // Shift by the dominant end so every exponential argument is <= 0.
  const double ref = beta >= 0.0 ? spec.min_energy() : spec.max_energy();
  const std::size_t n = spec.size();
  std::vector<double> w(n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(-beta * (spec[i].energy - ref));
    norm += static_cast<double>(spec[i].degeneracy) * w[i];
  }

  BGSolution sol;
  sol.beta = beta;
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) probs[i] = w[i] / norm;
  double abar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    abar += static_cast<double>(spec[i].degeneracy) * probs[i] * spec[i].energy;
  }
  sol.abar = abar;
  const double log_ztilde = std::log(norm) + beta * (abar - ref);
  sol.ztilde = std::exp(log_ztilde);
  sol.z = std::exp(log_ztilde - beta * abar);
  sol.entropy = log_ztilde;
  sol.dist = make_distribution(spec, std::move(probs));
  return sol;
}

BGSolution bg_from_mean(const Spectrum& spec, double abar) {
  require_solvable(spec);
  require_feasible_mean(spec, abar);
  const double range = spec.energy_range();

  const auto mean_at = [&](double beta) {
    const double ref = beta >= 0.0 ? spec.min_energy() : spec.max_energy();
    double norm = 0.0, acc = 0.0;
    for (const auto& e : spec.entries()) {
      const double w = static_cast<double>(e.degeneracy) * std::exp(-beta * (e.energy - ref));
      norm += w;
      acc += w * e.energy;
    }
    return acc / norm;
  };
  const auto f = [&](double beta) { return mean_at(beta) - abar; };

  double beta = 0.0;
  const double f0 = f(0.0);
  if (f0 != 0.0) {
    // mean_at decreases in beta, so the root lies on the side f0 points to.
    const double dir = f0 > 0.0 ? 1.0 : -1.0;
    Bracket b;
    b.lo = 0.0;
    b.f_lo = f0;
    double step = 1.0 / range;
    bool bracketed = false;
    for (int iter = 0; iter < 200; ++iter) {
      b.hi = dir * step;
      b.f_hi = f(b.hi);
      if ((b.f_hi > 0.0) != (b.f_lo > 0.0) || b.f_hi == 0.0) {
        bracketed = true;
        break;
      }
      b.lo = b.hi;
      b.f_lo = b.f_hi;
      step *= 2.0;
    }
    if (!bracketed) {
      std::ostringstream msg;
      msg << "could not bracket beta for mean " << abar << " (last bracket [" << b.lo << ", "
          << b.hi << "])";
      throw Error(ErrorCode::no_solution, msg.str());
    }
    beta = refine_root(f, b);
  }

  // Newton polish; d(mean)/d(beta) = -variance.
  for (int iter = 0; iter < 4; ++iter) {
    const double ref = beta >= 0.0 ? spec.min_energy() : spec.max_energy();
    double norm = 0.0, m1 = 0.0, m2 = 0.0;
    for (const auto& e : spec.entries()) {
      const double w = static_cast<double>(e.degeneracy) * std::exp(-beta * (e.energy - ref));
      norm += w;
      m1 += w * e.energy;
      m2 += w * e.energy * e.energy;
    }
    const double mean = m1 / norm;
    const double var = m2 / norm - mean * mean;
    if (!(var > 0.0) || !std::isfinite(var)) break;
    const double next = beta + (mean - abar) / var;
    if (!std::isfinite(next)) break;
    beta = next;
  }

  BGSolution sol = bg_from_beta(spec, beta);
  if (std::abs(sol.abar - abar) > 1e-12 * range) {
    std::ostringstream msg;
    msg << "beta solve left |mean - abar| = " << std::abs(sol.abar - abar)
        << " above tolerance " << 1e-12 * range;
    throw Error(ErrorCode::invariant_violation, msg.str());
  }
  sol.abar = abar;
  return sol;
}

double shannon_entropy(const Distribution& dist) {
  validate_distribution(dist);
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double p = dist.probs[i];
    if (p <= 0.0) continue;
    s -= static_cast<double>(dist.degeneracy[i]) * p * std::log(p);
  }
  return s;
}

double escort_normalizer(const Distribution& dist, DeformationParameter q) {
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double p = dist.probs[i];
    if (p <= 0.0) continue;
    s += static_cast<double>(dist.degeneracy[i]) * std::pow(p, q.value());
  }
  return s;
}

double tsallis_entropy(const Distribution& dist, DeformationParameter q) {
  if (q.near_unity()) return shannon_entropy(dist);
  validate_distribution(dist);
  return (escort_normalizer(dist, q) - 1.0) / (1.0 - q.value());
}

Distribution escort(const Distribution& dist, DeformationParameter q) {
  validate_distribution(dist);
  const double norm = escort_normalizer(dist, q);
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::degenerate_distribution, "escort of a distribution with empty support");
  }
  Distribution out = dist;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double p = dist.probs[i];
    out.probs[i] = p > 0.0 ? std::pow(p, q.value()) / norm : 0.0;
  }
  return out;
}

double q_mean(const Distribution& dist, DeformationParameter q, const Spectrum& spec) {
  require_aligned(dist, spec);
  const Distribution esc = escort(dist, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    acc += static_cast<double>(spec[i].degeneracy) * esc.probs[i] * spec[i].energy;
  }
  return acc;
}

Distribution q_canonical_given(const Spectrum& spec, DeformationParameter q, double beta_star,
                               double center) {
  if (!std::isfinite(beta_star) || !std::isfinite(center)) {
    throw Error(ErrorCode::domain_error, "beta_star and center must be finite");
  }
  QWeights w = q_weights(spec, q, beta_star, center);
  return make_distribution(spec, std::move(w.probs));
}

QCanonicalSolution solve_q_canonical(const Spectrum& spec, DeformationParameter q, double abar,
                                     const SolveOptions& options) {
  require_solvable(spec);
  require_feasible_mean(spec, abar);
  const double range = spec.energy_range();
  const double qv = q.value();

  const auto f = [&](double beta_star) {
    const QWeights w = q_weights(spec, q, beta_star, abar);
    return escort_mean_raw(spec, w.probs, qv) - abar;
  };

  const double tol = options.mean_tolerance * range;
  double beta_star = 0.0;
  const double f0 = f(0.0);
  if (std::abs(f0) > 0.0) {
    const double dir = f0 > 0.0 ? 1.0 : -1.0;
    // For q > 1 the factor for the extreme energy in the chosen direction
    // has a pole at finite beta_star; the escort mean reaches the extreme
    // energy there, so the bracket closes strictly before it.
    double pole = std::numeric_limits<double>::infinity();
    if (qv > 1.0 + kUnityThreshold) {
      const double gap = dir > 0.0 ? (abar - spec.min_energy()) : (spec.max_energy() - abar);
      pole = 1.0 / ((qv - 1.0) * gap);
    }

    Bracket b;
    b.lo = 0.0;
    b.f_lo = f0;
    bool bracketed = false;
    if (std::isfinite(pole)) {
      double frac = 0.5;
      for (int iter = 0; iter < 1020; ++iter) {
        b.hi = dir * pole * (1.0 - frac);
        b.f_hi = f(b.hi);
        if ((b.f_hi > 0.0) != (b.f_lo > 0.0) || b.f_hi == 0.0) {
          bracketed = true;
          break;
        }
        b.lo = b.hi;
        b.f_lo = b.f_hi;
        frac *= 0.5;
      }
    } else {
      double step = 1.0 / range;
      for (int iter = 0; iter < 200; ++iter) {
        b.hi = dir * step;
        b.f_hi = f(b.hi);
        if ((b.f_hi > 0.0) != (b.f_lo > 0.0) || b.f_hi == 0.0) {
          bracketed = true;
          break;
        }
        b.lo = b.hi;
        b.f_lo = b.f_hi;
        step *= 2.0;
      }
    }
    if (!bracketed) {
      std::ostringstream msg;
      msg << "could not bracket beta_star for q=" << qv << ", abar=" << abar
          << " (last bracket [" << b.lo << ", " << b.hi << "], residuals [" << b.f_lo << ", "
          << b.f_hi << "])";
      throw Error(ErrorCode::no_solution, msg.str());
    }
    beta_star = refine_root(f, b);
  }

  const QWeights w = q_weights(spec, q, beta_star, abar);
  QCanonicalSolution sol;
  sol.q = qv;
  sol.beta_star = beta_star;
  sol.abar = abar;
  sol.ztilde = std::exp(w.log_ztilde);
  sol.entropy = q_log_from_log(w.log_ztilde, q);
  sol.dist = make_distribution(spec, w.probs);
  sol.escort = escort(sol.dist, q);
  sol.cq = escort_normalizer(sol.dist, q);
  sol.beta = beta_star * sol.cq;
  double qm = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    qm += static_cast<double>(spec[i].degeneracy) * sol.escort.probs[i] * spec[i].energy;
  }
  sol.q_mean = qm;

  if (std::abs(sol.q_mean - abar) > tol) {
    std::ostringstream msg;
    msg << "self-consistency stalled: |q_mean - abar| = " << std::abs(sol.q_mean - abar)
        << " exceeds " << tol;
    throw Error(ErrorCode::invariant_violation, msg.str());
  }
  return sol;
}

double stationarity_residual(const QCanonicalSolution& sol, const Spectrum& spec, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::domain_error, "finite-difference step must be positive");
  }
  const DeformationParameter q(sol.q);
  const auto ztilde_at = [&](double beta_star) {
    double z = 0.0;
    for (const auto& e : spec.entries()) {
      z += static_cast<double>(e.degeneracy) *
           q_exp(-beta_star * (e.energy - sol.abar), q);
    }
    return z;
  };
  const double z0 = ztilde_at(sol.beta_star);
  const double fd = (ztilde_at(sol.beta_star + step) - ztilde_at(sol.beta_star - step)) /
                    (2.0 * step);
  // Signed to track q_mean - abar: dZtilde/dbeta_star = -Z^q cq (q_mean - abar).
  return -fd * spec.energy_range() / z0;
}

IdentityReport verify_identities(const QCanonicalSolution& sol) {
  const DeformationParameter q(sol.q);
  const double spq = escort_normalizer(sol.dist, q);

  IdentityReport report;
  report.beta_decomposition = rel_residual(sol.beta, sol.beta_star * sol.cq);
  report.cq_recomputed = rel_residual(sol.cq, spq);
  report.entropy_vs_qlog_z = rel_residual(sol.entropy, q_log(sol.ztilde, q));
  report.escort_norm_vs_z = rel_residual(spq, std::pow(sol.ztilde, 1.0 - sol.q));
  report.entropy_vs_tsallis = rel_residual(sol.entropy, tsallis_entropy(sol.dist, q));
  return report;
}

}  // namespace qcanon
