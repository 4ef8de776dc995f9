#include "qcanon/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "qcanon/errors.hpp"

namespace qcanon {

namespace mp = boost::multiprecision;

namespace {

// Memory budget for one convolution table (number of big-integer cells).
constexpr std::int64_t kMaxCells = std::int64_t{1} << 22;

BigInt floor_rational(const Rational& r) {
  const BigInt num = mp::numerator(r);
  const BigInt den = mp::denominator(r);
  BigInt q = num / den;
  if (num < 0 && q * den != num) --q;
  return q;
}

BigInt ceil_rational(const Rational& r) {
  const BigInt num = mp::numerator(r);
  const BigInt den = mp::denominator(r);
  BigInt q = num / den;
  if (num > 0 && q * den != num) ++q;
  return q;
}

Rational abs_rational(const Rational& r) { return r < 0 ? Rational(-r) : r; }

struct Lattice {
  std::vector<std::int64_t> offsets;     // energy_int - min, per configuration
  std::vector<std::int64_t> degeneracy;  // g(m)
  BigInt n_min;
  std::int64_t span = 0;
};

Lattice lattice_offsets(const LatticeSpectrum& spec) {
  Lattice lat;
  lat.n_min = *std::min_element(spec.energy_int.begin(), spec.energy_int.end());
  const BigInt n_max = *std::max_element(spec.energy_int.begin(), spec.energy_int.end());
  const BigInt span = n_max - lat.n_min;
  if (span > kMaxCells) {
    throw Error(ErrorCode::domain_error,
                "integer energy span exceeds the exact-counting budget; "
                "use coarser rational energies");
  }
  lat.span = span.convert_to<std::int64_t>();
  for (std::size_t i = 0; i < spec.energy_int.size(); ++i) {
    lat.offsets.push_back((spec.energy_int[i] - lat.n_min).convert_to<std::int64_t>());
    lat.degeneracy.push_back(spec.base[i].degeneracy);
  }
  return lat;
}

// Degeneracy-weighted count of n-tuples per total offset sum: coefficients
// of (sum_m g_m x^{d_m})^n.
std::vector<BigInt> convolve_counts(const Lattice& lat, std::int64_t n) {
  if (n > 0 && lat.span > 0 && n * lat.span + 1 > kMaxCells) {
    throw Error(ErrorCode::domain_error,
                "replica count times energy span exceeds the exact-counting budget");
  }
  std::vector<BigInt> ways{BigInt(1)};
  for (std::int64_t step = 1; step <= n; ++step) {
    std::vector<BigInt> next(static_cast<std::size_t>(step * lat.span) + 1, BigInt(0));
    for (std::size_t t = 0; t < ways.size(); ++t) {
      if (ways[t] == 0) continue;
      for (std::size_t i = 0; i < lat.offsets.size(); ++i) {
        const std::size_t target = t + static_cast<std::size_t>(lat.offsets[i]);
        if (lat.degeneracy[i] == 1) {
          next[target] += ways[t];
        } else {
          next[target] += ways[t] * lat.degeneracy[i];
        }
      }
    }
    ways = std::move(next);
  }
  return ways;
}

// Inclusive admissible range of raw integer sums T for n replicas:
// n*scale*(abar - eps) < T < n*scale*(abar + eps), strict on both sides.
struct SumRange {
  BigInt t_lo, t_hi;
  bool empty() const { return t_lo > t_hi; }
};

SumRange raw_sum_range(const LatticeSpectrum& spec, const Rational& abar, const Rational& eps,
                       std::int64_t n) {
  const Rational lo = Rational(n) * spec.scale * (abar - eps);
  const Rational hi = Rational(n) * spec.scale * (abar + eps);
  SumRange range;
  range.t_lo = floor_rational(lo) + 1;
  range.t_hi = ceil_rational(hi) - 1;
  return range;
}

// Sums ways[t] over raw sums T in [t_lo, t_hi], where t = T - n*n_min.
BigInt sum_window(const std::vector<BigInt>& ways, const Lattice& lat, std::int64_t n,
                  const SumRange& range) {
  if (range.empty()) return 0;
  const BigInt base = BigInt(n) * lat.n_min;
  BigInt lo_idx = range.t_lo - base;
  BigInt hi_idx = range.t_hi - base;
  if (lo_idx < 0) lo_idx = 0;
  const BigInt last = BigInt(static_cast<std::int64_t>(ways.size()) - 1);
  if (hi_idx > last) hi_idx = last;
  if (lo_idx > hi_idx) return 0;
  BigInt total = 0;
  for (BigInt t = lo_idx; t <= hi_idx; ++t) {
    total += ways[t.convert_to<std::size_t>()];
  }
  return total;
}

[[noreturn]] void throw_empty_window(const LatticeSpectrum& spec, const WindowSpec& win) {
  // Hint: the reachable mean closest to the window centre.
  const Lattice lat = lattice_offsets(spec);
  const std::vector<BigInt> ways = convolve_counts(lat, win.replicas);
  const Rational center = Rational(win.replicas) * spec.scale * win.abar;
  bool found = false;
  Rational best_dist = 0;
  Rational best_mean = 0;
  for (std::size_t t = 0; t < ways.size(); ++t) {
    if (ways[t] == 0) continue;
    const BigInt total = BigInt(win.replicas) * lat.n_min + BigInt(t);
    const Rational dist = abs_rational(Rational(total) - center);
    if (!found || dist < best_dist) {
      found = true;
      best_dist = dist;
      best_mean = Rational(total) / (Rational(win.replicas) * spec.scale);
    }
  }
  std::ostringstream msg;
  msg << "window around " << to_double(win.abar) << " (halfwidth " << to_double(win.epsilon)
      << ", N=" << win.replicas << ") admits no configuration";
  if (found) {
    msg << "; nearest reachable mean is " << to_double(best_mean);
  }
  throw Error(ErrorCode::empty_window, msg.str());
}

std::vector<BigInt> pinned_counts(const LatticeSpectrum& spec, const WindowSpec& win) {
  const Lattice lat = lattice_offsets(spec);
  const std::vector<BigInt> rest = convolve_counts(lat, win.replicas - 1);
  const SumRange range = raw_sum_range(spec, win.abar, win.epsilon, win.replicas);
  std::vector<BigInt> counts(spec.energy_int.size(), BigInt(0));
  for (std::size_t i = 0; i < spec.energy_int.size(); ++i) {
    SumRange shifted;
    shifted.t_lo = range.t_lo - spec.energy_int[i];
    shifted.t_hi = range.t_hi - spec.energy_int[i];
    counts[i] = sum_window(rest, lat, win.replicas - 1, shifted) * lat.degeneracy[i];
  }
  return counts;
}

}  // namespace

WindowSpec::WindowSpec(Rational abar_in, Rational epsilon_in, std::int64_t replicas_in)
    : abar(std::move(abar_in)), epsilon(std::move(epsilon_in)), replicas(replicas_in) {
  if (!(epsilon > 0)) {
    throw Error(ErrorCode::domain_error, "window halfwidth must be positive");
  }
  if (replicas < 1) {
    throw Error(ErrorCode::domain_error, "replica count must be >= 1");
  }
}

LatticeSpectrum make_lattice_spectrum(const std::vector<LatticeEntry>& entries) {
  if (entries.empty()) {
    throw Error(ErrorCode::domain_error, "spectrum must contain at least one configuration");
  }
  BigInt denom_lcm = 1;
  for (const auto& e : entries) {
    denom_lcm = mp::lcm(denom_lcm, mp::denominator(e.energy));
  }
  std::vector<BigInt> ints;
  BigInt common = 0;
  for (const auto& e : entries) {
    BigInt n = mp::numerator(e.energy) * (denom_lcm / mp::denominator(e.energy));
    common = mp::gcd(common, n);
    ints.push_back(std::move(n));
  }

  LatticeSpectrum spec;
  if (common > 1) {
    for (auto& n : ints) n /= common;
    spec.scale = Rational(denom_lcm, common);
  } else {
    spec.scale = Rational(denom_lcm);
  }
  spec.energy_int = std::move(ints);

  std::vector<SpectrumEntry> base;
  base.reserve(entries.size());
  for (const auto& e : entries) {
    base.push_back({e.label, to_double(e.energy), e.degeneracy});
  }
  spec.base = Spectrum(std::move(base));
  return spec;
}

Rational dyadic_epsilon(double coeff, std::int64_t n) {
  if (!(coeff > 0.0) || !std::isfinite(coeff)) {
    throw Error(ErrorCode::domain_error, "epsilon coefficient must be positive");
  }
  if (n < 1) {
    throw Error(ErrorCode::domain_error, "replica count must be >= 1");
  }
  constexpr std::int64_t grid = std::int64_t{1} << 20;
  const double raw = coeff / std::sqrt(static_cast<double>(n));
  std::int64_t num = std::llround(raw * static_cast<double>(grid));
  if (num < 1) num = 1;
  return Rational(num, grid);
}

BigInt count_Y(const LatticeSpectrum& spec, const WindowSpec& win) {
  const SumRange range = raw_sum_range(spec, win.abar, win.epsilon, win.replicas);
  if (range.empty()) return 0;
  const Lattice lat = lattice_offsets(spec);
  const std::vector<BigInt> ways = convolve_counts(lat, win.replicas);
  return sum_window(ways, lat, win.replicas, range);
}

BigInt count_W_pinned(const LatticeSpectrum& spec, const WindowSpec& win,
                      const std::string& label) {
  const std::size_t idx = spec.base.index_of(label);
  return pinned_counts(spec, win)[idx];
}

CountResult empirical_distribution(const LatticeSpectrum& spec, const WindowSpec& win) {
  CountResult result;
  result.y = count_Y(spec, win);
  if (result.y == 0) throw_empty_window(spec, win);

  result.w_m = pinned_counts(spec, win);
  result.w = 0;
  for (const auto& c : result.w_m) result.w += c;
  if (result.w != result.y) {
    std::ostringstream msg;
    msg << "pinned counts sum to " << result.w << " but the window count is " << result.y;
    throw Error(ErrorCode::invariant_violation, msg.str());
  }

  std::vector<double> probs(result.w_m.size(), 0.0);
  result.p_exact.resize(result.w_m.size());
  for (std::size_t i = 0; i < result.w_m.size(); ++i) {
    result.p_exact[i] =
        Rational(result.w_m[i]) / (Rational(result.w) * spec.base[i].degeneracy);
    probs[i] = to_double(result.p_exact[i]);
  }
  result.empirical = make_distribution(spec.base, std::move(probs));
  return result;
}

EntropyRates entropy_rate(const LatticeSpectrum& spec, const WindowSpec& win,
                          DeformationParameter q) {
  const BigInt y = count_Y(spec, win);
  if (y == 0) throw_empty_window(spec, win);
  EntropyRates rates;
  rates.rate_log = log_big(y) / static_cast<double>(win.replicas);
  rates.rate_qlog = q_log_from_log(rates.rate_log, q);
  return rates;
}

double beta_estimate(const LatticeSpectrum& spec, std::int64_t replicas, const Rational& abar,
                     const Rational& eps, const Rational& delta) {
  if (!(delta > 0)) {
    throw Error(ErrorCode::domain_error, "finite-difference step must be positive");
  }
  const auto rate_at = [&](const Rational& center) {
    const WindowSpec win(center, eps, replicas);
    const BigInt y = count_Y(spec, win);
    if (y == 0) throw_empty_window(spec, win);
    return log_big(y) / static_cast<double>(replicas);
  };
  const double s_plus = rate_at(abar + delta);
  const double s_minus = rate_at(abar - delta);
  return (s_plus - s_minus) / (2.0 * to_double(delta));
}

QRelationReport q_relation_check(const LatticeSpectrum& spec, const WindowSpec& win,
                                 DeformationParameter q, const Rational& delta) {
  if (!(delta > 0)) {
    throw Error(ErrorCode::domain_error, "finite-difference step must be positive");
  }
  const CountResult counts = empirical_distribution(spec, win);
  const double n = static_cast<double>(win.replicas);
  const double log_y = log_big(counts.y);
  const double one_minus_q = q.near_unity() ? 0.0 : 1.0 - q.value();

  const auto qrate_at = [&](const Rational& center) {
    const WindowSpec shifted(center, win.epsilon, win.replicas);
    const BigInt y = count_Y(spec, shifted);
    if (y == 0) throw_empty_window(spec, shifted);
    return q_log_from_log(log_big(y) / n, q);
  };

  QRelationReport report;
  report.q = q.value();
  report.replicas = win.replicas;
  report.abar = to_double(win.abar);
  report.beta_hat =
      (qrate_at(win.abar + delta) - qrate_at(win.abar - delta)) / (2.0 * to_double(delta));
  report.cq_hat = std::exp(one_minus_q / n * log_y);
  report.beta_star_hat = report.beta_hat / report.cq_hat;

  const double factor = std::exp(one_minus_q * (1.0 - 1.0 / n) * log_y);
  const double qlog_y = q_log_from_log(log_y, q);

  double gap_sum = 0.0;
  std::size_t live = 0;
  for (std::size_t i = 0; i < spec.base.size(); ++i) {
    QRelationEntry entry;
    entry.label = spec.base[i].label;
    entry.energy = spec.base[i].energy;
    entry.rhs = -report.beta_hat * factor * (entry.energy - report.abar);
    if (counts.w_m[i] > 0) {
      entry.lhs = q_log_from_log(log_big(counts.w_m[i]), q) - qlog_y;
    } else if (one_minus_q > 0.0) {
      entry.lhs = -1.0 / one_minus_q - qlog_y;  // ln_q 0 is finite for q < 1
    } else {
      entry.pinned_empty = true;
    }
    if (!entry.pinned_empty) {
      entry.gap = entry.lhs - entry.rhs;
      gap_sum += entry.gap;
      ++live;
    }
    report.entries.push_back(std::move(entry));
  }

  report.pinning_offset = live > 0 ? gap_sum / static_cast<double>(live) : 0.0;
  double sq_sum = 0.0;
  for (auto& entry : report.entries) {
    if (entry.pinned_empty) continue;
    entry.residual = entry.gap - report.pinning_offset;
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(entry.residual));
    sq_sum += entry.residual * entry.residual;
  }
  report.rms_residual = live > 0 ? std::sqrt(sq_sum / static_cast<double>(live)) : 0.0;

  const double log_w = log_big(counts.w);
  report.w_rate_gap_inv_np1 = log_w - log_y / (n + 1.0);
  report.w_rate_gap_np1_over_n = log_w - log_y * (n + 1.0) / n;
  return report;
}

double log_big(const BigInt& value) {
  if (value <= 0) {
    throw Error(ErrorCode::domain_error, "log_big requires a positive integer");
  }
  const unsigned bits = mp::msb(value);
  if (bits < 1000) {
    return std::log(value.convert_to<double>());
  }
  const unsigned shift = bits - 52;
  const double mantissa = BigInt(value >> shift).convert_to<double>();
  return std::log(mantissa) + static_cast<double>(shift) * std::log(2.0);
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace qcanon
