#include "qcanon/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qcanon/errors.hpp"

namespace qcanon {

Spectrum::Spectrum(std::vector<SpectrumEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw Error(ErrorCode::domain_error, "spectrum must contain at least one configuration");
  }
  std::set<std::string> seen;
  std::set<double> energies;
  min_energy_ = entries_.front().energy;
  max_energy_ = entries_.front().energy;
  for (const auto& e : entries_) {
    if (!std::isfinite(e.energy)) {
      throw Error(ErrorCode::domain_error, "spectrum energy for '" + e.label + "' is not finite");
    }
    if (e.degeneracy < 1) {
      throw Error(ErrorCode::domain_error, "degeneracy for '" + e.label + "' must be >= 1");
    }
    if (!seen.insert(e.label).second) {
      throw Error(ErrorCode::domain_error, "duplicate configuration label '" + e.label + "'");
    }
    energies.insert(e.energy);
    min_energy_ = std::min(min_energy_, e.energy);
    max_energy_ = std::max(max_energy_, e.energy);
    microstates_ += e.degeneracy;
  }
  distinct_energies_ = energies.size();
}

std::size_t Spectrum::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].label == label) return i;
  }
  throw Error(ErrorCode::domain_error, "no configuration labelled '" + label + "'");
}

double Distribution::total_mass() const noexcept {
  double mass = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    mass += static_cast<double>(degeneracy[i]) * probs[i];
  }
  return mass;
}

Distribution make_distribution(const Spectrum& spec, std::vector<double> probs) {
  if (probs.size() != spec.size()) {
    throw Error(ErrorCode::domain_error, "probability vector does not match spectrum size");
  }
  Distribution dist;
  dist.labels.reserve(spec.size());
  dist.degeneracy.reserve(spec.size());
  for (const auto& e : spec.entries()) {
    dist.labels.push_back(e.label);
    dist.degeneracy.push_back(e.degeneracy);
  }
  dist.probs = std::move(probs);
  validate_distribution(dist);
  return dist;
}

void validate_distribution(const Distribution& dist) {
  if (dist.probs.size() != dist.labels.size() || dist.probs.size() != dist.degeneracy.size()) {
    throw Error(ErrorCode::invariant_violation, "distribution field lengths disagree");
  }
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    const double p = dist.probs[i];
    if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(p)) {
      std::ostringstream msg;
      msg << "probability for '" << dist.labels[i] << "' outside [0,1]: " << p;
      throw Error(ErrorCode::invariant_violation, msg.str());
    }
  }
  const double mass = dist.total_mass();
  if (std::abs(mass - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "degeneracy-weighted mass is " << mass << ", expected 1 within 1e-12";
    throw Error(ErrorCode::invariant_violation, msg.str());
  }
}

void require_aligned(const Distribution& dist, const Spectrum& spec) {
  if (dist.size() != spec.size()) {
    throw Error(ErrorCode::domain_error, "distribution and spectrum sizes differ");
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (dist.labels[i] != spec[i].label) {
      throw Error(ErrorCode::domain_error,
                  "distribution label '" + dist.labels[i] + "' does not match spectrum label '" +
                      spec[i].label + "'");
    }
  }
}

double total_variation(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::domain_error, "total_variation requires equal-size distributions");
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    tv += static_cast<double>(a.degeneracy[i]) * std::abs(a.probs[i] - b.probs[i]);
  }
  return 0.5 * tv;
}

}  // namespace qcanon
