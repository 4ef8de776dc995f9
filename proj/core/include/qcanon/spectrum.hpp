#ifndef QCANON_SPECTRUM_HPP
#define QCANON_SPECTRUM_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace qcanon {

struct SpectrumEntry {
  std::string label;
  double energy = 0.0;
  std::int64_t degeneracy = 1;
};

// Finite discrete spectrum: configurations with energies and degeneracies.
// Labels are unique, degeneracies >= 1, energies finite. A single entry is
// allowed; solvers additionally require at least two distinct energies.
class Spectrum {
 public:
  explicit Spectrum(std::vector<SpectrumEntry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const SpectrumEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<SpectrumEntry>& entries() const noexcept { return entries_; }

  double min_energy() const noexcept { return min_energy_; }
  double max_energy() const noexcept { return max_energy_; }
  double energy_range() const noexcept { return max_energy_ - min_energy_; }
  std::int64_t microstate_count() const noexcept { return microstates_; }
  std::size_t distinct_energy_count() const noexcept { return distinct_energies_; }

  std::size_t index_of(const std::string& label) const;  // throws domain_error

 private:
  std::vector<SpectrumEntry> entries_;
  double min_energy_ = 0.0;
  double max_energy_ = 0.0;
  std::int64_t microstates_ = 0;
  std::size_t distinct_energies_ = 0;
};

// Probability assignment over the configurations of one spectrum. probs[i]
// is the probability of a single microstate of configuration i, so every
// sum over configurations carries the degeneracy weight:
// sum_i degeneracy[i] * probs[i] == 1.
struct Distribution {
  std::vector<std::string> labels;
  std::vector<std::int64_t> degeneracy;
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double total_mass() const noexcept;
};

// Builds a Distribution aligned with spec and validates normalization.
Distribution make_distribution(const Spectrum& spec, std::vector<double> probs);

// Throws invariant_violation when mass deviates from 1 beyond 1e-12 or a
// probability leaves [0, 1].
void validate_distribution(const Distribution& dist);

// Throws domain_error when dist was not built over spec (label mismatch).
void require_aligned(const Distribution& dist, const Spectrum& spec);

// Total variation distance (1/2) sum_m g(m) |p(m) - r(m)|.
double total_variation(const Distribution& a, const Distribution& b);

}  // namespace qcanon

#endif
