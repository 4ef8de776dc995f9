#ifndef QCANON_ENSEMBLES_HPP
#define QCANON_ENSEMBLES_HPP

// Canonical ensembles over finite discrete spectra, in two flavours that
// share one constraint: the degeneracy-weighted mean of the observable is
// pinned to a target abar.
//
//  * Boltzmann-Gibbs: p(m) proportional to exp(-beta (a(m) - abar)), with
//    entropy S = ln Ztilde.
//  * q-deformed: p_q(m) proportional to e_q(-beta_star (a(m) - abar)), with
//    the constraint taken as the escort (normalized q-) expectation. The
//    self-consistent solution satisfies beta = beta_star * c_q,
//    c_q = sum g p^q, sum g p^q = Ztilde^(1-q) and S_q = ln_q Ztilde.

#include <cstdint>

#include "qcanon/qmath.hpp"
#include "qcanon/spectrum.hpp"

namespace qcanon {

struct BGSolution {
  double beta = 0.0;
  double abar = 0.0;
  double z = 0.0;       // sum_m g exp(-beta a)
  double ztilde = 0.0;  // z * exp(beta abar)
  Distribution dist;
  double entropy = 0.0;  // ln ztilde
};

struct QCanonicalSolution {
  double q = 1.0;
  double beta = 0.0;       // beta_star * cq
  double beta_star = 0.0;  // slope of the q-exponential factor
  double cq = 0.0;         // sum_m g p^q
  double ztilde = 0.0;     // sum_m g e_q(-beta_star (a - abar))
  double abar = 0.0;
  Distribution dist;    // p_q
  Distribution escort;  // P_q = p^q / sum g p^q
  double q_mean = 0.0;  // escort expectation of the energy
  double entropy = 0.0; // ln_q ztilde
};

// Residuals of the algebraic identities a self-consistent solution obeys,
// each relative to the larger magnitude involved (floored at 1e-12). A
// converged solution keeps all of them below 1e-10; a hand-built
// distribution simply reports larger numbers, nothing throws.
struct IdentityReport {
  double beta_decomposition = 0.0;   // beta vs beta_star * cq
  double entropy_vs_qlog_z = 0.0;    // S_q vs ln_q Ztilde
  double escort_norm_vs_z = 0.0;     // sum g p^q vs Ztilde^(1-q)
  double cq_recomputed = 0.0;        // stored cq vs sum g p^q
  double entropy_vs_tsallis = 0.0;   // S_q vs (sum g p^q - 1)/(1-q)
  double worst() const;
};

struct SolveOptions {
  // |escort mean - abar| tolerance, in units of the spectrum energy range.
  double mean_tolerance = 1e-10;
};

// p(m) proportional to exp(-beta a(m)); abar is the resulting mean.
// Exponentials are shifted by the dominant energy end, so any finite beta
// is safe.
BGSolution bg_from_beta(const Spectrum& spec, double beta);

// Solves for the beta whose mean equals abar (open interval feasibility).
BGSolution bg_from_mean(const Spectrum& spec, double abar);

// -sum_m g p ln p; p == 0 terms contribute nothing.
double shannon_entropy(const Distribution& dist);

// (sum_m g p^q - 1)/(1 - q); Shannon at q ~ 1.
double tsallis_entropy(const Distribution& dist, DeformationParameter q);

// P(m) = p(m)^q / sum_m g p^q.
Distribution escort(const Distribution& dist, DeformationParameter q);

// Escort-weighted mean of the energy (the normalized q-expectation).
double q_mean(const Distribution& dist, DeformationParameter q, const Spectrum& spec);

// p_q(m) = e_q(-beta_star (a(m) - center)) / Ztilde_q. Configurations on
// the wrong side of the q < 1 cutoff stay in the state space with
// probability exactly zero.
Distribution q_canonical_given(const Spectrum& spec, DeformationParameter q, double beta_star,
                               double center);

// Self-consistent generalized ensemble: finds beta_star such that the
// escort mean of q_canonical_given(spec, q, beta_star, abar) equals abar,
// then assembles every derived quantity.
QCanonicalSolution solve_q_canonical(const Spectrum& spec, DeformationParameter q, double abar,
                                     const SolveOptions& options = {});

// Central finite difference of Ztilde_q over beta_star at fixed abar,
// scaled by energy_range/Ztilde_q and signed to track q_mean - abar. Zero
// at a stationary (self-consistent) point.
double stationarity_residual(const QCanonicalSolution& sol, const Spectrum& spec, double step);

IdentityReport verify_identities(const QCanonicalSolution& sol);

// sum_m g p^q (support-restricted).
double escort_normalizer(const Distribution& dist, DeformationParameter q);

}  // namespace qcanon

#endif
