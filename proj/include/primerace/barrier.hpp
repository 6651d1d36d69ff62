#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "primerace/residues.hpp"

namespace primerace {

struct BarrierZero {
    std::complex<double> rho;      // Re in (1/2, 1), Im > 0
    std::uint32_t multiplicity = 1;
};

// A hypothetical off-critical-line zero system B(chi) with background bound
// beta1: all unlisted upper-half zeros are assumed to have real part <= beta1.
struct BarrierSpec {
    std::uint64_t k = 0;
    std::vector<std::uint32_t> residues;  // the D-tuple being raced
    std::map<std::string, std::vector<BarrierZero>> zeros;  // nonprincipal labels
    double beta1 = 0.5;
    double beta2 = 0.0, beta3 = 0.0;  // envelope of listed real parts
    double error_C = 10.0;            // phase-error constant (per-pair envelope)
    double error_Cprime = 10.0;       // background-term constant

    double sigma_max() const;  // = beta3
    double t_min() const;
    bool empty() const;
    void validate(const CharacterTable& table) const;
};

// The paper's worked mod-5 example: a single zero sigma + it of the character
// with chi(2) = i, racing residues (1,2,3,4).
BarrierSpec builtin_k5(double sigma = 0.75, double t = 1e6);

// Text format: "#barrier", "#modulus k", "#race l1,l2,...", "#beta1 v",
// optional "#constants C C'", then zero-file-style lines
// "<label> <Re rho> <Im rho> <multiplicity>".
BarrierSpec load_barrier(const std::string& path);

// Main term of pi(x,k,l1) - pi(x,k,l2) under the spec, expressed as a ratio
// to the natural scale x^{sigma_max} / (t_min log x), so that arbitrarily
// large x stay inside double range.  error_ratio is the C x^sigma/(t^2 log x)
// phase-error envelope on the same scale; background_ratio the
// C' x^{beta1} log^2 x term.
struct PairMainTerm {
    std::uint32_t l1 = 0, l2 = 0;
    double main_ratio = 0.0;
    double error_ratio = 0.0;
    double background_ratio = 0.0;
};

std::vector<PairMainTerm> dominant_deltas(double log_x, const BarrierSpec& spec,
                                          const CharacterTable& table);

struct PhaseInequalityResult {
    double grid_max = 0.0;     // max over the theta grid of m(theta)
    double worst_theta = 0.0;  // argmax
    double slack = 0.0;        // Lipschitz certification slack 2 * step * sqrt(2)
    bool certified = false;    // grid_max <= -sqrt(0.1) + slack
};

// m(theta) = min(-sin t, -cos t / 2 + sin t / 2, cos t) over [0, 2 pi).
PhaseInequalityResult k5_phase_inequality(double grid_step);

struct ExclusionVerdict {
    std::vector<std::uint32_t> ordering;
    double x_min = 0.0, x_max = 0.0;
    std::uint64_t samples = 0;
    bool passed = false;
    bool inconclusive = false;
    double margin = 0.0;       // min over covered x of the violation margin (ratio units)
    double x_threshold = 0.0;  // exclusion certified for sampled x >= threshold
    std::vector<double> decile_margins;
    double background_ratio_at_xmax = 0.0;  // informational: the asymptotic caveat
};

// Checks that some adjacent difference required positive by `ordering` is
// forced negative by the main term beyond the phase-error envelope, at every
// sampled x (log-spaced) past a threshold.
ExclusionVerdict verify_exclusion(const BarrierSpec& spec, const CharacterTable& table,
                                  const std::vector<std::uint32_t>& ordering,
                                  double x_min, double x_max, std::uint64_t n_samples);

// Which orderings the main-term model visits across the sampled x range.
std::map<std::vector<std::uint32_t>, std::uint64_t> orderings_census(
    const BarrierSpec& spec, const CharacterTable& table, double x_min, double x_max,
    std::uint64_t n_samples);

}  // namespace primerace
