#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "primerace/residues.hpp"
#include "primerace/sieve.hpp"
#include "primerace/zeros.hpp"

namespace primerace {

struct DensityEstimate {
    enum class Method { empirical_logmeasure, gsh_monte_carlo };
    std::vector<std::uint32_t> ordering;
    Method method = Method::gsh_monte_carlo;
    double delta_hat = 0.0;
    double stderr_est = 0.0;
    std::uint64_t samples = 0;
    double X_or_T = 0.0;
    std::uint64_t seed = 0;
    // empirical extras: running min/max of the trailing-window value and the
    // raw log-measure of tie intervals
    double delta_lower = 0.0;
    double delta_upper = 0.0;
    double tie_measure = 0.0;
    std::string convention;
};

// Limiting-distribution sampler for the normalized race vector
//   E_j = (log x / sqrt x)(phi(k) pi(x,k,l_j) - pi(x)),
// built from the explicit-formula expansion with one independent uniform
// phase per listed zero (the rational-independence hypothesis turned into a
// sampling rule).  Mean shift per residue is 1 - N_k(l_j).
class GshModel {
  public:
    GshModel(const ZeroSet& zs, const CharacterTable& table,
             const std::vector<std::uint32_t>& residues, double T,
             bool fejer_weights = true);

    std::size_t zero_count() const { return n_zeros_; }
    std::size_t residue_count() const { return bias_.size(); }
    const std::vector<double>& bias() const { return bias_; }

    // one draw of (E_1,...,E_r); deterministic in (seed, sample_index)
    void sample(std::uint64_t seed, std::uint64_t sample_index,
                std::vector<double>& out) const;

  private:
    std::size_t n_zeros_ = 0;
    std::vector<double> bias_;
    std::vector<double> re_alpha_;  // zero-major [z * r + j]
    std::vector<double> im_alpha_;
    std::vector<std::uint64_t> zero_hash_;
};

// Monte Carlo logarithmic density of the strict ordering
// pi(.,k,ordering[0]) > pi(.,k,ordering[1]) > ... under the sampled limit law.
DensityEstimate gsh_density(const ZeroSet& zs, const CharacterTable& table,
                            const std::vector<std::uint32_t>& residues,
                            const std::vector<std::uint32_t>& ordering, double T,
                            std::uint64_t n_samples, std::uint64_t seed,
                            bool fejer_weights = true);

// Exact step-function log-measure of the ordering over [2, X] from a sieve run.
DensityEstimate empirical_log_density(std::uint64_t k,
                                      const std::vector<std::uint32_t>& residues,
                                      const std::vector<std::uint32_t>& ordering,
                                      std::uint64_t X, SieveConfig cfg = {});

// Rubinstein-Sarnak unbiased tuples: r=2 with N_k(l1)=N_k(l2), or r=3 with
// l2 = l1 g, l3 = l1 g^2 for some g with g^3 = 1 mod k.
bool unbiased_predicate(std::uint64_t k, const std::vector<std::uint32_t>& residues);

// Empirical tail fractions P(|E| > R) for each R in the grid.
std::vector<std::pair<double, double>> tail_probe(
    const ZeroSet& zs, const CharacterTable& table,
    const std::vector<std::uint32_t>& residues, const std::vector<double>& R_grid,
    std::uint64_t n_samples, std::uint64_t seed, double T);

}  // namespace primerace
