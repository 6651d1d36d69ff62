#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace primerace {

struct ZeroRecord {
    double beta = 0.5;
    double gamma = 0.0;
    std::uint32_t multiplicity = 1;
};

// Per-character tables of nontrivial L-function zeros with a completeness
// declaration: every zero with 0 < gamma <= t_max is present.  Entries with
// gamma = 0 mark zeros on the real segment (beta != 1/2) or at the central
// point (beta = 1/2, the m(1/2,chi) multiplicities).
class ZeroSet {
  public:
    std::uint64_t modulus_k = 0;
    double t_max = 0.0;
    std::string source;
    std::map<std::string, std::vector<ZeroRecord>> per_character;  // sorted by gamma
    std::vector<std::string> warnings;

    const std::vector<ZeroRecord>& zeros_for(const std::string& label) const;
    std::uint32_t central_multiplicity(const std::string& label) const;
    bool has_offline_zeros() const;  // any beta != 1/2 with gamma > 0

    // Distinct positive ordinates across all characters, ascending.
    std::vector<double> merged_ordinates() const;

    double max_gamma() const;
};

ZeroSet parse_zeros(std::istream& in, const std::string& name);
ZeroSet load_zeros(const std::string& path);
void save_zeros(const ZeroSet& zs, const std::string& path);

// Consistency with Haselgrove's condition up to height A: no real-segment or
// central zeros (gamma = 0 entries), and no off-line zeros with gamma <= A.
bool haselgrove_check(const ZeroSet& zs, double A);

struct IndependenceViolation {
    std::vector<int> coefficients;
    double sum = 0.0;
    double nearest = 0.0;
    double distance = 0.0;
};

struct IndependenceVerdict {
    std::vector<std::size_t> subset;
    int bound_N = 1;
    double tolerance = 0.0;
    std::uint64_t combinations_checked = 0;
    std::vector<IndependenceViolation> violations;
    bool passed = false;
};

// Diamond N-independence of the selected ordinates (indices into
// merged_ordinates()): no integer combination with |n_r| <= N and
// sum |n_r| >= 2 lands within `tol` of an element of the merged ordinate set.
IndependenceVerdict n_independence(const ZeroSet& zs,
                                   const std::vector<std::size_t>& subset,
                                   int N, double tol);

struct DensityProfileEntry {
    std::string label;
    std::uint64_t count = 0;         // zeros with 0 < gamma <= T (with multiplicity)
    double ratio_to_TlogT = 0.0;
};

std::vector<DensityProfileEntry> zero_density_profile(const ZeroSet& zs, double T);

}  // namespace primerace
