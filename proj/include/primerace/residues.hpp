#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "primerace/rational_turn.hpp"

namespace primerace {

// One cyclic factor of (Z/kZ)*: `generator` has order `order` in the factor,
// lifted so it is 1 modulo every other prime-power component of k.
struct CyclicFactor {
    std::uint64_t prime_power;  // the p^e component this factor belongs to
    std::uint64_t generator;    // residue mod k
    std::uint64_t order;
};

// Exact structure of the multiplicative group mod k: cyclic decomposition via
// CRT over the prime-power factors of k, with canonical generator choices so
// character indices are reproducible across runs.
class Modulus {
  public:
    explicit Modulus(std::uint64_t k);

    std::uint64_t k() const { return k_; }
    std::uint64_t phi() const { return phi_; }
    const std::vector<CyclicFactor>& factors() const { return factors_; }
    const std::vector<std::uint32_t>& reduced_residues() const { return reduced_; }
    const std::vector<std::uint32_t>& prime_divisors() const { return prime_divisors_; }

    bool is_reduced(std::uint64_t l) const;
    // Position of l in reduced_residues(); l must be reduced.
    std::size_t index_of(std::uint64_t l) const;
    // Exponent tuple (x_1,...,x_t) with l = prod g_i^{x_i} mod k.
    const std::vector<std::uint32_t>& discrete_log(std::uint64_t l) const;

  private:
    std::uint64_t k_ = 0;
    std::uint64_t phi_ = 0;
    std::vector<CyclicFactor> factors_;
    std::vector<std::uint32_t> reduced_;
    std::vector<std::uint32_t> prime_divisors_;
    std::vector<std::int32_t> position_;               // residue -> index or -1
    std::vector<std::vector<std::uint32_t>> dlog_;     // per reduced residue
};

// A Dirichlet character mod k, identified by its exponent vector against the
// modulus' cyclic factors.  Values are exact rational turns.
class Character {
  public:
    Character(std::shared_ptr<const Modulus> m, std::vector<std::uint32_t> exponents);

    const Modulus& modulus() const { return *m_; }
    const std::vector<std::uint32_t>& exponents() const { return exponents_; }

    RationalTurn value(std::uint64_t l) const;                 // l must be reduced
    std::complex<double> cvalue(std::uint64_t l) const;        // 0 for non-reduced l
    std::complex<double> cvalue_conj(std::uint64_t l) const;

    bool is_principal() const { return principal_; }
    bool is_real() const { return real_; }
    std::uint64_t conductor() const { return conductor_; }

    // Stable label "<k>:<e1>.<e2>...." used in zero files and reports.
    std::string label() const;

    Character conjugate() const;

  private:
    std::shared_ptr<const Modulus> m_;
    std::vector<std::uint32_t> exponents_;
    std::vector<RationalTurn> turns_;  // indexed like reduced_residues()
    bool principal_ = false;
    bool real_ = false;
    std::uint64_t conductor_ = 1;
};

// All phi(k) characters mod k, principal first, then lexicographic by
// exponent vector.
class CharacterTable {
  public:
    explicit CharacterTable(std::uint64_t k);

    const Modulus& modulus() const { return *m_; }
    std::shared_ptr<const Modulus> modulus_ptr() const { return m_; }
    const std::vector<Character>& all() const { return chars_; }
    std::size_t size() const { return chars_.size(); }

    const Character& principal() const { return chars_.front(); }
    // Throws DataError if no character carries this label.
    const Character& by_label(const std::string& label) const;

  private:
    std::shared_ptr<const Modulus> m_;
    std::vector<Character> chars_;
};

// N_k(l) = #{u in [1,k] : gcd(u,k)=1, u^2 = l mod k} for every reduced l.
struct SquareRootCount {
    std::shared_ptr<const Modulus> modulus;
    std::vector<std::uint32_t> counts;  // indexed like reduced_residues()

    std::uint32_t at(std::uint64_t l) const;
};

Modulus build_modulus(std::uint64_t k);
std::vector<Character> characters(const Modulus& m);
SquareRootCount square_root_counts(const Modulus& m);

// max over character pairs of |sum_l chi(l) conj(chi'(l)) - phi(k) [chi=chi']|,
// evaluated in floating point from the exact turn representation.
double character_orthogonality_defect(const Modulus& m);

}  // namespace primerace
