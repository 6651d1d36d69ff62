#include "primerace/residues.hpp"

#include <algorithm>
#include <cmath>

#include "primerace/errors.hpp"

namespace primerace {
namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> f;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            unsigned e = 0;
            while (n % p == 0) { n /= p; ++e; }
            f.emplace_back(p, e);
        }
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

std::uint64_t euler_phi_prime_power(std::uint64_t p, unsigned e) {
    std::uint64_t q = 1;
    for (unsigned i = 0; i + 1 < e; ++i) q *= p;
    return q * (p - 1);
}

std::uint64_t element_order(std::uint64_t g, std::uint64_t m, std::uint64_t group_order) {
    // order divides group_order; strip prime factors greedily
    std::uint64_t ord = group_order;
    for (auto [p, e] : factorize(group_order)) {
        (void)e;
        while (ord % p == 0 && powmod(g, ord / p, m) == 1) ord /= p;
    }
    return ord;
}

// Smallest primitive root mod p^e for odd prime p.
std::uint64_t primitive_root_odd(std::uint64_t p, unsigned e) {
    std::uint64_t pe = 1;
    for (unsigned i = 0; i < e; ++i) pe *= p;
    const std::uint64_t phi = euler_phi_prime_power(p, e);
    for (std::uint64_t g = 2; g < pe; ++g) {
        if (g % p == 0) continue;
        if (element_order(g, pe, phi) == phi) return g;
    }
    throw Error("no primitive root found (unreachable for odd prime powers)");
}

// x with x = a mod m1 and x = b mod m2, gcd(m1,m2)=1.
std::uint64_t crt_pair(std::uint64_t a, std::uint64_t m1, std::uint64_t b, std::uint64_t m2) {
    // inverse of m1 mod m2 by exponentiation is unavailable in general;
    // extended Euclid instead
    std::int64_t t0 = 0, t1 = 1;
    std::uint64_t r0 = m2, r1 = m1 % m2;
    while (r1 != 0) {
        const std::uint64_t q = r0 / r1;
        std::uint64_t r2 = r0 - q * r1;
        std::int64_t t2 = t0 - static_cast<std::int64_t>(q) * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    std::int64_t inv = t0 % static_cast<std::int64_t>(m2);
    if (inv < 0) inv += static_cast<std::int64_t>(m2);
    // x = a + m1 * ((b - a) * inv mod m2)
    std::uint64_t diff = (b + m2 - a % m2) % m2;
    std::uint64_t k = mulmod(diff, static_cast<std::uint64_t>(inv), m2);
    return a + m1 * k;
}

}  // namespace

Modulus::Modulus(std::uint64_t k) : k_(k) {
    if (k < 3) throw InvalidArgumentError("modulus must be >= 3");

    auto pfac = factorize(k);
    std::sort(pfac.begin(), pfac.end(), [](auto a, auto b) {
        std::uint64_t pa = 1, pb = 1;
        for (unsigned i = 0; i < a.second; ++i) pa *= a.first;
        for (unsigned i = 0; i < b.second; ++i) pb *= b.first;
        return pa < pb;
    });

    phi_ = 1;
    for (auto [p, e] : pfac) {
        phi_ *= euler_phi_prime_power(p, e);
        prime_divisors_.push_back(static_cast<std::uint32_t>(p));
    }

    // Generators of each prime-power component, lifted to mod k via CRT
    // (g mod p^e as chosen, g = 1 mod k/p^e).
    for (auto [p, e] : pfac) {
        std::uint64_t pe = 1;
        for (unsigned i = 0; i < e; ++i) pe *= p;
        const std::uint64_t rest = k / pe;

        auto lift = [&](std::uint64_t g_pe) {
            return rest == 1 ? g_pe % k : crt_pair(1 % rest, rest, g_pe, pe) % k;
        };

        if (p == 2) {
            if (e == 1) continue;  // trivial component
            if (e == 2) {
                factors_.push_back({pe, lift(3), 2});
            } else {
                factors_.push_back({pe, lift(pe - 1), 2});  // -1 mod 2^e
                factors_.push_back({pe, lift(3), pe / 4});  // order 2^{e-2}
            }
        } else {
            factors_.push_back({pe, lift(primitive_root_odd(p, e)), euler_phi_prime_power(p, e)});
        }
    }

    position_.assign(k, -1);
    for (std::uint64_t l = 1; l < k; ++l) {
        if (std::gcd(l, k) == 1) {
            position_[l] = static_cast<std::int32_t>(reduced_.size());
            reduced_.push_back(static_cast<std::uint32_t>(l));
        }
    }
    if (reduced_.size() != phi_) throw Error("phi mismatch in modulus construction");

    // Discrete-log table by odometer enumeration over exponent tuples.
    dlog_.assign(phi_, {});
    std::vector<std::uint32_t> exps(factors_.size(), 0);
    std::uint64_t value = 1 % k;
    std::uint64_t filled = 0;
    while (true) {
        auto& slot = dlog_[static_cast<std::size_t>(position_[value])];
        if (!slot.empty()) throw Error("cyclic decomposition is not a direct product");
        slot = exps;
        ++filled;
        // odometer increment, multiplying the running value as we go
        std::size_t i = 0;
        for (; i < factors_.size(); ++i) {
            value = mulmod(value, factors_[i].generator, k);
            if (++exps[i] < factors_[i].order) break;
            // wrapped: value is back to generator^0 in this coordinate
            exps[i] = 0;
        }
        if (i == factors_.size()) break;
    }
    if (filled != phi_) throw Error("group enumeration incomplete");
}

bool Modulus::is_reduced(std::uint64_t l) const {
    return l >= 1 && l < k_ && position_[l] >= 0;
}

std::size_t Modulus::index_of(std::uint64_t l) const {
    if (!is_reduced(l)) throw InvalidArgumentError("residue not reduced mod k");
    return static_cast<std::size_t>(position_[l]);
}

const std::vector<std::uint32_t>& Modulus::discrete_log(std::uint64_t l) const {
    return dlog_[index_of(l)];
}

Character::Character(std::shared_ptr<const Modulus> m, std::vector<std::uint32_t> exponents)
    : m_(std::move(m)), exponents_(std::move(exponents)) {
    const auto& factors = m_->factors();
    if (exponents_.size() != factors.size())
        throw InvalidArgumentError("exponent vector length mismatch");

    turns_.reserve(m_->phi());
    principal_ = true;
    real_ = true;
    for (std::uint32_t l : m_->reduced_residues()) {
        const auto& x = m_->discrete_log(l);
        RationalTurn t;  // zero turn
        for (std::size_t i = 0; i < factors.size(); ++i) {
            t = t + RationalTurn::of(
                        static_cast<std::int64_t>(exponents_[i]) * x[i],
                        static_cast<std::int64_t>(factors[i].order));
        }
        if (!t.is_one()) principal_ = false;
        if (!t.is_real()) real_ = false;
        turns_.push_back(t);
    }

    // Conductor: smallest divisor d of k with chi trivial on {a = 1 mod d}.
    const std::uint64_t k = m_->k();
    conductor_ = k;
    for (std::uint64_t d = 1; d <= k; ++d) {
        if (k % d != 0) continue;
        bool factors_through = true;
        for (std::size_t i = 0; i < turns_.size() && factors_through; ++i) {
            if (m_->reduced_residues()[i] % d == 1 % d && !turns_[i].is_one())
                factors_through = false;
        }
        if (factors_through) { conductor_ = d; break; }
    }
}

RationalTurn Character::value(std::uint64_t l) const {
    return turns_[m_->index_of(l)];
}

std::complex<double> Character::cvalue(std::uint64_t l) const {
    if (!m_->is_reduced(l % m_->k())) return {0.0, 0.0};
    return turns_[m_->index_of(l % m_->k())].to_complex();
}

std::complex<double> Character::cvalue_conj(std::uint64_t l) const {
    return std::conj(cvalue(l));
}

std::string Character::label() const {
    std::string s = std::to_string(m_->k()) + ":";
    if (exponents_.empty()) return s + "0";
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(exponents_[i]);
    }
    return s;
}

Character Character::conjugate() const {
    std::vector<std::uint32_t> neg(exponents_.size());
    const auto& factors = m_->factors();
    for (std::size_t i = 0; i < neg.size(); ++i)
        neg[i] = exponents_[i] == 0
                     ? 0
                     : static_cast<std::uint32_t>(factors[i].order - exponents_[i]);
    return Character(m_, std::move(neg));
}

CharacterTable::CharacterTable(std::uint64_t k)
    : m_(std::make_shared<Modulus>(k)) {
    const auto& factors = m_->factors();
    std::vector<std::uint32_t> exps(factors.size(), 0);
    chars_.reserve(m_->phi());
    while (true) {
        chars_.emplace_back(m_, exps);
        std::size_t i = factors.size();
        while (i > 0) {
            --i;
            if (++exps[i] < factors[i].order) break;
            exps[i] = 0;
            if (i == 0) { i = SIZE_MAX; break; }
        }
        if (factors.empty() || i == SIZE_MAX) break;
    }
    if (chars_.size() != m_->phi()) throw Error("character enumeration incomplete");
}

const Character& CharacterTable::by_label(const std::string& label) const {
    for (const auto& c : chars_)
        if (c.label() == label) return c;
    throw DataError("unknown character label: " + label);
}

std::uint32_t SquareRootCount::at(std::uint64_t l) const {
    return counts[modulus->index_of(l)];
}

Modulus build_modulus(std::uint64_t k) { return Modulus(k); }

std::vector<Character> characters(const Modulus& m) {
    CharacterTable table(m.k());
    return table.all();
}

SquareRootCount square_root_counts(const Modulus& m) {
    SquareRootCount out;
    out.modulus = std::make_shared<Modulus>(m);
    out.counts.assign(m.phi(), 0);
    for (std::uint32_t u : m.reduced_residues()) {
        const std::uint64_t sq = mulmod(u, u, m.k());
        ++out.counts[m.index_of(sq)];
    }
    return out;
}

double character_orthogonality_defect(const Modulus& m) {
    CharacterTable table(m.k());
    const auto& chars = table.all();
    const double phi = static_cast<double>(m.phi());
    double worst = 0.0;
    for (std::size_t a = 0; a < chars.size(); ++a) {
        for (std::size_t b = a; b < chars.size(); ++b) {
            std::complex<double> sum = 0.0;
            for (std::uint32_t l : m.reduced_residues())
                sum += chars[a].cvalue(l) * std::conj(chars[b].cvalue(l));
            if (a == b) sum -= phi;
            worst = std::max(worst, std::abs(sum));
        }
    }
    return worst;
}

}  // namespace primerace
