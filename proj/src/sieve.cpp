#include "primerace/sieve.hpp"

#include <algorithm>

namespace primerace {
namespace sieve_detail {

std::vector<std::uint32_t> odd_primes_upto(std::uint32_t n) {
    std::vector<std::uint32_t> out;
    if (n < 3) return out;
    std::vector<std::uint8_t> composite((n - 1) / 2 + 1, 0);  // index i -> 2i+1
    for (std::uint32_t i = 1; (2 * i + 1) * std::uint64_t(2 * i + 1) <= n; ++i) {
        if (composite[i]) continue;
        const std::uint32_t p = 2 * i + 1;
        for (std::uint64_t j = (std::uint64_t(p) * p - 1) / 2; j < composite.size(); j += p)
            composite[j] = 1;
    }
    for (std::uint32_t i = 1; 2 * i + 1 <= n; ++i)
        if (!composite[i]) out.push_back(2 * i + 1);
    return out;
}

const std::vector<std::uint32_t>& wheel_primes(Wheel wheel) {
    static const std::vector<std::uint32_t> none{};
    static const std::vector<std::uint32_t> w30{3, 5};
    static const std::vector<std::uint32_t> w210{3, 5, 7};
    switch (wheel) {
        case Wheel::mod30: return w30;
        case Wheel::mod210: return w210;
        default: return none;
    }
}

std::vector<std::uint8_t> build_pattern(Wheel wheel) {
    const auto& wp = wheel_primes(wheel);
    if (wp.empty()) return {};
    std::size_t period = 1;  // in odd indices; odd period -> byte period = period
    for (auto p : wp) period *= p;
    std::vector<std::uint8_t> pat(period, 0);
    for (auto p : wp) {
        // odd index i holds n = 2i+1; p | n  <=>  i = (p-1)/2 (mod p)
        for (std::size_t i = (p - 1) / 2; i < 8 * period; i += p)
            pat[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
    }
    return pat;
}

void fill_presieve(std::vector<std::uint8_t>& seg, std::uint64_t start_byte,
                   const std::vector<std::uint8_t>& pattern) {
    if (pattern.empty()) {
        std::fill(seg.begin(), seg.end(), 0);
        return;
    }
    const std::size_t period = pattern.size();
    std::size_t off = static_cast<std::size_t>(start_byte % period);
    std::size_t j = 0;
    while (j < seg.size()) {
        const std::size_t take = std::min(period - off, seg.size() - j);
        std::memcpy(seg.data() + j, pattern.data() + off, take);
        j += take;
        off = 0;
    }
}

void sieve_segment(std::vector<std::uint8_t>& seg, std::uint64_t lo,
                   std::uint64_t hi, const std::vector<std::uint32_t>& base,
                   const std::vector<std::uint8_t>& pattern, Wheel wheel) {
    const std::uint64_t start_byte = (lo - 1) / 2 / 8;
    fill_presieve(seg, start_byte, pattern);

    const std::uint64_t nslots = seg.size() * 8;
    const std::uint64_t seg_end = lo + 2 * (nslots - 1);  // last odd covered

    if (lo == 1) seg[0] |= 1;  // n = 1 is not prime

    // the pattern marks p*1 = p itself; restore primality of wheel primes
    for (std::uint32_t p : wheel_primes(wheel)) {
        if (p >= lo && p <= seg_end) {
            const std::uint64_t i = (p - lo) / 2;
            seg[i >> 3] &= static_cast<std::uint8_t>(~(1u << (i & 7)));
        }
    }

    const auto& wp = wheel_primes(wheel);
    for (std::uint32_t p : base) {
        const std::uint64_t p2 = std::uint64_t{p} * p;
        if (p2 > seg_end) break;
        if (!wp.empty() && p <= wp.back() &&
            std::find(wp.begin(), wp.end(), p) != wp.end())
            continue;  // already in the presieve pattern
        // first odd multiple of p that is >= max(lo, p^2)
        std::uint64_t start = p2;
        if (start < lo) {
            std::uint64_t q = (lo + p - 1) / p;
            if ((q & 1) == 0) ++q;
            start = q * p;
        }
        for (std::uint64_t i = (start - lo) / 2; i < nslots; i += p)
            seg[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
    }
    (void)hi;
}

}  // namespace sieve_detail

std::uint64_t pi_of(std::uint64_t x, SieveConfig cfg) {
    if (x < 2) return 0;
    cfg.limit = x;
    cfg.start_segment = 0;
    cfg.validate();
    namespace d = sieve_detail;

    const std::uint64_t span = std::uint64_t{cfg.segment_bytes} * 16;
    const std::uint32_t sqrt_limit =
        static_cast<std::uint32_t>(std::sqrt(static_cast<double>(x)) + 2);
    const auto base = d::odd_primes_upto(sqrt_limit);
    const auto pattern = d::build_pattern(cfg.wheel);
    const std::uint64_t n_segments = (x - 1) / span + 1;

    std::uint64_t count = 1;  // the prime 2
    std::vector<std::uint8_t> seg(cfg.segment_bytes);
    for (std::uint64_t s = 0; s < n_segments; ++s) {
        const std::uint64_t lo = s * span + 1;
        const std::uint64_t hi = std::min(x, (s + 1) * span);
        d::sieve_segment(seg, lo, hi, base, pattern, cfg.wheel);
        const std::size_t nwords = cfg.segment_bytes / 8;
        const std::uint64_t full_slots = (hi - lo) / 2 + 1;  // odds <= hi
        for (std::size_t w = 0; w < nwords; ++w) {
            std::uint64_t word;
            std::memcpy(&word, seg.data() + w * 8, 8);
            word = ~word;
            const std::uint64_t base_slot = w * 64;
            if (base_slot + 64 <= full_slots) {
                count += static_cast<std::uint64_t>(std::popcount(word));
            } else {
                if (base_slot >= full_slots) break;
                const std::uint64_t keep = full_slots - base_slot;
                word &= keep >= 64 ? ~0ull : ((1ull << keep) - 1);
                count += static_cast<std::uint64_t>(std::popcount(word));
                break;
            }
        }
    }
    return count;
}

}  // namespace primerace
