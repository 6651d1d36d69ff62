#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

#include "primerace/errors.hpp"

namespace primerace {

enum class Wheel { none, mod30, mod210 };

struct SieveConfig {
    std::uint64_t limit = 2;
    std::size_t segment_bytes = std::size_t{1} << 18;  // odd-number bitmap bytes
    Wheel wheel = Wheel::mod30;
    unsigned thread_count = 1;
    std::uint64_t residue_modulus = 0;  // fill PrimeEvent::residue when nonzero
    std::uint64_t start_segment = 0;    // resume from this segment index

    void validate() const {
        if (limit < 2) throw InvalidArgumentError("sieve limit must be >= 2");
        if (segment_bytes < (std::size_t{1} << 14) || segment_bytes % 8 != 0)
            throw InvalidArgumentError("segment_bytes must be >= 2^14 and a multiple of 8");
        if (thread_count < 1) throw InvalidArgumentError("thread_count must be >= 1");
    }
};

struct PrimeEvent {
    std::uint64_t n;
    enum class Kind : std::uint8_t { prime, prime_power } kind;
    std::uint32_t exponent;  // m with n = p^m (1 for primes)
    double lambda_weight;    // log p
    std::uint32_t residue;   // n mod residue_modulus, 0 if not attached
};

struct SieveSummary {
    std::uint64_t prime_count = 0;
    std::uint64_t max_n = 0;
    std::uint64_t segments_completed = 0;
};

namespace sieve_detail {

// Odd primes <= n by a plain array sieve (used for base primes and as the
// independent small-scale path behind pi_of for tiny limits).
std::vector<std::uint32_t> odd_primes_upto(std::uint32_t n);

// Composite-bit pattern of the wheel primes over odd indices, tiled to
// `bytes` starting at absolute odd-index `start_index`.
void fill_presieve(std::vector<std::uint8_t>& seg, std::uint64_t start_index,
                   const std::vector<std::uint8_t>& pattern);

std::vector<std::uint8_t> build_pattern(Wheel wheel);
const std::vector<std::uint32_t>& wheel_primes(Wheel wheel);

// Sieve one segment of odd numbers [lo, lo + 16*bytes) with lo odd.
// seg bits: 1 = composite.  base = odd sieving primes (ascending).
void sieve_segment(std::vector<std::uint8_t>& seg, std::uint64_t lo,
                   std::uint64_t hi, const std::vector<std::uint32_t>& base,
                   const std::vector<std::uint8_t>& pattern, Wheel wheel);

struct PowerStream {
    // min-heap of upcoming prime powers p^m (m >= 2), merged into the event
    // stream so delivery stays globally ascending in n
    struct Entry {
        std::uint64_t value;
        std::uint64_t prime;
        std::uint32_t exponent;
        bool operator>(const Entry& o) const { return value > o.value; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

    PowerStream(const std::vector<std::uint32_t>& base_primes, std::uint64_t limit,
                std::uint64_t resume_from) {
        limit_ = limit;
        auto push_first = [&](std::uint64_t p) {
            std::uint64_t v = p * p;
            std::uint32_t m = 2;
            while (v < resume_from && v <= limit / p) { v *= p; ++m; }
            if (v <= limit && v >= resume_from) heap.push({v, p, m});
        };
        push_first(2);
        for (std::uint32_t p : base_primes) {
            if (std::uint64_t{p} * p > limit) break;
            push_first(p);
        }
    }

    template <class Emit>
    void drain_below(std::uint64_t n, Emit&& emit) {
        while (!heap.empty() && heap.top().value < n) {
            Entry e = heap.top();
            heap.pop();
            emit(e);
            if (e.value <= limit_ / e.prime)
                heap.push({e.value * e.prime, e.prime, e.exponent + 1});
        }
    }

    std::uint64_t limit_ = 0;
};

}  // namespace sieve_detail

// Streams every prime and prime power in [2, cfg.limit] to `sink`, ascending
// in n, exactly once.  Segments may be sieved by worker threads but emission
// order is independent of cfg.thread_count.
//
// Sink requirements: void operator()(const PrimeEvent&).  If the sink also
// provides segment_boundary(uint64_t x), it is called after each segment with
// the largest integer fully processed.  A throwing sink aborts the stream
// with PartialProgressError carrying the last completed segment boundary.
template <class Sink>
SieveSummary stream_events(const SieveConfig& cfg, Sink&& sink) {
    cfg.validate();
    namespace d = sieve_detail;

    const std::uint64_t limit = cfg.limit;
    const std::uint64_t span = std::uint64_t{cfg.segment_bytes} * 16;  // integers per segment
    const std::uint32_t sqrt_limit =
        static_cast<std::uint32_t>(std::sqrt(static_cast<double>(limit)) + 2);
    const auto base = d::odd_primes_upto(sqrt_limit);
    const auto pattern = d::build_pattern(cfg.wheel);

    const std::uint64_t resume_lo = cfg.start_segment == 0 ? 0 : cfg.start_segment * span + 1;
    d::PowerStream powers(base, limit, resume_lo);

    SieveSummary summary;
    const std::uint64_t mod = cfg.residue_modulus;
    std::uint64_t last_boundary = 1;

    auto emit_power = [&](const d::PowerStream::Entry& e) {
        PrimeEvent ev{e.value, PrimeEvent::Kind::prime_power, e.exponent,
                      std::log(static_cast<double>(e.prime)),
                      mod ? static_cast<std::uint32_t>(e.value % mod) : 0u};
        sink(ev);
        summary.max_n = e.value;
    };
    auto emit_prime = [&](std::uint64_t p) {
        powers.drain_below(p, emit_power);
        PrimeEvent ev{p, PrimeEvent::Kind::prime, 1,
                      std::log(static_cast<double>(p)),
                      mod ? static_cast<std::uint32_t>(p % mod) : 0u};
        sink(ev);
        ++summary.prime_count;
        summary.max_n = p;
    };

    const std::uint64_t first_segment = cfg.start_segment;
    const std::uint64_t n_segments = (limit - 1) / span + 1;  // segment s covers [s*span+1, (s+1)*span]

    try {
        if (first_segment == 0 && 2 <= limit) emit_prime(2);

        auto consume_segment = [&](std::uint64_t s, const std::vector<std::uint8_t>& seg) {
            const std::uint64_t lo = s * span + 1;  // odd
            const std::uint64_t hi = std::min(limit, (s + 1) * span);
            const std::size_t nwords = (cfg.segment_bytes + 7) / 8;
            const std::uint8_t* bytes = seg.data();
            for (std::size_t w = 0; w < nwords; ++w) {
                std::uint64_t word;
                std::memcpy(&word, bytes + w * 8, 8);
                word = ~word;
                while (word) {
                    const int bit = std::countr_zero(word);
                    word &= word - 1;
                    const std::uint64_t n = lo + 2 * (w * 64 + static_cast<std::uint64_t>(bit));
                    if (n > hi) { word = 0; break; }
                    emit_prime(n);
                }
            }
            if constexpr (requires(Sink& s2, std::uint64_t x) { s2.segment_boundary(x, x); }) {
                sink.segment_boundary(hi, s + 1);
            }
            last_boundary = hi;
            ++summary.segments_completed;
        };

        if (cfg.thread_count <= 1 || n_segments - first_segment <= 1) {
            std::vector<std::uint8_t> seg(cfg.segment_bytes);
            for (std::uint64_t s = first_segment; s < n_segments; ++s) {
                const std::uint64_t lo = s * span + 1;
                const std::uint64_t hi = std::min(limit, (s + 1) * span);
                d::sieve_segment(seg, lo, hi, base, pattern, cfg.wheel);
                consume_segment(s, seg);
            }
        } else {
            // workers sieve segments out of order; consumer emits in order
            std::mutex mu;
            std::condition_variable cv_ready, cv_space;
            std::map<std::uint64_t, std::vector<std::uint8_t>> ready;
            std::atomic<std::uint64_t> next_to_sieve{first_segment};
            std::uint64_t next_to_emit = first_segment;
            const std::uint64_t max_ahead = cfg.thread_count * 2 + 2;
            std::exception_ptr worker_error;

            auto worker = [&]() {
                try {
                    for (;;) {
                        const std::uint64_t s = next_to_sieve.fetch_add(1);
                        if (s >= n_segments) return;
                        std::vector<std::uint8_t> seg(cfg.segment_bytes);
                        const std::uint64_t lo = s * span + 1;
                        const std::uint64_t hi = std::min(limit, (s + 1) * span);
                        d::sieve_segment(seg, lo, hi, base, pattern, cfg.wheel);
                        std::unique_lock lk(mu);
                        cv_space.wait(lk, [&] {
                            return s < next_to_emit + max_ahead || worker_error;
                        });
                        if (worker_error) return;
                        ready.emplace(s, std::move(seg));
                        cv_ready.notify_all();
                    }
                } catch (...) {
                    std::lock_guard lk(mu);
                    if (!worker_error) worker_error = std::current_exception();
                    cv_ready.notify_all();
                }
            };

            std::vector<std::thread> pool;
            for (unsigned i = 0; i < cfg.thread_count; ++i) pool.emplace_back(worker);

            try {
                while (next_to_emit < n_segments) {
                    std::vector<std::uint8_t> seg;
                    {
                        std::unique_lock lk(mu);
                        cv_ready.wait(lk, [&] {
                            return ready.count(next_to_emit) || worker_error;
                        });
                        if (worker_error) std::rethrow_exception(worker_error);
                        seg = std::move(ready.at(next_to_emit));
                        ready.erase(next_to_emit);
                    }
                    consume_segment(next_to_emit, seg);
                    {
                        std::lock_guard lk(mu);
                        ++next_to_emit;
                    }
                    cv_space.notify_all();
                }
            } catch (...) {
                {
                    std::lock_guard lk(mu);
                    if (!worker_error) worker_error = std::current_exception();
                    next_to_emit = n_segments;
                }
                cv_space.notify_all();
                cv_ready.notify_all();
                for (auto& t : pool) t.join();
                throw;
            }
            for (auto& t : pool) t.join();
        }

        // prime powers above the last prime
        powers.drain_below(limit + 1, emit_power);
    } catch (PartialProgressError&) {
        throw;
    } catch (const std::exception& e) {
        throw PartialProgressError(
            std::string("sieve consumer aborted: ") + e.what(), last_boundary);
    } catch (...) {
        throw PartialProgressError("sieve consumer aborted", last_boundary);
    }

    return summary;
}

// pi(x) via the streaming sieve.
std::uint64_t pi_of(std::uint64_t x, SieveConfig cfg = {});

}  // namespace primerace
