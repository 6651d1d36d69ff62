#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "primerace/residues.hpp"
#include "primerace/sieve.hpp"

namespace primerace {

// Compensated accumulator; theta/psi/Pi collect up to ~4e8 terms of size
// log x, which plain doubles cannot absorb within the acceptance budgets.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct RaceEvent {
    enum class Kind : std::uint8_t { sign_change, lead_change, new_ordering, first_negative };
    std::uint64_t x = 0;
    Kind kind = Kind::sign_change;
    std::uint32_t l1 = 0, l2 = 0;
    std::int64_t delta = 0;
    std::vector<std::uint32_t> ordering;  // filled for new_ordering

    static const char* kind_name(Kind k);
};

struct ResidueCounters {
    std::uint64_t pi = 0;
    KahanSum theta;  // sum of log p over primes = l (mod k)
    KahanSum psi;    // sum of Lambda(n) over n = l (mod k)
    KahanSum Pi;     // sum of Lambda(n)/log n
};

// Counter snapshot taken at a requested x (piecewise-constant between jumps).
struct RaceProbe {
    std::uint64_t x = 0;
    std::uint64_t total_pi = 0;
    std::vector<ResidueCounters> counters;  // tracked order
};

struct PairState {
    std::uint32_t l1 = 0, l2 = 0;          // ordered as given
    std::int64_t delta = 0;                // pi(x,k,l1) - pi(x,k,l2)
    std::int8_t last_sign = 0;
    bool seen_negative = false;
    std::uint64_t count_le = 0;            // integers n <= x with delta(n) <= 0
    std::uint64_t count_ge = 0;
};

struct RaceOptions {
    std::vector<std::uint64_t> probe_xs;   // ascending; snapshots recorded at each
    std::string event_csv_path;            // spill every event as CSV when set
    std::string checkpoint_path;           // periodic checkpoints when set
    std::uint64_t checkpoint_every_segments = 0;
    std::size_t event_ring_capacity = std::size_t{1} << 16;
    std::optional<std::string> resume_checkpoint;
};

class RaceState {
  public:
    RaceState(std::uint64_t k, std::vector<std::uint32_t> residues);

    const Modulus& modulus() const { return *modulus_; }
    const std::vector<std::uint32_t>& residues() const { return residues_; }
    std::uint64_t x_current() const { return x_current_; }
    std::uint64_t total_pi() const { return total_pi_; }

    const ResidueCounters& counters(std::uint64_t l) const;
    const std::vector<ResidueCounters>& all_counters() const { return counters_; }
    const std::deque<RaceEvent>& event_log() const { return events_; }
    std::uint64_t events_emitted() const { return events_emitted_; }
    const std::set<std::vector<std::uint32_t>>& orderings_seen() const { return orderings_seen_; }
    const std::vector<PairState>& pairs() const { return pairs_; }
    const std::vector<RaceProbe>& probes() const { return probes_; }

    const PairState& pair(std::uint32_t l1, std::uint32_t l2) const;  // ordered lookup
    bool has_pair(std::uint32_t l1, std::uint32_t l2) const;

    std::size_t tracked_index(std::uint64_t l) const;  // throws if untracked

    // Snapshot JSON per the race interface contract (pi exact, real counters
    // with 15 significant digits).
    void write_snapshot_json(const std::string& path) const;

  private:
    friend struct RaceConsumer;
    friend RaceState run_race(std::uint64_t, const std::vector<std::uint32_t>&,
                              std::uint64_t, SieveConfig, const RaceOptions&);
    friend void save_checkpoint(const RaceState&, const std::string&,
                                std::uint64_t, const SieveConfig&);
    friend RaceState load_checkpoint(const std::string&, std::uint64_t&, SieveConfig&);

    std::shared_ptr<const Modulus> modulus_;
    std::vector<std::uint32_t> residues_;
    std::vector<std::int32_t> tracked_of_residue_;  // residue -> tracked idx or -1
    std::vector<ResidueCounters> counters_;
    std::vector<PairState> pairs_;
    std::deque<RaceEvent> events_;
    std::size_t ring_capacity_ = std::size_t{1} << 16;
    std::uint64_t events_emitted_ = 0;
    std::set<std::vector<std::uint32_t>> orderings_seen_;
    std::vector<RaceProbe> probes_;
    std::uint64_t x_current_ = 1;
    std::uint64_t x_processed_ = 0;
    std::uint64_t total_pi_ = 0;
    std::int32_t unique_leader_ = -1;  // tracked index or -1
};

// Runs the sieve over [2, limit] and maintains the full race state for the
// given reduced residues mod k.  Deterministic for fixed inputs regardless of
// cfg.thread_count.
RaceState run_race(std::uint64_t k, const std::vector<std::uint32_t>& residues,
                   std::uint64_t limit, SieveConfig cfg = {},
                   const RaceOptions& opts = {});

std::int64_t delta(const RaceState& st, std::uint32_t l1, std::uint32_t l2);

// h(x) = phi(k) x^{-1/2} (psi(x,k,l1) - psi(x,k,l2)) - N_k(l1) + N_k(l2)
double h_value(const RaceState& st, std::uint32_t l1, std::uint32_t l2);

// sum_{p<=x, p mod k in A} 1 - (|A|/|B|) sum_{p<=x, p mod k in B} 1
double union_delta(const RaceState& st, const std::vector<std::uint32_t>& A,
                   const std::vector<std::uint32_t>& B);

// N(x)/x with N(x) = #{n <= x : delta(n,k,l1,l2) <= 0}
double preponderance_density(const RaceState& st, std::uint32_t l1, std::uint32_t l2);

// sum over odd primes p <= limit of (-1)^{(p-1)/2} e^{-p/x}
double chebyshev_weighted_sum(double x, std::uint64_t limit, SieveConfig cfg = {});

struct ShanksResult {
    bool holds = true;
    std::uint64_t first_violation = 0;  // meaningful when !holds
    explicit operator bool() const { return holds; }
};

// pi(x,8,1) <= max_{a in {3,5,7}} pi(x,8,a) for every x <= limit?
ShanksResult shanks_check(std::uint64_t limit, SieveConfig cfg = {});

// Event CSV: header "x,kind,l1,l2,delta", one row per event.
void write_event_csv(const std::deque<RaceEvent>& events, const std::string& path);

// Binary checkpoint (little-endian, magic "PRSV1") for resumable long runs.
void save_checkpoint(const RaceState& st, const std::string& path,
                     std::uint64_t next_segment, const SieveConfig& cfg);
RaceState load_checkpoint(const std::string& path, std::uint64_t& next_segment,
                          SieveConfig& cfg);

}  // namespace primerace
