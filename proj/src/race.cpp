#include "primerace/race.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "primerace/errors.hpp"

namespace primerace {

const char* RaceEvent::kind_name(Kind k) {
    switch (k) {
        case Kind::sign_change: return "sign_change";
        case Kind::lead_change: return "lead_change";
        case Kind::new_ordering: return "new_ordering";
        case Kind::first_negative: return "first_negative";
    }
    return "?";
}

RaceState::RaceState(std::uint64_t k, std::vector<std::uint32_t> residues)
    : modulus_(std::make_shared<Modulus>(k)), residues_(std::move(residues)) {
    if (residues_.empty()) throw InvalidArgumentError("no residues to track");
    tracked_of_residue_.assign(k, -1);
    for (std::size_t i = 0; i < residues_.size(); ++i) {
        const std::uint32_t l = residues_[i];
        if (!modulus_->is_reduced(l))
            throw InvalidArgumentError("residue " + std::to_string(l) +
                                       " is not reduced mod " + std::to_string(k));
        if (tracked_of_residue_[l] != -1)
            throw InvalidArgumentError("duplicate residue " + std::to_string(l));
        tracked_of_residue_[l] = static_cast<std::int32_t>(i);
    }
    counters_.resize(residues_.size());
    for (std::size_t i = 0; i < residues_.size(); ++i)
        for (std::size_t j = i + 1; j < residues_.size(); ++j)
            pairs_.push_back({residues_[i], residues_[j], 0, 0, false, 0, 0});
}

const ResidueCounters& RaceState::counters(std::uint64_t l) const {
    return counters_[tracked_index(l)];
}

std::size_t RaceState::tracked_index(std::uint64_t l) const {
    if (l >= tracked_of_residue_.size() || tracked_of_residue_[l] < 0)
        throw InvalidArgumentError("residue " + std::to_string(l) + " is not tracked");
    return static_cast<std::size_t>(tracked_of_residue_[l]);
}

bool RaceState::has_pair(std::uint32_t l1, std::uint32_t l2) const {
    for (const auto& p : pairs_)
        if (p.l1 == l1 && p.l2 == l2) return true;
    return false;
}

const PairState& RaceState::pair(std::uint32_t l1, std::uint32_t l2) const {
    for (const auto& p : pairs_)
        if (p.l1 == l1 && p.l2 == l2) return p;
    throw InvalidArgumentError("pair not tracked");
}

namespace {

std::int8_t sign_of(std::int64_t v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

struct RaceConsumer {
    RaceState& st;
    std::uint64_t limit;
    SieveConfig cfg;  // for checkpoints
    const RaceOptions& opts;
    std::ofstream csv;
    std::size_t probe_next = 0;
    std::vector<std::vector<std::uint32_t>> pairs_of_tracked;

    RaceConsumer(RaceState& s, std::uint64_t lim, SieveConfig c, const RaceOptions& o)
        : st(s), limit(lim), cfg(c), opts(o) {
        pairs_of_tracked.resize(st.residues_.size());
        for (std::uint32_t pi = 0; pi < st.pairs_.size(); ++pi) {
            pairs_of_tracked[st.tracked_index(st.pairs_[pi].l1)].push_back(pi);
            pairs_of_tracked[st.tracked_index(st.pairs_[pi].l2)].push_back(pi);
        }
        if (!opts.event_csv_path.empty()) {
            csv.open(opts.event_csv_path, std::ios::app);
            if (!csv) throw IoError("cannot open event CSV " + opts.event_csv_path);
            if (csv.tellp() == 0) csv << "x,kind,l1,l2,delta\n";
        }
        // skip probes already covered by a resumed state
        while (probe_next < opts.probe_xs.size() &&
               opts.probe_xs[probe_next] <= st.x_processed_)
            ++probe_next;
    }

    void emit(RaceEvent ev) {
        if (csv.is_open())
            csv << ev.x << ',' << RaceEvent::kind_name(ev.kind) << ',' << ev.l1
                << ',' << ev.l2 << ',' << ev.delta << '\n';
        ++st.events_emitted_;
        if (st.events_.size() == st.ring_capacity_) st.events_.pop_front();
        st.events_.push_back(std::move(ev));
    }

    void record_probe(std::uint64_t x) {
        st.probes_.push_back({x, st.total_pi_, st.counters_});
    }

    // account integers (st.x_processed_, m] at the current (constant) deltas
    void advance_plateau_to(std::uint64_t m) {
        if (m <= st.x_processed_) return;
        const std::uint64_t gap = m - st.x_processed_;
        for (auto& p : st.pairs_) {
            if (p.delta <= 0) p.count_le += gap;
            if (p.delta >= 0) p.count_ge += gap;
        }
        while (probe_next < opts.probe_xs.size() && opts.probe_xs[probe_next] <= m) {
            record_probe(opts.probe_xs[probe_next]);
            ++probe_next;
        }
        st.x_processed_ = m;
    }

    void operator()(const PrimeEvent& ev) {
        const std::uint64_t n = ev.n;
        advance_plateau_to(n - 1);

        const bool is_prime = ev.kind == PrimeEvent::Kind::prime;
        if (is_prime) ++st.total_pi_;

        const std::int32_t t =
            ev.residue < st.tracked_of_residue_.size() ? st.tracked_of_residue_[ev.residue] : -1;
        if (t >= 0) {
            auto& c = st.counters_[static_cast<std::size_t>(t)];
            if (is_prime) {
                ++c.pi;
                c.theta.add(ev.lambda_weight);
                c.psi.add(ev.lambda_weight);
                c.Pi.add(1.0);
                update_pairs(static_cast<std::uint32_t>(t), n);
                update_leader_and_ordering(n);
            } else {
                c.psi.add(ev.lambda_weight);
                c.Pi.add(1.0 / static_cast<double>(ev.exponent));
            }
        }

        for (auto& p : st.pairs_) {
            if (p.delta <= 0) ++p.count_le;
            if (p.delta >= 0) ++p.count_ge;
        }
        st.x_processed_ = n;
        while (probe_next < opts.probe_xs.size() && opts.probe_xs[probe_next] == n) {
            record_probe(n);
            ++probe_next;
        }
    }

    void update_pairs(std::uint32_t t, std::uint64_t n) {
        for (std::uint32_t pi : pairs_of_tracked[t]) {
            auto& p = st.pairs_[pi];
            p.delta += (st.tracked_index(p.l1) == t) ? 1 : -1;
            if (!p.seen_negative && p.delta < 0) {
                p.seen_negative = true;
                emit({n, RaceEvent::Kind::first_negative, p.l1, p.l2, p.delta, {}});
            }
            const std::int8_t s = sign_of(p.delta);
            if (s != 0) {
                if (p.last_sign != 0 && s != p.last_sign)
                    emit({n, RaceEvent::Kind::sign_change, p.l1, p.l2, p.delta, {}});
                p.last_sign = s;
            }
        }
    }

    void update_leader_and_ordering(std::uint64_t n) {
        const std::size_t r = st.counters_.size();
        if (r < 2) return;

        std::uint64_t best = 0;
        std::int32_t arg = -1;
        bool unique = false;
        for (std::size_t i = 0; i < r; ++i) {
            const std::uint64_t v = st.counters_[i].pi;
            if (v > best) { best = v; arg = static_cast<std::int32_t>(i); unique = true; }
            else if (v == best && best > 0) unique = false;
        }
        if (unique && arg != st.unique_leader_) {
            if (st.unique_leader_ >= 0) {
                const std::uint32_t old_l = st.residues_[static_cast<std::size_t>(st.unique_leader_)];
                const std::uint32_t new_l = st.residues_[static_cast<std::size_t>(arg)];
                const std::int64_t gap =
                    static_cast<std::int64_t>(st.counters_[static_cast<std::size_t>(arg)].pi) -
                    static_cast<std::int64_t>(st.counters_[static_cast<std::size_t>(st.unique_leader_)].pi);
                emit({n, RaceEvent::Kind::lead_change, old_l, new_l, gap, {}});
            }
            st.unique_leader_ = arg;
        }

        // strict total ordering only when all counts are distinct
        std::vector<std::uint32_t> order(r);
        for (std::size_t i = 0; i < r; ++i) order[i] = static_cast<std::uint32_t>(i);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return st.counters_[a].pi > st.counters_[b].pi;
        });
        for (std::size_t i = 0; i + 1 < r; ++i)
            if (st.counters_[order[i]].pi == st.counters_[order[i + 1]].pi) return;
        std::vector<std::uint32_t> perm(r);
        for (std::size_t i = 0; i < r; ++i) perm[i] = st.residues_[order[i]];
        if (st.orderings_seen_.insert(perm).second)
            emit({n, RaceEvent::Kind::new_ordering, perm[0], perm[1], 0, perm});
    }

    void segment_boundary(std::uint64_t x, std::uint64_t next_segment) {
        if (!opts.checkpoint_path.empty() && opts.checkpoint_every_segments > 0) {
            ++segments_since_checkpoint;
            if (segments_since_checkpoint >= opts.checkpoint_every_segments) {
                segments_since_checkpoint = 0;
                advance_plateau_to(x);
                save_checkpoint(st, opts.checkpoint_path, next_segment, cfg);
            }
        }
    }

    void finalize() {
        advance_plateau_to(limit);
        st.x_current_ = limit;
        if (csv.is_open()) csv.flush();
    }

    std::uint64_t segments_since_checkpoint = 0;
};

RaceState run_race(std::uint64_t k, const std::vector<std::uint32_t>& residues,
                   std::uint64_t limit, SieveConfig cfg, const RaceOptions& opts) {
    if (limit < 2) throw InvalidArgumentError("race limit must be >= 2");
    for (std::size_t i = 1; i < opts.probe_xs.size(); ++i)
        if (opts.probe_xs[i] < opts.probe_xs[i - 1])
            throw InvalidArgumentError("probe_xs must be ascending");
    if (!opts.probe_xs.empty() && opts.probe_xs.back() > limit)
        throw InvalidArgumentError("probe beyond race limit");

    RaceState st(k, residues);
    if (opts.resume_checkpoint) {
        std::uint64_t next_segment = 0;
        SieveConfig saved;
        RaceState loaded = load_checkpoint(*opts.resume_checkpoint, next_segment, saved);
        if (loaded.modulus().k() != k || loaded.residues() != residues)
            throw DataError("checkpoint does not match requested race");
        st = std::move(loaded);
        if (limit < st.x_processed_)
            throw InvalidArgumentError("race limit is below the checkpoint position");
        cfg.segment_bytes = saved.segment_bytes;
        cfg.wheel = saved.wheel;
        cfg.start_segment = next_segment;
    }
    cfg.limit = limit;
    cfg.residue_modulus = k;
    st.ring_capacity_ = opts.event_ring_capacity;

    RaceConsumer consumer(st, limit, cfg, opts);
    stream_events(cfg, consumer);
    consumer.finalize();
    return st;
}

std::int64_t delta(const RaceState& st, std::uint32_t l1, std::uint32_t l2) {
    if (l1 == l2) {
        st.tracked_index(l1);  // must still be tracked
        return 0;
    }
    return static_cast<std::int64_t>(st.counters(l1).pi) -
           static_cast<std::int64_t>(st.counters(l2).pi);
}

double h_value(const RaceState& st, std::uint32_t l1, std::uint32_t l2) {
    if (st.x_current() < 2) throw InvalidArgumentError("h(x) needs x >= 2");
    const auto nk = square_root_counts(st.modulus());
    const double d = st.counters(l1).psi.value() - st.counters(l2).psi.value();
    return static_cast<double>(st.modulus().phi()) * d /
               std::sqrt(static_cast<double>(st.x_current())) -
           static_cast<double>(nk.at(l1)) + static_cast<double>(nk.at(l2));
}

double union_delta(const RaceState& st, const std::vector<std::uint32_t>& A,
                   const std::vector<std::uint32_t>& B) {
    if (A.empty() || B.empty()) throw InvalidArgumentError("invalid partition: empty set");
    for (auto a : A)
        for (auto b : B)
            if (a == b) throw InvalidArgumentError("invalid partition: sets overlap");
    std::uint64_t sa = 0, sb = 0;
    for (auto a : A) sa += st.counters(a).pi;
    for (auto b : B) sb += st.counters(b).pi;
    return static_cast<double>(sa) -
           (static_cast<double>(A.size()) / static_cast<double>(B.size())) *
               static_cast<double>(sb);
}

double preponderance_density(const RaceState& st, std::uint32_t l1, std::uint32_t l2) {
    if (st.x_current() < 2) throw InvalidArgumentError("x must be >= 2");
    for (const auto& p : st.pairs()) {
        if (p.l1 == l1 && p.l2 == l2)
            return static_cast<double>(p.count_le) / static_cast<double>(st.x_current());
        if (p.l1 == l2 && p.l2 == l1)
            return static_cast<double>(p.count_ge) / static_cast<double>(st.x_current());
    }
    throw InvalidArgumentError("pair not tracked");
}

double chebyshev_weighted_sum(double x, std::uint64_t limit, SieveConfig cfg) {
    if (!(x > 0)) throw InvalidArgumentError("x must be positive");
    if (static_cast<double>(limit) < 41.0 * x)
        throw InvalidArgumentError("tail not negligible: need limit >= 41*x");
    cfg.limit = limit;
    KahanSum s;
    stream_events(cfg, [&](const PrimeEvent& ev) {
        if (ev.kind != PrimeEvent::Kind::prime || ev.n == 2) return;
        const double term = std::exp(-static_cast<double>(ev.n) / x);
        s.add(ev.n % 4 == 1 ? term : -term);
    });
    return s.value();
}

ShanksResult shanks_check(std::uint64_t limit, SieveConfig cfg) {
    if (limit < 2) throw InvalidArgumentError("limit must be >= 2");
    cfg.limit = limit;
    std::uint64_t pi1 = 0, pi3 = 0, pi5 = 0, pi7 = 0;
    ShanksResult res;
    stream_events(cfg, [&](const PrimeEvent& ev) {
        if (ev.kind != PrimeEvent::Kind::prime) return;
        switch (ev.n & 7) {
            case 1:
                ++pi1;
                if (res.holds && pi1 > std::max({pi3, pi5, pi7})) {
                    res.holds = false;
                    res.first_violation = ev.n;
                }
                break;
            case 3: ++pi3; break;
            case 5: ++pi5; break;
            case 7: ++pi7; break;
            default: break;  // p = 2
        }
    });
    return res;
}

void write_event_csv(const std::deque<RaceEvent>& events, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "x,kind,l1,l2,delta\n";
    for (const auto& ev : events)
        out << ev.x << ',' << RaceEvent::kind_name(ev.kind) << ',' << ev.l1 << ','
            << ev.l2 << ',' << ev.delta << '\n';
}

void RaceState::write_snapshot_json(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    char buf[64];
    auto real = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.15g", v);
        return std::string(buf);
    };
    out << "{\n  \"modulus\": " << modulus_->k() << ",\n  \"x\": " << x_current_
        << ",\n  \"total_pi\": " << total_pi_ << ",\n  \"residues\": [\n";
    for (std::size_t i = 0; i < residues_.size(); ++i) {
        const auto& c = counters_[i];
        out << "    {\"l\": " << residues_[i] << ", \"pi\": " << c.pi
            << ", \"theta\": " << real(c.theta.value())
            << ", \"psi\": " << real(c.psi.value())
            << ", \"Pi\": " << real(c.Pi.value()) << "}"
            << (i + 1 < residues_.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
}

namespace {

struct ByteWriter {
    std::string buf;
    void u8(std::uint8_t v) { buf.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
};

struct ByteReader {
    const std::string& buf;
    std::size_t pos = 0;
    std::uint8_t u8() {
        if (pos >= buf.size()) throw DataError("checkpoint truncated");
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{u8()} << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{u8()} << (8 * i);
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

}  // namespace

void save_checkpoint(const RaceState& st, const std::string& path,
                     std::uint64_t next_segment, const SieveConfig& cfg) {
    ByteWriter w;
    w.buf = "PRSV1";
    w.u64(cfg.limit);
    w.u64(next_segment);
    w.u64(cfg.segment_bytes);
    w.u8(static_cast<std::uint8_t>(cfg.wheel));
    w.u64(st.modulus().k());
    w.u32(static_cast<std::uint32_t>(st.residues().size()));
    for (std::size_t i = 0; i < st.residues().size(); ++i) {
        const auto& c = st.all_counters()[i];
        w.u32(st.residues()[i]);
        w.u64(c.pi);
        w.f64(c.theta.sum); w.f64(c.theta.comp);
        w.f64(c.psi.sum);   w.f64(c.psi.comp);
        w.f64(c.Pi.sum);    w.f64(c.Pi.comp);
    }
    w.u64(st.total_pi());
    w.u64(st.x_processed_);
    w.u64(st.events_emitted());
    w.u32(static_cast<std::uint32_t>(st.unique_leader_ + 1));
    w.u32(static_cast<std::uint32_t>(st.pairs().size()));
    for (const auto& p : st.pairs()) {
        w.u32(p.l1); w.u32(p.l2);
        w.i64(p.delta);
        w.u8(static_cast<std::uint8_t>(p.last_sign + 1));
        w.u8(p.seen_negative ? 1 : 0);
        w.u64(p.count_le); w.u64(p.count_ge);
    }
    w.u32(static_cast<std::uint32_t>(st.orderings_seen().size()));
    for (const auto& perm : st.orderings_seen())
        for (auto l : perm) w.u32(l);

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write checkpoint " + tmp);
        out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    }
    std::filesystem::rename(tmp, path);
}

RaceState load_checkpoint(const std::string& path, std::uint64_t& next_segment,
                          SieveConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (data.size() < 5 || data.compare(0, 5, "PRSV1") != 0)
        throw DataError("bad checkpoint magic");
    ByteReader r{data, 5};
    cfg.limit = r.u64();
    next_segment = r.u64();
    cfg.segment_bytes = r.u64();
    cfg.wheel = static_cast<Wheel>(r.u8());
    const std::uint64_t k = r.u64();
    const std::uint32_t nres = r.u32();
    std::vector<std::uint32_t> residues(nres);
    std::vector<ResidueCounters> counters(nres);
    for (std::uint32_t i = 0; i < nres; ++i) {
        residues[i] = r.u32();
        counters[i].pi = r.u64();
        counters[i].theta.sum = r.f64(); counters[i].theta.comp = r.f64();
        counters[i].psi.sum = r.f64();   counters[i].psi.comp = r.f64();
        counters[i].Pi.sum = r.f64();    counters[i].Pi.comp = r.f64();
    }
    RaceState st(k, residues);
    st.counters_ = std::move(counters);
    st.total_pi_ = r.u64();
    st.x_processed_ = r.u64();
    st.x_current_ = st.x_processed_;
    st.events_emitted_ = r.u64();
    st.unique_leader_ = static_cast<std::int32_t>(r.u32()) - 1;
    const std::uint32_t npairs = r.u32();
    if (npairs != st.pairs_.size()) throw DataError("checkpoint pair count mismatch");
    for (auto& p : st.pairs_) {
        p.l1 = r.u32(); p.l2 = r.u32();
        p.delta = r.i64();
        p.last_sign = static_cast<std::int8_t>(static_cast<int>(r.u8()) - 1);
        p.seen_negative = r.u8() != 0;
        p.count_le = r.u64(); p.count_ge = r.u64();
    }
    const std::uint32_t nords = r.u32();
    for (std::uint32_t i = 0; i < nords; ++i) {
        std::vector<std::uint32_t> perm(nres);
        for (auto& l : perm) l = r.u32();
        st.orderings_seen_.insert(std::move(perm));
    }
    return st;
}

}  // namespace primerace
