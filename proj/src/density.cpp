#include "primerace/density.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

// splitmix64 as a counter-based generator: every (seed, sample, zero) triple
// owns an independent substream, so results do not depend on scheduling.
struct SubStream {
    std::uint64_t state;

    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

    explicit SubStream(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        return mix(state);
    }

    double uniform_pm1() {  // (-1, 1)
        return (static_cast<double>(next() >> 11) * 0x1.0p-52) - 1.0;
    }

    // uniform point on the unit circle, rejection-free of trig calls
    void circle(double& c, double& s) {
        for (;;) {
            const double u = uniform_pm1();
            const double v = uniform_pm1();
            const double r2 = u * u + v * v;
            if (r2 > 0.0 && r2 <= 1.0) {
                c = (u * u - v * v) / r2;
                s = 2.0 * u * v / r2;
                return;
            }
        }
    }
};

}  // namespace

GshModel::GshModel(const ZeroSet& zs, const CharacterTable& table,
                   const std::vector<std::uint32_t>& residues, double T,
                   bool fejer_weights) {
    if (T > zs.t_max)
        throw InvalidArgumentError("T exceeds the completeness bound of the zero set");
    const auto& m = table.modulus();
    const auto nk = square_root_counts(m);
    const std::size_t r = residues.size();
    bias_.resize(r);
    for (std::size_t j = 0; j < r; ++j)
        bias_[j] = 1.0 - static_cast<double>(nk.at(residues[j]));

    for (const auto& chi : table.all()) {
        if (chi.is_principal()) continue;
        for (const auto& z : zs.zeros_for(chi.label())) {
            if (z.gamma > T) break;
            if (z.gamma == 0.0) continue;
            if (std::abs(z.beta - 0.5) > 1e-12)
                throw DataError("off-line zero in GSH sampling; the limit law assumes "
                                "critical-line zeros");
            const double w = fejer_weights ? 1.0 - z.gamma / T : 1.0;
            if (w <= 0.0) continue;
            const std::complex<double> rho(0.5, z.gamma);
            bool any = false;
            const std::size_t base = re_alpha_.size();
            re_alpha_.resize(base + r);
            im_alpha_.resize(base + r);
            for (std::size_t j = 0; j < r; ++j) {
                const std::complex<double> alpha =
                    2.0 * double(z.multiplicity) * w * chi.cvalue_conj(residues[j]) / rho;
                re_alpha_[base + j] = alpha.real();
                im_alpha_[base + j] = alpha.imag();
                if (std::abs(alpha) > 1e-15) any = true;
            }
            if (!any) {  // character invisible to these residues
                re_alpha_.resize(base);
                im_alpha_.resize(base);
            } else {
                ++n_zeros_;
            }
        }
    }
    zero_hash_.resize(n_zeros_);
    for (std::size_t z = 0; z < n_zeros_; ++z)
        zero_hash_[z] = SubStream::mix(z + 0x632be59bd9b4e019ull);
}

void GshModel::sample(std::uint64_t seed, std::uint64_t sample_index,
                      std::vector<double>& out) const {
    const std::size_t r = bias_.size();
    out.assign(bias_.begin(), bias_.end());
    const std::uint64_t h =
        SubStream::mix(seed + 0x9e3779b97f4a7c15ull * (sample_index + 1));
    for (std::size_t z = 0; z < n_zeros_; ++z) {
        SubStream rng(h ^ zero_hash_[z]);
        double c, s;
        rng.circle(c, s);
        const double* re = re_alpha_.data() + z * r;
        const double* im = im_alpha_.data() + z * r;
        for (std::size_t j = 0; j < r; ++j)
            out[j] -= re[j] * c - im[j] * s;  // Re(alpha e^{i theta})
    }
}

DensityEstimate gsh_density(const ZeroSet& zs, const CharacterTable& table,
                            const std::vector<std::uint32_t>& residues,
                            const std::vector<std::uint32_t>& ordering, double T,
                            std::uint64_t n_samples, std::uint64_t seed,
                            bool fejer_weights) {
    if (ordering.size() != residues.size())
        throw InvalidArgumentError("ordering must permute the tracked residues");
    std::vector<std::size_t> perm;  // ordering -> index into residues
    for (auto l : ordering) {
        auto it = std::find(residues.begin(), residues.end(), l);
        if (it == residues.end())
            throw InvalidArgumentError("ordering residue not tracked");
        perm.push_back(static_cast<std::size_t>(it - residues.begin()));
    }

    GshModel model(zs, table, residues, T, fejer_weights);
    std::vector<double> e(residues.size());
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        model.sample(seed, i, e);
        bool ok = true;
        for (std::size_t j = 0; j + 1 < perm.size(); ++j)
            if (!(e[perm[j]] > e[perm[j + 1]])) {  // ties count as failures
                ok = false;
                break;
            }
        hits += ok;
    }

    DensityEstimate est;
    est.ordering = ordering;
    est.method = DensityEstimate::Method::gsh_monte_carlo;
    est.samples = n_samples;
    est.X_or_T = T;
    est.seed = seed;
    est.delta_hat = static_cast<double>(hits) / static_cast<double>(n_samples);
    est.stderr_est =
        std::sqrt(est.delta_hat * (1.0 - est.delta_hat) / static_cast<double>(n_samples));
    est.convention = "bias(l) = 1 - N_k(l); calibrated to the mod-4 shift of 2";
    return est;
}

DensityEstimate empirical_log_density(std::uint64_t k,
                                      const std::vector<std::uint32_t>& residues,
                                      const std::vector<std::uint32_t>& ordering,
                                      std::uint64_t X, SieveConfig cfg) {
    if (X < 2) throw InvalidArgumentError("X must be >= 2");
    if (ordering.size() != residues.size())
        throw InvalidArgumentError("ordering must permute the tracked residues");
    Modulus m(k);
    std::vector<std::size_t> order_idx;
    std::vector<std::int32_t> tracked(k, -1);
    for (std::size_t i = 0; i < residues.size(); ++i) {
        m.index_of(residues[i]);
        tracked[residues[i]] = static_cast<std::int32_t>(i);
    }
    for (auto l : ordering) {
        auto it = std::find(residues.begin(), residues.end(), l);
        if (it == residues.end())
            throw InvalidArgumentError("ordering residue not tracked");
        order_idx.push_back(static_cast<std::size_t>(it - residues.begin()));
    }

    std::vector<std::uint64_t> pi(residues.size(), 0);
    auto holds = [&]() {
        for (std::size_t j = 0; j + 1 < order_idx.size(); ++j)
            if (!(pi[order_idx[j]] > pi[order_idx[j + 1]])) return false;
        return true;
    };
    auto tied = [&]() {
        for (std::size_t a = 0; a < pi.size(); ++a)
            for (std::size_t b = a + 1; b < pi.size(); ++b)
                if (pi[a] == pi[b]) return true;
        return false;
    };

    double measure = 0.0, tie_measure = 0.0;
    double last_t = 2.0;
    bool cur_holds = holds(), cur_tied = tied();
    const double window_start = static_cast<double>(X) / 10.0;
    double run_min = 1.0, run_max = 0.0;
    bool window_seen = false;

    cfg.limit = X;
    cfg.residue_modulus = k;
    stream_events(cfg, [&](const PrimeEvent& ev) {
        if (ev.kind != PrimeEvent::Kind::prime) return;
        const std::int32_t t = tracked[ev.residue];
        if (t < 0) return;
        const double tp = static_cast<double>(ev.n);
        if (tp > last_t) {
            const double seg = std::log(tp) - std::log(last_t);
            if (cur_holds) measure += seg;
            if (cur_tied) tie_measure += seg;
            last_t = tp;
        }
        ++pi[static_cast<std::size_t>(t)];
        cur_holds = holds();
        cur_tied = tied();
        if (tp >= window_start) {
            const double v = measure / std::log(tp);
            run_min = std::min(run_min, v);
            run_max = std::max(run_max, v);
            window_seen = true;
        }
    });
    const double seg = std::log(static_cast<double>(X)) - std::log(last_t);
    if (cur_holds) measure += seg;
    if (cur_tied) tie_measure += seg;

    DensityEstimate est;
    est.ordering = ordering;
    est.method = DensityEstimate::Method::empirical_logmeasure;
    est.samples = 0;
    est.X_or_T = static_cast<double>(X);
    est.delta_hat = measure / std::log(static_cast<double>(X));
    est.tie_measure = tie_measure;
    est.delta_lower = window_seen ? std::min(run_min, est.delta_hat) : est.delta_hat;
    est.delta_upper = window_seen ? std::max(run_max, est.delta_hat) : est.delta_hat;
    return est;
}

bool unbiased_predicate(std::uint64_t k, const std::vector<std::uint32_t>& residues) {
    Modulus m(k);
    for (auto l : residues) m.index_of(l);
    for (std::size_t a = 0; a < residues.size(); ++a)
        for (std::size_t b = a + 1; b < residues.size(); ++b)
            if (residues[a] == residues[b])
                throw InvalidArgumentError("residues must be distinct");

    if (residues.size() == 2) {
        const auto nk = square_root_counts(m);
        return nk.at(residues[0]) == nk.at(residues[1]);
    }
    if (residues.size() == 3) {
        const std::uint64_t l1 = residues[0], l2 = residues[1], l3 = residues[2];
        for (auto g : m.reduced_residues()) {
            const std::uint64_t g2 = (std::uint64_t{g} * g) % k;
            const std::uint64_t g3 = (g2 * g) % k;
            if (g3 != 1) continue;
            if ((l1 * g) % k == l2 && (l1 * g2) % k == l3) return true;
        }
        return false;
    }
    return false;
}

std::vector<std::pair<double, double>> tail_probe(
    const ZeroSet& zs, const CharacterTable& table,
    const std::vector<std::uint32_t>& residues, const std::vector<double>& R_grid,
    std::uint64_t n_samples, std::uint64_t seed, double T) {
    GshModel model(zs, table, residues, T);
    std::vector<std::uint64_t> exceed(R_grid.size(), 0);
    std::vector<double> e(residues.size());
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        model.sample(seed, i, e);
        double norm2 = 0.0;
        for (double v : e) norm2 += v * v;
        const double norm = std::sqrt(norm2);
        for (std::size_t g = 0; g < R_grid.size(); ++g)
            if (norm > R_grid[g]) ++exceed[g];
    }
    std::vector<std::pair<double, double>> out;
    for (std::size_t g = 0; g < R_grid.size(); ++g)
        out.emplace_back(R_grid[g],
                         static_cast<double>(exceed[g]) / static_cast<double>(n_samples));
    return out;
}

}  // namespace primerace
