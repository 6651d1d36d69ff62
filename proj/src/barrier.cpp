#include "primerace/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "primerace/errors.hpp"

namespace primerace {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double BarrierSpec::sigma_max() const { return beta3; }

double BarrierSpec::t_min() const {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& [label, zs] : zeros)
        for (const auto& z : zs) t = std::min(t, z.rho.imag());
    return t;
}

bool BarrierSpec::empty() const {
    for (const auto& [label, zs] : zeros)
        if (!zs.empty()) return false;
    return true;
}

void BarrierSpec::validate(const CharacterTable& table) const {
    if (residues.size() < 2)
        throw InvalidArgumentError("barrier spec needs at least two racing residues");
    for (auto l : residues) table.modulus().index_of(l);
    for (const auto& [label, zs] : zeros) {
        const Character& chi = table.by_label(label);
        if (chi.is_principal())
            throw DataError("barrier zeros belong to nonprincipal characters");
        for (const auto& z : zs) {
            if (!(z.rho.real() > 0.5 && z.rho.real() < 1.0))
                throw DataError("barrier zero real part must lie in (1/2, 1)");
            if (!(z.rho.imag() > 0))
                throw DataError("barrier zeros must have positive imaginary part");
            if (z.multiplicity < 1) throw DataError("multiplicity must be >= 1");
        }
    }
    if (!empty()) {
        if (!(beta1 >= 0.5 && beta1 < beta2 && beta2 <= beta3 && beta3 <= 1.0))
            throw DataError("need 1/2 <= beta1 < beta2 <= Re rho <= beta3 <= 1");
        for (const auto& [label, zs] : zeros)
            for (const auto& z : zs)
                if (z.rho.real() < beta2 - 1e-15 || z.rho.real() > beta3 + 1e-15)
                    throw DataError("listed zero outside the [beta2, beta3] envelope");
    }
}

BarrierSpec builtin_k5(double sigma, double t) {
    BarrierSpec spec;
    spec.k = 5;
    spec.residues = {1, 2, 3, 4};
    spec.zeros["5:1"] = {{{sigma, t}, 1}};
    spec.beta1 = 0.5;
    spec.beta2 = sigma;
    spec.beta3 = sigma;
    return spec;
}

BarrierSpec load_barrier(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open barrier spec " + path);
    BarrierSpec spec;
    bool saw_barrier = false, saw_modulus = false;
    double lo = 1.0, hi = 0.0;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw DataError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            if (key == "barrier") saw_barrier = true;
            else if (key == "modulus") {
                if (!(hs >> spec.k) || spec.k < 3) fail("bad #modulus");
                saw_modulus = true;
            } else if (key == "race") {
                std::string rest;
                hs >> rest;
                std::stringstream rs(rest);
                std::string tok;
                while (std::getline(rs, tok, ','))
                    spec.residues.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
            } else if (key == "beta1") {
                if (!(hs >> spec.beta1)) fail("bad #beta1");
            } else if (key == "constants") {
                if (!(hs >> spec.error_C >> spec.error_Cprime)) fail("bad #constants");
            }
            continue;
        }
        std::istringstream ls(line);
        std::string label;
        double re, im;
        std::uint32_t mult;
        if (!(ls >> label >> re >> im >> mult))
            fail("expected '<label> <Re rho> <Im rho> <multiplicity>'");
        spec.zeros[label].push_back({{re, im}, mult});
        lo = std::min(lo, re);
        hi = std::max(hi, re);
    }
    if (!saw_barrier) throw DataError(path + ": missing #barrier header");
    if (!saw_modulus) throw DataError(path + ": missing #modulus header");
    if (spec.residues.empty()) throw DataError(path + ": missing #race header");
    if (!spec.empty()) {
        spec.beta2 = lo;
        spec.beta3 = hi;
    }
    return spec;
}

std::vector<PairMainTerm> dominant_deltas(double log_x, const BarrierSpec& spec,
                                          const CharacterTable& table) {
    if (log_x < std::log(10.0))
        throw InvalidArgumentError("asymptotic main terms need x >= 10");
    spec.validate(table);

    const double phi = static_cast<double>(table.modulus().phi());
    const double sigma = spec.sigma_max();
    const double tmin = spec.t_min();

    std::vector<PairMainTerm> out;
    for (std::size_t a = 0; a < spec.residues.size(); ++a) {
        for (std::size_t b = a + 1; b < spec.residues.size(); ++b) {
            PairMainTerm pm;
            pm.l1 = spec.residues[a];
            pm.l2 = spec.residues[b];
            std::complex<double> acc = 0.0;
            double err = 0.0;
            for (const auto& [label, zlist] : spec.zeros) {
                const Character& chi = table.by_label(label);
                const std::complex<double> c =
                    chi.cvalue_conj(pm.l1) - chi.cvalue_conj(pm.l2);
                for (const auto& z : zlist) {
                    const double damp = std::exp((z.rho.real() - sigma) * log_x);
                    const double tr = tmin / z.rho.imag();
                    const double phase = z.rho.imag() * log_x;
                    // f(rho) ~ -(x^sigma_rho/(t_rho log x)) x^{i t_rho} i
                    const std::complex<double> xit(std::cos(phase), std::sin(phase));
                    acc += c * (-double(z.multiplicity) * damp * tr) * xit *
                           std::complex<double>(0.0, 1.0);
                    err += spec.error_C * double(z.multiplicity) * damp * tr /
                           z.rho.imag();
                }
            }
            // phi(k) Delta = -2 Re [...] => Delta main in units of scale
            pm.main_ratio = -2.0 / phi * acc.real();
            pm.error_ratio = err;
            pm.background_ratio = spec.error_Cprime * tmin *
                                  std::exp((spec.beta1 - sigma) * log_x) * log_x *
                                  log_x * log_x;
            out.push_back(pm);
        }
    }
    return out;
}

PhaseInequalityResult k5_phase_inequality(double grid_step) {
    if (!(grid_step > 0) || grid_step > 1e-3)
        throw InvalidArgumentError("grid step must be in (0, 1e-3]");
    PhaseInequalityResult res;
    res.grid_max = -std::numeric_limits<double>::infinity();
    const std::uint64_t n = static_cast<std::uint64_t>(std::ceil(2.0 * kPi / grid_step));
    for (std::uint64_t i = 0; i <= n; ++i) {
        const double theta = std::min(2.0 * kPi, i * grid_step);
        const double s = std::sin(theta), c = std::cos(theta);
        const double m = std::min({-s, -0.5 * c + 0.5 * s, c});
        if (m > res.grid_max) {
            res.grid_max = m;
            res.worst_theta = theta;
        }
    }
    res.slack = 2.0 * grid_step * std::sqrt(2.0);
    res.certified = res.grid_max <= -std::sqrt(0.1) + res.slack;
    return res;
}

namespace {

// adjacent-difference exclusion test at one x; returns the margin
// (positive = some required-positive difference is forced negative)
double exclusion_margin(double log_x, const BarrierSpec& spec,
                        const CharacterTable& table,
                        const std::vector<std::uint32_t>& ordering) {
    const auto terms = dominant_deltas(log_x, spec, table);
    auto find = [&](std::uint32_t l1, std::uint32_t l2) -> std::pair<double, double> {
        for (const auto& t : terms) {
            if (t.l1 == l1 && t.l2 == l2) return {t.main_ratio, t.error_ratio};
            if (t.l1 == l2 && t.l2 == l1) return {-t.main_ratio, t.error_ratio};
        }
        throw InvalidArgumentError("ordering residue not raced by the spec");
    };
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < ordering.size(); ++j) {
        const auto [main, err] = find(ordering[j], ordering[j + 1]);
        best = std::max(best, -(main + err));  // how deep below zero it is forced
    }
    return best;
}

}  // namespace

ExclusionVerdict verify_exclusion(const BarrierSpec& spec, const CharacterTable& table,
                                  const std::vector<std::uint32_t>& ordering,
                                  double x_min, double x_max, std::uint64_t n_samples) {
    if (ordering.size() < 2) throw InvalidArgumentError("ordering needs >= 2 residues");
    if (!(x_min >= 10 && x_max > x_min))
        throw InvalidArgumentError("need 10 <= x_min < x_max");
    if (n_samples < 2) throw InvalidArgumentError("need at least 2 samples");

    ExclusionVerdict v;
    v.ordering = ordering;
    v.x_min = x_min;
    v.x_max = x_max;
    v.samples = n_samples;

    if (spec.empty()) {
        v.inconclusive = true;  // no main term at all
        return v;
    }

    const double la = std::log(x_min), lb = std::log(x_max);
    std::vector<double> margins(n_samples);
    std::size_t n_excluded = 0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const double lx = la + (lb - la) * double(i) / double(n_samples - 1);
        margins[i] = exclusion_margin(lx, spec, table, ordering);
        if (margins[i] > 0) ++n_excluded;
    }

    // exclusion certified from the first sample index such that every later
    // sample (including it) has positive margin
    std::size_t threshold = n_samples;
    for (std::size_t i = n_samples; i-- > 0;) {
        if (margins[i] > 0) threshold = i;
        else break;
    }

    v.background_ratio_at_xmax =
        dominant_deltas(lb, spec, table).front().background_ratio;

    for (int d = 0; d < 10; ++d) {
        const std::size_t idx =
            std::min<std::size_t>(n_samples - 1, (d * n_samples + n_samples / 2) / 10);
        v.decile_margins.push_back(margins[idx]);
    }

    if (n_excluded == 0) {
        v.inconclusive = true;  // envelope swamps the main term everywhere
        return v;
    }
    if (threshold == n_samples) {
        v.passed = false;  // excluded somewhere but not on a terminal range
        v.margin = *std::min_element(margins.begin(), margins.end());
        return v;
    }
    v.passed = true;
    v.x_threshold = std::exp(la + (lb - la) * double(threshold) / double(n_samples - 1));
    v.margin = *std::min_element(margins.begin() + threshold, margins.end());
    return v;
}

std::map<std::vector<std::uint32_t>, std::uint64_t> orderings_census(
    const BarrierSpec& spec, const CharacterTable& table, double x_min, double x_max,
    std::uint64_t n_samples) {
    if (!(x_min >= 10 && x_max > x_min))
        throw InvalidArgumentError("need 10 <= x_min < x_max");
    std::map<std::vector<std::uint32_t>, std::uint64_t> census;
    const double la = std::log(x_min), lb = std::log(x_max);
    const std::size_t r = spec.residues.size();
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const double lx =
            n_samples == 1 ? la : la + (lb - la) * double(i) / double(n_samples - 1);
        const auto terms = dominant_deltas(lx, spec, table);
        // scores relative to the first residue; consistent by telescoping
        std::vector<double> score(r, 0.0);
        for (const auto& t : terms) {
            if (t.l1 != spec.residues[0]) continue;
            for (std::size_t j = 0; j < r; ++j)
                if (spec.residues[j] == t.l2) score[j] = -t.main_ratio;
        }
        std::vector<std::size_t> idx(r);
        for (std::size_t j = 0; j < r; ++j) idx[j] = j;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return score[a] > score[b];
        });
        std::vector<std::uint32_t> perm(r);
        for (std::size_t j = 0; j < r; ++j) perm[j] = spec.residues[idx[j]];
        ++census[perm];
    }
    return census;
}

}  // namespace primerace
