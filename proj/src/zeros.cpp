#include "primerace/zeros.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "primerace/errors.hpp"
#include "primerace/residues.hpp"

namespace primerace {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void sort_and_merge(std::vector<ZeroRecord>& zs, std::vector<std::string>& warnings,
                    const std::string& label) {
    if (!std::is_sorted(zs.begin(), zs.end(),
                        [](const ZeroRecord& a, const ZeroRecord& b) {
                            return a.gamma < b.gamma;
                        }))
        warnings.push_back("zeros for " + label + " were not sorted; sorting");
    std::stable_sort(zs.begin(), zs.end(),
                     [](const ZeroRecord& a, const ZeroRecord& b) {
                         if (a.gamma != b.gamma) return a.gamma < b.gamma;
                         return a.beta < b.beta;
                     });
    std::vector<ZeroRecord> merged;
    for (const auto& z : zs) {
        if (!merged.empty() && merged.back().gamma == z.gamma &&
            merged.back().beta == z.beta)
            merged.back().multiplicity += z.multiplicity;
        else
            merged.push_back(z);
    }
    zs = std::move(merged);
}

}  // namespace

const std::vector<ZeroRecord>& ZeroSet::zeros_for(const std::string& label) const {
    static const std::vector<ZeroRecord> empty;
    auto it = per_character.find(label);
    return it == per_character.end() ? empty : it->second;
}

std::uint32_t ZeroSet::central_multiplicity(const std::string& label) const {
    std::uint32_t m = 0;
    for (const auto& z : zeros_for(label))
        if (z.gamma == 0.0 && z.beta == 0.5) m += z.multiplicity;
    return m;
}

bool ZeroSet::has_offline_zeros() const {
    for (const auto& [label, zs] : per_character)
        for (const auto& z : zs)
            if (z.gamma > 0.0 && std::abs(z.beta - 0.5) > 1e-12) return true;
    return false;
}

std::vector<double> ZeroSet::merged_ordinates() const {
    std::vector<double> out;
    for (const auto& [label, zs] : per_character)
        for (const auto& z : zs)
            if (z.gamma > 0.0) out.push_back(z.gamma);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double ZeroSet::max_gamma() const {
    double m = 0.0;
    for (const auto& [label, zs] : per_character)
        if (!zs.empty()) m = std::max(m, zs.back().gamma);
    return m;
}

ZeroSet parse_zeros(std::istream& in, const std::string& name) {
    ZeroSet zs;
    bool have_modulus = false, have_tmax = false;
    std::string line;
    std::size_t lineno = 0;

    auto fail = [&](const std::string& msg) -> void {
        throw DataError(name + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            if (key == "modulus") {
                if (!(hs >> zs.modulus_k) || zs.modulus_k < 3) fail("bad #modulus header");
                have_modulus = true;
            } else if (key == "tmax") {
                if (!(hs >> zs.t_max) || zs.t_max < 0) fail("bad #tmax header");
                have_tmax = true;
            } else if (key == "source") {
                std::getline(hs, zs.source);
                if (!zs.source.empty() && zs.source.front() == ' ')
                    zs.source.erase(zs.source.begin());
            }
            // unknown # lines are ignored (forward compatibility)
            continue;
        }
        std::istringstream ls(line);
        std::string label;
        double beta, gamma;
        std::uint32_t mult;
        if (!(ls >> label >> beta >> gamma >> mult))
            fail("expected '<label> <beta> <gamma> <multiplicity>'");
        if (gamma < 0) fail("negative ordinate");
        if (!(beta > 0.0 && beta < 1.0)) fail("beta outside (0,1)");
        if (mult == 0) fail("zero multiplicity");
        zs.per_character[label].push_back({beta, gamma, mult});
    }

    if (!have_modulus) fail("missing #modulus header");
    if (!have_tmax) fail("missing #tmax completeness declaration");

    // labels must belong to the declared modulus
    CharacterTable table(zs.modulus_k);
    for (const auto& [label, records] : zs.per_character) {
        (void)records;
        table.by_label(label);  // throws DataError for unknown labels
    }

    for (auto& [label, records] : zs.per_character)
        sort_and_merge(records, zs.warnings, label);

    if (zs.t_max > 1.0 && zs.t_max > zs.max_gamma() + 1.0)
        throw DataError(name + ": t_max exceeds max listed ordinate + 1");

    return zs;
}

ZeroSet load_zeros(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open zero file " + path);
    return parse_zeros(in, path);
}

void save_zeros(const ZeroSet& zs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write zero file " + path);
    out << "#modulus " << zs.modulus_k << "\n";
    out << "#tmax " << format_double(zs.t_max) << "\n";
    if (!zs.source.empty()) out << "#source " << zs.source << "\n";
    for (const auto& [label, records] : zs.per_character)
        for (const auto& z : records)
            out << label << ' ' << format_double(z.beta) << ' '
                << format_double(z.gamma) << ' ' << z.multiplicity << "\n";
}

bool haselgrove_check(const ZeroSet& zs, double A) {
    if (A > zs.t_max)
        throw InvalidArgumentError("insufficient data: A exceeds the completeness bound");
    for (const auto& [label, records] : zs.per_character) {
        for (const auto& z : records) {
            if (z.multiplicity == 0) continue;
            if (z.gamma == 0.0) return false;  // real-segment or central zero
            if (z.gamma <= A && std::abs(z.beta - 0.5) > 1e-12) return false;
        }
    }
    return true;
}

IndependenceVerdict n_independence(const ZeroSet& zs,
                                   const std::vector<std::size_t>& subset,
                                   int N, double tol) {
    if (subset.empty()) throw InvalidArgumentError("subset must be nonempty");
    if (N < 1) throw InvalidArgumentError("N must be >= 1");
    if (!(tol > 0)) throw InvalidArgumentError("tolerance must be positive");

    const auto G = zs.merged_ordinates();
    const std::size_t m = subset.size();
    for (auto idx : subset)
        if (idx >= G.size())
            throw InvalidArgumentError("subset index out of range of the ordinate list");

    const double base = 2.0 * N + 1.0;
    double cost = 1.0;
    for (std::size_t i = 0; i < m; ++i) cost *= base;
    if (cost > 1e9)
        throw InvalidArgumentError(
            "refusing N-independence enumeration: (2N+1)^m = " + std::to_string(cost) +
            " exceeds 1e9 coefficient vectors");

    IndependenceVerdict v;
    v.subset = subset;
    v.bound_N = N;
    v.tolerance = tol;

    std::vector<double> gammas(m);
    for (std::size_t i = 0; i < m; ++i) gammas[i] = G[subset[i]];

    std::vector<int> coeff(m, -N);
    for (;;) {
        int abs_sum = 0;
        for (auto c : coeff) abs_sum += std::abs(c);
        if (abs_sum >= 2) {
            ++v.combinations_checked;
            double sum = 0.0;
            for (std::size_t i = 0; i < m; ++i) sum += coeff[i] * gammas[i];
            if (sum >= 0.0 && sum <= zs.t_max) {
                auto it = std::lower_bound(G.begin(), G.end(), sum);
                double best = std::numeric_limits<double>::infinity();
                double nearest = 0.0;
                if (it != G.end() && std::abs(*it - sum) < best) {
                    best = std::abs(*it - sum);
                    nearest = *it;
                }
                if (it != G.begin() && std::abs(*(it - 1) - sum) < best) {
                    best = std::abs(*(it - 1) - sum);
                    nearest = *(it - 1);
                }
                if (best <= tol) v.violations.push_back({coeff, sum, nearest, best});
            }
        }
        std::size_t i = m;
        while (i > 0) {
            --i;
            if (++coeff[i] <= N) break;
            coeff[i] = -N;
            if (i == 0) { i = SIZE_MAX; break; }
        }
        if (i == SIZE_MAX) break;
    }

    v.passed = v.violations.empty();
    return v;
}

std::vector<DensityProfileEntry> zero_density_profile(const ZeroSet& zs, double T) {
    if (T > zs.t_max)
        throw InvalidArgumentError("T exceeds the completeness bound");
    std::vector<DensityProfileEntry> out;
    for (const auto& [label, records] : zs.per_character) {
        DensityProfileEntry e;
        e.label = label;
        for (const auto& z : records)
            if (z.gamma > 0.0 && z.gamma <= T) e.count += z.multiplicity;
        e.ratio_to_TlogT = T > 1.0 ? double(e.count) / (T * std::log(T)) : 0.0;
        out.push_back(e);
    }
    return out;
}

}  // namespace primerace
