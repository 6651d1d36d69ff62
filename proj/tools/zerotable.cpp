// Generates critical-line zero tables for Dirichlet L-functions by direct
// evaluation: Hurwitz-zeta Euler-Maclaurin sums combined into L(1/2+it,chi),
// rotated by the completed-L phase so the result is a real function of t
// whose sign changes are exactly the zeros.  Principal characters are handled
// through the inducing L-function (the Riemann zeta function), imprimitive
// ones through the primitive character of the same conductor.
//
// The output is a canonical zero file (see the zeros module) declaring
// completeness up to --tmax.  A phase-based count control rescans windows
// whose zero count falls short of the argument-principle estimate, so close
// pairs are not silently missed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "primerace/errors.hpp"
#include "primerace/residues.hpp"
#include "primerace/zeros.hpp"

using cplx = std::complex<double>;
using primerace::Character;
using primerace::CharacterTable;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------- log Gamma
cplx log_gamma(cplx z) {
    static const double stirling[] = {
        1.0 / 12,   -1.0 / 360,      1.0 / 1260, -1.0 / 1680,
        1.0 / 1188, -691.0 / 360360, 1.0 / 156,  -3617.0 / 122400};
    cplx shift = 0.0;
    while (std::abs(z) < 14.0) {
        shift -= std::log(z);
        z += 1.0;
    }
    cplx r = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi);
    cplx zp = z;
    const cplx z2 = z * z;
    for (double b : stirling) {
        r += b / zp;
        zp *= z2;
    }
    return r + shift;
}

// ------------------------------------------------- Hurwitz zeta on the line
// Euler-Maclaurin evaluation of zeta(1/2 + it, a) with per-a cached tables of
// log(n+a) and (n+a)^{-1/2}.
struct HurwitzLine {
    double a = 1.0;
    std::vector<double> logs;
    std::vector<double> rsqrt;

    // B_{2j} / (2j)!
    static constexpr double kBern[] = {
        8.3333333333333333e-02,  -1.3888888888888889e-03, 3.3068783068783069e-05,
        -8.2671957671957672e-07, 2.0876756987868099e-08,  -5.2841901386874932e-10,
        1.3382536530684679e-11,  -3.3896802963225829e-13, 8.5860620562778446e-15,
        -2.1748686985811618e-16, 5.5090028283602295e-18,  -1.3954464685812523e-19,
        3.5347070396294675e-21};

    explicit HurwitzLine(double a_in, double t_max) : a(a_in) {
        const std::size_t n_max = needed_terms(t_max) + 2;
        logs.resize(n_max);
        rsqrt.resize(n_max);
        for (std::size_t n = 0; n < n_max; ++n) {
            const double w = static_cast<double>(n) + a;
            logs[n] = std::log(w);
            rsqrt[n] = 1.0 / std::sqrt(w);
        }
    }

    static std::size_t needed_terms(double t) {
        return static_cast<std::size_t>(std::max(48.0, 0.70 * std::abs(t)));
    }

    cplx eval(double t) const {
        const cplx s(0.5, t);
        const std::size_t N = std::min(needed_terms(t), logs.size());
        cplx sum = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const double phi = t * logs[n];
            sum += cplx(rsqrt[n] * std::cos(phi), -rsqrt[n] * std::sin(phi));
        }
        const double w = static_cast<double>(N) + a;
        const double lw = std::log(w);
        const cplx w_ms(std::cos(t * lw) / std::sqrt(w), -std::sin(t * lw) / std::sqrt(w));
        sum += w * w_ms / (s - 1.0);  // (N+a)^{1-s} / (s-1)
        sum += 0.5 * w_ms;
        cplx cur = w_ms / w;  // (N+a)^{-s-1}
        cplx poch = s;
        const double w2 = 1.0 / (w * w);
        for (std::size_t j = 0; j < std::size(kBern); ++j) {
            sum += kBern[j] * poch * cur;
            cur *= w2;
            poch *= (s + (2.0 * j + 1.0)) * (s + (2.0 * j + 2.0));
        }
        return sum;
    }
};

// ------------------------------------------------------------- Z functions
// Real-valued rotation of L(1/2+it, chi) for a primitive character (or zeta).
struct ZFunction {
    std::uint64_t q = 1;
    int parity = 0;  // 0 even, 1 odd
    std::vector<std::pair<std::uint32_t, cplx>> coeffs;  // (r, chi(r))
    std::vector<HurwitzLine> hurwitz;                    // aligned with coeffs
    cplx eps_rsqrt = 1.0;                                // epsilon(chi)^{-1/2}
    double log_q;
    std::string label;

    ZFunction(std::uint64_t q_in, int parity_in,
              std::vector<std::pair<std::uint32_t, cplx>> coeffs_in, double t_max,
              std::string label_in)
        : q(q_in), parity(parity_in), coeffs(std::move(coeffs_in)),
          log_q(std::log(double(q_in))), label(std::move(label_in)) {
        for (auto& [r, c] : coeffs)
            hurwitz.emplace_back(double(r) / double(q), t_max);
        // root number eps = tau(chi) / (i^a sqrt(q))
        cplx tau = 0.0;
        for (auto& [r, c] : coeffs)
            tau += c * std::exp(cplx(0.0, 2.0 * kPi * double(r) / double(q)));
        const cplx ia = parity == 0 ? cplx(1, 0) : cplx(0, 1);
        const cplx eps = tau / (ia * std::sqrt(double(q)));
        eps_rsqrt = 1.0 / std::sqrt(eps);
    }

    cplx l_value(double t) const {
        cplx sum = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            sum += coeffs[i].second * hurwitz[i].eval(t);
        // q^{-s} with s = 1/2 + it
        const cplx q_ms(std::cos(t * log_q) / std::sqrt(double(q)),
                        -std::sin(t * log_q) / std::sqrt(double(q)));
        return q_ms * sum;
    }

    // phase of (q/pi)^{(s+a)/2} Gamma((s+a)/2) on the critical line
    double theta(double t) const {
        const cplx half_arg((0.5 + parity) / 2.0, t / 2.0);
        return (t / 2.0) * std::log(double(q) / kPi) + std::imag(log_gamma(half_arg));
    }

    double z(double t) const {
        const double th = theta(t);
        const cplx rot(std::cos(th), std::sin(th));
        return std::real(rot * eps_rsqrt * l_value(t));
    }

    // argument-principle running count estimate (up to a constant offset)
    double expected_count(double t) const { return theta(t) / kPi; }
};

// Build the Z function for a character label mod k, descending to the
// primitive inducing character (or to zeta for the principal one).
ZFunction make_z(const CharacterTable& table, const std::string& label, double t_max) {
    const Character& chi = table.by_label(label);
    if (chi.is_principal())
        return ZFunction(1, 0, {{1, cplx(1.0, 0.0)}}, t_max, label);

    auto build = [&](const Character& prim) {
        const auto& m = prim.modulus();
        const int parity = prim.cvalue(m.k() - 1).real() > 0 ? 0 : 1;
        std::vector<std::pair<std::uint32_t, cplx>> coeffs;
        for (auto r : m.reduced_residues()) coeffs.emplace_back(r, prim.cvalue(r));
        return ZFunction(m.k(), parity, std::move(coeffs), t_max, label);
    };

    const std::uint64_t q = chi.conductor();
    if (q == table.modulus().k()) return build(chi);

    CharacterTable sub(q);
    for (const auto& cand : sub.all()) {
        bool match = true;
        for (auto l : table.modulus().reduced_residues())
            if (std::abs(cand.cvalue(l % q) - chi.cvalue(l)) > 1e-12) {
                match = false;
                break;
            }
        if (match) return build(cand);
    }
    throw primerace::DataError("could not locate the inducing character for " + label);
}

// --------------------------------------------------------------- zero scan
std::vector<double> find_zeros(const ZFunction& zf, double t_max, double step,
                               bool verbose) {
    struct Cell { double a, b, za, zb; };
    std::vector<double> zeros;

    auto bisect = [&](double a, double b, double za, double zb) {
        for (int i = 0; i < 48 && b - a > 1e-13; ++i) {
            const double m = 0.5 * (a + b);
            const double zm = zf.z(m);
            if ((zm > 0) == (za > 0)) { a = m; za = zm; }
            else { b = m; zb = zm; }
        }
        (void)zb;
        return 0.5 * (a + b);
    };

    // scan a window, returning zeros found at this resolution
    auto scan_window = [&](double a, double b, double h, auto&& self) -> std::vector<double> {
        std::vector<double> found;
        double t = a, zt = zf.z(t);
        while (t < b) {
            double u = std::min(b, t + h);
            double zu = zf.z(u);
            if ((zt > 0) != (zu > 0)) found.push_back(bisect(t, u, zt, zu));
            t = u;
            zt = zu;
        }
        // count control: argument-principle estimate across the window
        const double expected = (zf.expected_count(b) - zf.expected_count(a));
        if (static_cast<double>(found.size()) < expected - 1.6 && h > step / 600.0) {
            if (verbose)
                std::fprintf(stderr, "  [%s] rescanning (%.3f,%.3f): found %zu, expect %.2f\n",
                             zf.label.c_str(), a, b, found.size(), expected);
            return self(a, b, h / 8.0, self);
        }
        return found;
    };

    const double window = 25.0;
    double lo = 1e-3;
    while (lo < t_max) {
        const double hi = std::min(t_max, lo + window);
        auto part = scan_window(lo, hi, step, scan_window);
        zeros.insert(zeros.end(), part.begin(), part.end());
        lo = hi;
    }
    std::sort(zeros.begin(), zeros.end());
    return zeros;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet L-function critical-line zero table generator"};
    std::uint64_t modulus = 4;
    double t_max = 100.0;
    double step = 0.05;
    std::string out_path;
    bool include_principal = false;
    bool verbose = false;
    app.add_option("-k,--modulus", modulus, "modulus of the character group")->required();
    app.add_option("-T,--tmax", t_max, "completeness height");
    app.add_option("-o,--out", out_path, "output zero file");
    app.add_option("--step", step, "initial scan step");
    app.add_flag("--include-principal", include_principal,
                 "also list the inducing zeta zeros under the principal label");
    app.add_flag("-v,--verbose", verbose);
    std::vector<double> probe_hurwitz;  // a t
    std::vector<std::string> probe_z;   // label t
    app.add_option("--probe-hurwitz", probe_hurwitz,
                   "print zeta(1/2+it, a) for cross-validation: a t")->expected(2);
    app.add_option("--probe-z", probe_z, "print Z_chi(t): label t")->expected(2);
    CLI11_PARSE(app, argc, argv);

    if (!probe_hurwitz.empty()) {
        HurwitzLine h(probe_hurwitz[0], probe_hurwitz[1] + 1);
        const cplx v = h.eval(probe_hurwitz[1]);
        std::printf("%.16e %.16e\n", v.real(), v.imag());
        return 0;
    }
    if (!probe_z.empty()) {
        CharacterTable t(modulus);
        ZFunction zf = make_z(t, probe_z[0], std::stod(probe_z[1]) + 1);
        std::printf("%.16e\n", zf.z(std::stod(probe_z[1])));
        return 0;
    }

    if (out_path.empty()) {
        std::fprintf(stderr, "--out is required when generating a table\n");
        return 2;
    }

    CharacterTable table(modulus);
    primerace::ZeroSet zs;
    zs.modulus_k = modulus;
    zs.t_max = t_max;
    zs.source = "primerace-zerotable: Euler-Maclaurin Hurwitz evaluation, step " +
                std::to_string(step);

    for (const auto& chi : table.all()) {
        if (chi.is_principal() && !include_principal) continue;
        const std::string label = chi.label();
        ZFunction zf = make_z(table, label, t_max);
        if (verbose) std::fprintf(stderr, "[%s] scanning to %.1f...\n", label.c_str(), t_max);
        auto zeros = find_zeros(zf, t_max, step, verbose);

        const double expected = zf.expected_count(t_max) - zf.expected_count(1e-3);
        std::fprintf(stderr, "[%s] %zu zeros (argument-principle estimate %.2f%+.2f)\n",
                     label.c_str(), zeros.size(), expected,
                     static_cast<double>(zeros.size()) - expected);

        auto& records = zs.per_character[label];
        for (double g : zeros) records.push_back({0.5, g, 1});
    }

    primerace::save_zeros(zs, out_path);
    std::fprintf(stderr, "wrote %s\n", out_path.c_str());
    return 0;
}
