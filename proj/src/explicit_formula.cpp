#include "primerace/explicit_formula.hpp"

#include <algorithm>
#include <cmath>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

using cplx = std::complex<double>;

cplx x_pow_rho(double log_x, double beta, double gamma) {
    const double mag = std::exp(beta * log_x);
    const double phase = gamma * log_x;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

// adaptive Simpson for complex-valued integrands
template <class F>
cplx simpson_rec(const F& f, double a, double b, cplx fa, cplx fm, cplx fb,
                 cplx whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const cplx flm = f(lm), frm = f(rm);
    const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const cplx delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
cplx adaptive_simpson(const F& f, double a, double b, double rel_tol) {
    const cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double scale = std::max(std::abs(whole), 1e-30);
    return simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, 40);
}

// integral term of f(rho): (1/rho) * int_2^x t^{rho-1}/log^2 t dt, as
// int e^{rho v}/v^2 dv over v in [log 2, log x].
cplx f_integral_term(cplx rho, double log_x, bool force_simpson = false) {
    const double a = std::log(2.0), b = log_x;
    if (force_simpson || std::abs(rho.imag()) < 50.0) {
        auto integrand = [&](double v) {
            return std::exp(rho * v) / (v * v);
        };
        return adaptive_simpson(integrand, a, b, 1e-8) / rho;
    }
    // repeated integration by parts: I_j = [e^{rho v} v^-j / rho] + (j/rho) I_{j+1}
    cplx total = 0.0;
    cplx coeff = 1.0;  // (j-1)!/rho^{j-2} accumulated progressively
    const cplx ea = std::exp(rho * a), eb = std::exp(rho * b);
    double paj = std::pow(a, -2.0), pbj = std::pow(b, -2.0);
    for (int j = 2; j <= 22; ++j) {
        total += coeff * (eb * pbj - ea * paj) / rho;
        coeff *= static_cast<double>(j) / rho;
        paj /= a;
        pbj /= b;
    }
    return total / rho;
}

cplx f_of_rho(cplx rho, double x, double log_x, FKernel kernel) {
    const cplx main = x_pow_rho(log_x, rho.real(), rho.imag()) / (rho * log_x);
    if (kernel == FKernel::asymptotic) return main;
    (void)x;
    return main + f_integral_term(rho, log_x);
}

}  // namespace

namespace detail {
std::complex<double> f_integral(std::complex<double> rho, double log_x,
                                bool force_simpson) {
    return f_integral_term(rho, log_x, force_simpson);
}
}  // namespace detail

ResidueWeights make_residue_weights(const CharacterTable& table, std::uint32_t l1,
                                    std::uint32_t l2) {
    const auto& m = table.modulus();
    m.index_of(l1);
    m.index_of(l2);
    ResidueWeights w;
    w.k = m.k();
    w.l1 = l1;
    w.l2 = l2;
    for (const auto& chi : table.all()) {
        if (chi.is_principal()) continue;
        w.labels.push_back(chi.label());
        w.coefficients.push_back(chi.cvalue_conj(l1) - chi.cvalue_conj(l2));
    }
    const auto nk = square_root_counts(m);
    w.bias_term = static_cast<std::int64_t>(nk.at(l1)) - static_cast<std::int64_t>(nk.at(l2));
    return w;
}

std::complex<double> psi_chi_truncated(double x, const Character& chi,
                                       const ZeroSet& zs, double T) {
    if (chi.is_principal())
        throw InvalidArgumentError("psi_chi_truncated does not support the principal character");
    if (x < 2) throw InvalidArgumentError("x must be >= 2");
    if (T > zs.t_max)
        throw InvalidArgumentError("truncation height exceeds the completeness bound");

    const double log_x = std::log(x);
    cplx sum = 0.0;
    for (const auto& z : zs.zeros_for(chi.label())) {
        if (z.gamma > T) break;
        const double mult = z.multiplicity;
        if (z.gamma == 0.0) {
            // real zero: its own conjugate, counted once
            sum += mult * std::exp(z.beta * log_x) / z.beta;
            continue;
        }
        const cplx rho(z.beta, z.gamma);
        const cplx term = x_pow_rho(log_x, z.beta, z.gamma) / rho;
        if (chi.is_real())
            sum += mult * 2.0 * term.real();
        else
            sum += mult * term;
    }
    return -sum;
}

double delta_reconstruct(double x, const ResidueWeights& w, const ZeroSet& zs,
                         double T, FKernel kernel) {
    if (x < 10) throw InvalidArgumentError("reconstruction needs x >= 10");
    if (T > zs.t_max)
        throw InvalidArgumentError("truncation height exceeds the completeness bound");
    const double log_x = std::log(x);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < w.labels.size(); ++i) {
        const cplx c = w.coefficients[i];
        if (std::abs(c) < 1e-15) continue;
        cplx inner = 0.0;
        for (const auto& z : zs.zeros_for(w.labels[i])) {
            if (z.gamma > T) break;
            if (z.gamma == 0.0) continue;  // upper-half zeros only
            inner += double(z.multiplicity) * f_of_rho({z.beta, z.gamma}, x, log_x, kernel);
        }
        acc += c * inner;
    }
    return -2.0 * acc.real() -
           static_cast<double>(w.bias_term) * std::sqrt(x) / log_x;
}

std::vector<OscTerm> residue_magnitudes(const ResidueWeights& w, const ZeroSet& zs,
                                        double merge_tol) {
    struct Raw {
        double gamma;
        cplx weighted;  // c_chi * multiplicity
    };
    std::vector<Raw> raw;
    for (std::size_t i = 0; i < w.labels.size(); ++i) {
        for (const auto& z : zs.zeros_for(w.labels[i])) {
            if (z.gamma == 0.0) continue;
            if (std::abs(z.beta - 0.5) > 1e-12)
                throw DataError(
                    "off-line zeros present; hypothetical zero systems belong to the "
                    "barrier module");
            raw.push_back({z.gamma, w.coefficients[i] * double(z.multiplicity)});
        }
    }
    std::sort(raw.begin(), raw.end(),
              [](const Raw& a, const Raw& b) { return a.gamma < b.gamma; });
    std::vector<OscTerm> out;
    for (const auto& r : raw) {
        if (!out.empty() && r.gamma - out.back().gamma <= merge_tol) {
            // residues at (numerically) coinciding ordinates aggregate
            const cplx rho(0.5, out.back().gamma);
            out.back().a += -r.weighted / rho;
        } else {
            const cplx rho(0.5, r.gamma);
            out.push_back({r.gamma, -r.weighted / rho});
        }
    }
    return out;
}

double a_star(double u, const std::vector<OscTerm>& terms, double T, double a0) {
    if (!(T > 0)) throw InvalidArgumentError("T must be positive");
    double acc = a0;
    for (const auto& t : terms) {
        if (t.gamma >= T) break;
        const cplx e(std::cos(t.gamma * u), std::sin(t.gamma * u));
        acc += 2.0 * (1.0 - t.gamma / T) * (t.a * e).real();
    }
    return acc;
}

double a_empirical(double u, const RaceProbe& probe, const RaceState& st,
                   std::uint32_t l1, std::uint32_t l2) {
    const double x = std::exp(u);
    if (x > static_cast<double>(st.x_current()) + 1.0)
        throw InvalidArgumentError("u beyond the sieved range");
    if (x < static_cast<double>(probe.x) ||
        x >= static_cast<double>(probe.x) + 1.0)
        throw InvalidArgumentError("probe does not cover e^u");
    const double d = probe.counters[st.tracked_index(l1)].psi.value() -
                     probe.counters[st.tracked_index(l2)].psi.value();
    return static_cast<double>(st.modulus().phi()) * std::exp(-u / 2.0) * d;
}

DiamondBounds diamond_bounds(const std::vector<OscTerm>& terms, double a0, int N,
                             std::size_t m) {
    if (N < 1) throw InvalidArgumentError("N must be >= 1");
    std::vector<double> mags;
    mags.reserve(terms.size());
    for (const auto& t : terms) mags.push_back(std::abs(t.a));
    std::sort(mags.rbegin(), mags.rend());
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(m, mags.size()); ++i) s += mags[i];
    const double f = 2.0 * N / (N + 1.0) * s;
    return {a0 - f, a0 + f};
}

OscillationReport make_oscillation_report(const ResidueWeights& w, const ZeroSet& zs,
                                          double T, int N, std::size_t m,
                                          const std::vector<double>& u_samples) {
    OscillationReport rep;
    // a0 is the residue at s = 1/2: -(1/(1/2)) sum_chi c_chi m(1/2,chi)
    cplx a0 = 0.0;
    for (std::size_t i = 0; i < w.labels.size(); ++i)
        a0 += -2.0 * w.coefficients[i] *
              static_cast<double>(zs.central_multiplicity(w.labels[i]));
    rep.a0 = a0.real();
    rep.terms = residue_magnitudes(w, zs);
    rep.bounds = diamond_bounds(rep.terms, rep.a0, N, m);
    for (double u : u_samples)
        rep.samples.emplace_back(u, a_star(u, rep.terms, T, rep.a0));
    return rep;
}

KFunctionValue k_functions(std::complex<double> z, const Character& chi,
                           const ZeroSet& zs, double T) {
    if (!(z.imag() > 0)) throw InvalidArgumentError("k/K need Im z > 0");
    if (T > zs.t_max)
        throw InvalidArgumentError("truncation height exceeds the completeness bound");
    KFunctionValue out;
    out.z = z;
    out.truncation_height = T;
    for (const auto& rec : zs.zeros_for(chi.label())) {
        if (rec.gamma > T) break;
        if (rec.gamma == 0.0) continue;
        const cplx rho(rec.beta, rec.gamma);
        const cplx e = std::exp(rho * z);
        out.k_val += double(rec.multiplicity) * e;
        out.K_val += double(rec.multiplicity) * e / rho;
    }
    return out;
}

std::complex<double> f_function(std::complex<double> z, const CharacterTable& table,
                                std::uint32_t l, const ZeroSet& zs, double T) {
    const double phi = static_cast<double>(table.modulus().phi());
    cplx ksum = 0.0;
    cplx central = 0.0;
    for (const auto& chi : table.all()) {
        const cplx weight = chi.cvalue_conj(l);
        ksum += weight * k_functions(z, chi, zs, T).K_val;
        central += weight * static_cast<double>(zs.central_multiplicity(chi.label()));
    }
    return -2.0 * std::exp(-z / 2.0) / phi * ksum - 2.0 / phi * central;
}

PBoundary p_boundary(double x, const CharacterTable& table, std::uint32_t l,
                     const ZeroSet& zs, double T) {
    PBoundary out;
    // linear least squares of Re F(x+iy) against y
    double sy = 0, syy = 0, sv = 0, svy = 0;
    const int n0 = 4, n1 = 12;
    for (int n = n0; n <= n1; ++n) {
        const double y = std::ldexp(1.0, -n);
        const double v = f_function({x, y}, table, l, zs, T).real();
        out.samples.emplace_back(y, v);
        sy += y;
        syy += y * y;
        sv += v;
        svy += v * y;
    }
    const double count = n1 - n0 + 1;
    const double det = count * syy - sy * sy;
    const double slope = (count * svy - sy * sv) / det;
    out.value = (sv - slope * sy) / count;
    double rss = 0;
    for (auto& [y, v] : out.samples) {
        const double r = v - (out.value + slope * y);
        rss += r * r;
    }
    out.residual = std::sqrt(rss / count);
    return out;
}

}  // namespace primerace
