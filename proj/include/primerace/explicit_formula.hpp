#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "primerace/race.hpp"
#include "primerace/residues.hpp"
#include "primerace/zeros.hpp"

namespace primerace {

// Character combination entering phi(k) Delta(x,k,l1,l2): per nonprincipal
// character the coefficient conj(chi)(l1) - conj(chi)(l2), plus the
// square-root-count bias term.
struct ResidueWeights {
    std::uint64_t k = 0;
    std::uint32_t l1 = 0, l2 = 0;
    std::vector<std::string> labels;                 // nonprincipal characters
    std::vector<std::complex<double>> coefficients;  // aligned with labels
    std::int64_t bias_term = 0;                      // N_k(l1) - N_k(l2)
};

ResidueWeights make_residue_weights(const CharacterTable& table, std::uint32_t l1,
                                    std::uint32_t l2);

// How the f(rho) factor of the reconstruction is evaluated.
enum class FKernel {
    quadrature,  // x^rho/(rho log x) plus the exact integral term
    asymptotic,  // x^rho/(rho log x) only
};

// Truncated explicit-formula sum -sum_{0<gamma<=T} m x^rho/rho over the
// listed upper-half zeros of chi.  Real characters fold in the conjugate
// zeros (2 Re); for complex characters the conjugate half belongs to the
// conjugate character and is combined by the caller.
std::complex<double> psi_chi_truncated(double x, const Character& chi,
                                       const ZeroSet& zs, double T);

// Approximation to phi(k) Delta(x,k,l1,l2) from zero data (Lemma-style
// reconstruction): -2 Re sum_chi c_chi sum_rho f(rho) - bias sqrt(x)/log x.
double delta_reconstruct(double x, const ResidueWeights& w, const ZeroSet& zs,
                         double T, FKernel kernel = FKernel::quadrature);

// One oscillation term: ordinate and the residue a_j of the associated
// transform at 1/2 + i gamma_j.
struct OscTerm {
    double gamma = 0.0;
    std::complex<double> a;
};

// a_j = -c_chi n(rho,chi) / rho aggregated over characters whose ordinates
// coincide within merge_tol.  Requires every zero on the critical line.
std::vector<OscTerm> residue_magnitudes(const ResidueWeights& w, const ZeroSet& zs,
                                        double merge_tol = 1e-8);

// a0 + 2 Re sum_{0<gamma<T} (1 - gamma/T) a_j e^{i gamma u}
double a_star(double u, const std::vector<OscTerm>& terms, double T, double a0);

// A(u) = phi(k) e^{-u/2} (psi(e^u,k,l1) - psi(e^u,k,l2)) from sieved counters.
double a_empirical(double u, const RaceProbe& probe, const RaceState& st,
                   std::uint32_t l1, std::uint32_t l2);

struct DiamondBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// a0 -+ (2N/(N+1)) sum over the m largest |a_j|.
DiamondBounds diamond_bounds(const std::vector<OscTerm>& terms, double a0, int N,
                             std::size_t m);

struct OscillationReport {
    double a0 = 0.0;
    std::vector<OscTerm> terms;
    DiamondBounds bounds;
    std::vector<std::pair<double, double>> samples;  // (u, A*_T(u))
};

OscillationReport make_oscillation_report(const ResidueWeights& w, const ZeroSet& zs,
                                          double T, int N, std::size_t m,
                                          const std::vector<double>& u_samples);

// Kaczorowski boundary functions over the listed upper-half zeros.
struct KFunctionValue {
    std::complex<double> z;
    std::complex<double> k_val;  // sum e^{rho z}
    std::complex<double> K_val;  // sum e^{rho z}/rho
    double truncation_height = 0.0;
};

KFunctionValue k_functions(std::complex<double> z, const Character& chi,
                           const ZeroSet& zs, double T);

// F(z,k,l) = -2 e^{-z/2} (1/phi) sum_chi conj chi(l) K(z,chi')
//            - (2/phi) sum_chi conj chi(l) m(1/2,chi)
std::complex<double> f_function(std::complex<double> z, const CharacterTable& table,
                                std::uint32_t l, const ZeroSet& zs, double T);

struct PBoundary {
    double value = 0.0;    // extrapolated Re F(x+i0)
    double residual = 0.0; // linear-fit residual, reported as extrapolation spread
    std::vector<std::pair<double, double>> samples;  // (y, Re F(x+iy))
};

// P(x,k,l) as the y->0+ boundary value of Re F(x+iy), extrapolated linearly
// from y = 2^-4 .. 2^-12.
PBoundary p_boundary(double x, const CharacterTable& table, std::uint32_t l,
                     const ZeroSet& zs, double T);

namespace detail {
// (1/rho) int_2^x t^{rho-1}/log^2 t dt.  force_simpson pins the quadrature
// route so tests can cross-validate it against the series route used for
// large ordinates.
std::complex<double> f_integral(std::complex<double> rho, double log_x,
                                bool force_simpson);
}  // namespace detail

}  // namespace primerace
