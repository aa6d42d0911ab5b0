#pragma once

#include <vector>

#include "coniso/domain.hpp"
#include "coniso/geometry.hpp"
#include "coniso/poisson.hpp"
#include "coniso/weight.hpp"

namespace coniso {

/// Splitting of a strong subsolution v into v = eta + w + g1 with
/// -Delta w = f (f = -Delta v - Vhat e^{g+h_alpha+v} <= 0, w = 0 on the
/// boundary), g1 harmonic with g1 = v on the boundary, and eta >= 0
/// vanishing on the boundary. g2 = w + g1 + g is continuous and
/// subharmonic, and eta solves -Delta eta = 2 K-hat e^{g2+h_alpha} e^eta.
struct SubsolutionDecomposition {
    PlanarDomain domain;
    ConformalWeight weight;
    ScalarField v;
    ScalarField w;    // Poisson correction, <= 0
    ScalarField g1;   // harmonic extension of the boundary values of v
    ScalarField eta;  // v - w - g1
    ScalarField g2;   // w + g1 + g
    double tol = 0.0;
    double max_f = 0.0;  // largest f over screened nodes (diagnostic)
};

SubsolutionDecomposition decompose_subsolution(const PlanarDomain& dom,
                                               const ScalarField& v,
                                               const ConformalWeight& w);

/// Level-set bundle of the weighted rearrangement: superlevel measures
/// mu(t) against d tau = e^{g2+h_alpha} dx, the decreasing rearrangement
/// eta*(s), the mass function F(s) with F' = 2 K0 e^{eta*}, and the
/// monotone functionals P_alpha, J_alpha.
struct LevelSetData {
    std::vector<double> s;         // ascending area coordinate in [0, mu0]
    std::vector<double> eta_star;  // nonincreasing, eta_star.front() = t_m
    std::vector<double> F;
    std::vector<double> P;
    std::vector<double> J;
    double t_m = 0.0;
    double mu0 = 0.0;
    double alpha = 0.0;
    double K0 = 0.0;
    double tilde_gamma = 0.0;
    double t_origin = 0.0;  // eta at the origin (NaN when 0 outside omega)
    double s_origin = 0.0;  // area coordinate of the origin level
    double tol = 0.0;
    double tol_P = 0.0;
    double tol_J = 0.0;

    double eval_eta_star(double s_query) const;  // piecewise-linear inverse
};

LevelSetData build_level_data(const SubsolutionDecomposition& dec,
                              const ConformalWeight& w, int n_levels = 256);

/// Excess-curvature integral against e^eta d tau over the whole domain.
double tilde_gamma_plus(const SubsolutionDecomposition& dec, const ConformalWeight& w);

struct MonotonicityReport {
    double min_P = 0.0;           // should be >= -tol_P
    double max_P_decrease = 0.0;  // should be <= tol_P
    double max_J_increase = 0.0;  // should be <= tol_J
    double terminal_margin = 0.0; // P(mu0) - P(0), should be >= -tol_P
    double tol_P = 0.0;
    double tol_J = 0.0;
    bool P_nonnegative = false;
    bool P_nondecreasing = false;
    bool J_nonincreasing = false;
    bool terminal_ok = false;
    bool ok() const { return P_nonnegative && P_nondecreasing && J_nonincreasing && terminal_ok; }
};

MonotonicityReport verify_monotonicity(const LevelSetData& ls);

/// Empirical Lipschitz constant of eta* on the interior window
/// [a_bar, b_bar] of (0, mu0).
double lipschitz_estimate(const LevelSetData& ls, double a_bar, double b_bar);

}  // namespace coniso
