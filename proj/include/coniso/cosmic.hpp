#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coniso/inequalities.hpp"
#include "coniso/radial.hpp"
#include "coniso/weight.hpp"

namespace coniso {

/// Liouville bubble v = log(8 lambda^2 / (1 + lambda^2 |x|^2)^2), the
/// solution of -Delta v = e^v with total mass 8 pi.
FieldFunction flat_bubble(double lambda, double cx = 0.0, double cy = 0.0);

/// Singular bubble with e^{v+h_alpha} = 8 (1-alpha)^2 lambda^2 |x|^{-2 alpha}
/// / (1 + lambda^2 |x|^{2-2 alpha})^2, solving -Delta v = e^{h_alpha + v};
/// total mass 8 pi (1-alpha).
FieldFunction singular_bubble(double alpha, double lambda);

/// Exact radial solution of -Delta u = 2 e^u (the N = L = 0, a = 1 case):
/// u = log(4 lambda^2 / (1 + lambda^2 r^2)^2) on log-spaced nodes.
RadialProfile bubble_profile(double lambda, double r_max, int n_nodes = 4096);

struct TotalMass {
    double beta = 0.0;        // (1/2pi) ∫ f, quadrature plus tail
    double quadrature = 0.0;  // mass inside the truncation radius
    double tail = 0.0;
    double iteration_delta = 0.0;  // change in the tail self-consistency pass
    double tail_exponent = 0.0;    // -r u'(r) at the truncation radius
    double tail_variation = 0.0;   // relative variation over the last decade
};

/// Total mass with tail completion from the logarithmic decay
/// u ~ -beta log r + c, iterated once to self-consistency. Requires the
/// decay regime: -r u'(r) stable within 1% over the last decade.
TotalMass total_mass(const RadialProfile& p, double r_trunc);

/// (1/2pi) ∫_{B_delta} f by cumulative quadrature along the profile.
double local_mass(const RadialProfile& p, double delta);

struct KelvinResult {
    RadialProfile transformed;
    double N_prime = 0.0;  // (beta - 2(N+2))/2
    double L_prime = 0.0;  // (a beta - 2(L+2))/2
    bool integrable_at_origin = false;  // both transformed exponents > -1
    double residual = 0.0;              // ODE residual of the transformed profile
};

/// Kelvin transform u -> u(x/|x|^2) + beta log(1/|x|) on inverted radii.
KelvinResult kelvin_transform(const RadialProfile& p, double beta);

enum class AuxBranch { l_nonnegative, l_negative, swapped };
std::string to_string(AuxBranch b);

struct AuxReport {
    AuxBranch branch = AuxBranch::l_nonnegative;
    bool swapped = false;
    double C_a = 1.0;             // max{1, a} carried by eta_a
    double weight_constant = 1.0; // extra factor on |x|^{2L} after the swap
    RadialParams effective;       // parameters the construction ran with
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;    // min of rhs - (-Delta eta_a)
    double exclusion_radius = 0.0;
    double screen_residual = 0.0; // equation residual of the input
};

/// Auxiliary subsolution eta_a = a xi_a (+ log a for a > 1) with
/// xi_a = u + (1/a) log(1+V_a), V_a = |x|^{2(N-L)} e^{(1-a)u};
/// verifies -Delta eta_a <= W |x|^{2L} e^{eta_a} discretely. For N < L the
/// construction runs on v = a u with parameters (L, N, 1/a) and weight
/// constant a.
struct RadialAuxiliary {
    std::vector<double> r, V_a, xi_a, eta_a, deta_a;
    AuxReport report;
    double eval_eta(double radius) const;  // linear interpolation
};
RadialAuxiliary auxiliary_subsolution(const RadialProfile& p);

struct FieldAuxiliary {
    ScalarField V_a, xi_a, eta_a;
    AuxReport report;
};
FieldAuxiliary auxiliary_subsolution(const ScalarField& u, double N, double L, double a);

struct MassReport {
    double N = 0.0, L = 0.0, a = 0.0, delta = 0.0;
    bool beta_known = false;
    double beta = 0.0;
    double beta_error = 0.0;  // tail self-consistency + decay detection slack
    double local_mass = 0.0;  // (1/2pi) ∫_{B_delta} f
    double M_aNL = 0.0;       // max{1,a} ∫_{B_delta} f
    double threshold = 0.0;   // 8 pi (1 + min{N_-, L_-})
    bool bound_defined = false;
    double pointwise_bound = 0.0;  // (1 - M/threshold)^{-2}
    // Blow-up mass floors, in (1/2pi) ∫ f units
    double floor_finite = 0.0;    // x0 not 0 or infinity
    double floor_origin = 0.0;    // x0 = 0
    bool floor_infinity_known = false;
    double floor_infinity = 0.0;  // x0 = infinity, needs beta
    // verification of the pointwise mechanism on eta_a and on u itself
    bool pointwise_checked = false;
    PointwiseReport eta_report;
    double max_interior_u = 0.0, max_boundary_u = 0.0;
    bool u_bound_holds = false;
    // provenance
    double solver_tol = 0.0, r_trunc = 0.0;
    int grid_n = 0;
};

/// Mass accounting for one radial solution: local and total masses, the
/// pointwise threshold, the blow-up floors, and (when the mass hypothesis
/// holds) the pointwise verification in the auxiliary configuration.
MassReport mass_threshold_report(const RadialProfile& p, double delta, int grid_n = 256,
                                 std::optional<double> beta_hint = std::nullopt);

/// Floor formulas alone, for parameter substitution without a profile.
double blowup_floor_finite(double a);
double blowup_floor_origin(double a, double N);
double blowup_floor_infinity(double a, double N, double beta);

}  // namespace coniso
