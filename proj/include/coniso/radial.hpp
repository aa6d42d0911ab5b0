#pragma once

#include <vector>

#include "coniso/grid.hpp"

namespace coniso {

struct RadialParams {
    double N = 0.0;
    double L = 0.0;
    double a = 1.0;
};

/// Radial solution u(r) of -Delta u = r^{2N} e^u + r^{2L} e^{a u} with
/// u(0) = u0, u'(0) = 0, on adaptively chosen nodes graded toward 0.
struct RadialProfile {
    RadialParams params;
    std::vector<double> r;   // strictly increasing, r.front() > 0
    std::vector<double> u;
    std::vector<double> du;  // radial derivative
    double u0 = 0.0;         // center value u(0)
    double tol = 0.0;        // solver tolerance the profile was built with

    double r_min() const { return r.front(); }
    double r_max() const { return r.back(); }
    /// Cubic Hermite evaluation (clamped to the node range).
    double eval_u(double radius) const;
    double eval_du(double radius) const;
    /// Nonlinearity f(r) = r^{2N} e^u + r^{2L} e^{a u} along the profile.
    double rhs(double radius, double u_val) const;
};

RadialProfile solve_radial_ode(double N, double L, double a, double u0, double r_max,
                               double tol = 1e-10);

/// Max ODE residual |-(u'' + u'/r) - f(r,u)| over interior nodes, with u''
/// recovered from the stored derivative samples by 5-point polynomial
/// differentiation.
double equation_residual(const RadialProfile& p);

/// Max |-Delta u - (|x|^{2N} e^u + |x|^{2L} e^{a u})| over stencil nodes
/// at distance > 3h from the origin.
double equation_residual(const ScalarField& u, double N, double L, double a);

}  // namespace coniso
