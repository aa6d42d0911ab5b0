#pragma once

#include "coniso/domain.hpp"
#include "coniso/geometry.hpp"
#include "coniso/weight.hpp"

namespace coniso {

struct CheckOptions {
    int n = 512;              // quadrature resolution
    bool boundary_case = false;  // omega coincides with the ambient domain
    double tol_override = 0.0;   // > 0 replaces the default tolerance model
    bool skip_screen = false;    // callers that have already screened v
};

/// Alexandrov: L_alpha^2 >= (2 gamma(lambda, K0) - K0 M_alpha) M_alpha,
/// with lambda = 1-alpha when the origin lies in the closure of the domain
/// or its holes and lambda = 1 otherwise.
InequalityReport check_alexandrov(const PlanarDomain& dom, const FieldFunction& v,
                                  const ConformalWeight& w, const CheckOptions& opt = {});

/// Bol (Vhat = 1): L_alpha^2 >= 1/2 (8 pi lambda - M_alpha) M_alpha via the
/// K0 = 1/2 specialization of the Alexandrov check.
InequalityReport check_bol(const PlanarDomain& dom, const FieldFunction& v,
                           const ConformalWeight& w, const CheckOptions& opt = {});

struct PointwiseReport {
    double max_interior = 0.0;   // max of e^v over the closed domain
    double max_boundary = 0.0;   // max of e^v over the boundary
    double mass = 0.0;           // M_alpha
    double threshold = 0.0;      // 8 pi (1 - alpha_eff)
    double bound_factor = 0.0;   // (1 - mass/threshold)^{-2}
    double margin = 0.0;         // bound_factor * max_boundary - max_interior
    double tol = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::string origin_rule;
    double alpha = 0.0;
};

/// Pointwise estimate (Vhat = 1): max e^v <= (1 - M/(8 pi (1-alpha)))^{-2}
/// max_boundary e^v whenever M < 8 pi (1-alpha), with the alpha factor
/// dropped when the origin lies outside the closure and the holes.
PointwiseReport check_pointwise(const PlanarDomain& dom, const FieldFunction& v,
                                const ConformalWeight& w, const CheckOptions& opt = {});

/// Discrete strong-subsolution screen: -Delta v <= Vhat e^{g+h_alpha+v} up
/// to tolerance at interior stencil nodes away from the origin cells.
/// Throws when more than 0.1% of the screened nodes violate it.
void subsolution_screen(const PlanarDomain& dom, const FieldFunction& v,
                        const ConformalWeight& w, int n);

}  // namespace coniso
