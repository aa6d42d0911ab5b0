#include "coniso/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace coniso {

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec quadrature_grid(const PlanarDomain& dom, int n) {
    const BBox b = dom.bbox();
    return GridSpec::cover(b.xmin, b.xmax, b.ymin, b.ymax, n);
}

double grid_tolerance(const PlanarDomain& dom, const CheckOptions& opt) {
    if (opt.tol_override > 0.0) return opt.tol_override;
    return default_tolerance(quadrature_grid(dom, opt.n).h);
}

}  // namespace

void subsolution_screen(const PlanarDomain& dom, const FieldFunction& v,
                        const ConformalWeight& w, int n) {
    const GridSpec g = quadrature_grid(dom, n);
    const auto inside = rasterize(dom, g);
    ScalarField vf(g);
    for (std::size_t id = 0; id < g.size(); ++id) {
        if (!inside[id]) continue;
        const int i = static_cast<int>(id) % g.nx, j = static_cast<int>(id) / g.nx;
        vf.values[id] = v(g.x(i), g.y(j));
        vf.mask[id] = 1;
    }
    if (vf.count_masked() == 0)
        throw std::invalid_argument("screen: domain rasterizes to nothing");
    const ScalarField lap = laplacian(vf);
    const double tol = default_tolerance(g.h);
    const double excl2 = 9.0 * g.h * g.h;
    std::size_t checked = 0, bad = 0;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t id = g.idx(i, j);
            if (!lap.mask[id]) continue;
            const double x = g.x(i), y = g.y(j);
            if (x * x + y * y <= excl2) continue;
            const double rhs =
                w.vhat(x, y) * std::exp(w.g(x, y) + w.h_alpha(x, y) + vf.values[id]);
            const double f = -lap.values[id] - rhs;
            ++checked;
            if (f > tol * (1.0 + rhs)) {
                ++bad;
                worst = std::max(worst, f);
            }
        }
    if (checked == 0) throw std::runtime_error("screen: empty stencil set");
    if (bad > 0 && static_cast<double>(bad) / static_cast<double>(checked) > 1e-3) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "screen: subsolution inequality violated at %zu/%zu nodes (worst %.3e)",
                      bad, checked, worst);
        throw std::runtime_error(buf);
    }
}

InequalityReport check_alexandrov(const PlanarDomain& dom, const FieldFunction& v,
                                  const ConformalWeight& w, const CheckOptions& opt) {
    w.validate();
    dom.validate();
    const GridSpec g = quadrature_grid(dom, opt.n);
    if (dom.origin_boundary_distance() < 0.5 * g.h)
        throw std::invalid_argument("alexandrov: origin within h/2 of the boundary");
    if (!opt.skip_screen) subsolution_screen(dom, v, w, opt.n);

    const bool singular_side = dom.origin_in_closure_or_hole();
    const double lambda = singular_side ? 1.0 - w.alpha : 1.0;
    const double L = weighted_boundary_length(dom, v, w, 0.5 * g.h);
    const double M = weighted_area(dom, v, w, opt.n);
    const double gamma = gamma_omega(dom, v, w, lambda, opt.n);
    const double rhs = (2.0 * gamma - w.K0 * M) * M;

    InequalityReport r = make_report(L * L, rhs, grid_tolerance(dom, opt));
    r.strict_expected = !dom.is_simple();
    r.origin_rule = singular_side ? "singular" : "regular";
    r.alpha = w.alpha;
    r.K0 = w.K0;
    return r;
}

InequalityReport check_bol(const PlanarDomain& dom, const FieldFunction& v,
                           const ConformalWeight& w, const CheckOptions& opt) {
    if (!w.vhat_is_one)
        throw std::invalid_argument("bol: Vhat must be 1 (use check_alexandrov)");
    ConformalWeight w_bol = w;
    w_bol.K0 = 0.5;  // the Bol constant; gamma reduces to 2 pi lambda exactly
    return check_alexandrov(dom, v, w_bol, opt);
}

PointwiseReport check_pointwise(const PlanarDomain& dom, const FieldFunction& v,
                                const ConformalWeight& w, const CheckOptions& opt) {
    if (!w.vhat_is_one)
        throw std::invalid_argument("pointwise: Vhat must be 1 (use check_alexandrov)");
    w.validate();
    dom.validate();
    const GridSpec g = quadrature_grid(dom, opt.n);
    if (dom.origin_boundary_distance() < 0.5 * g.h)
        throw std::invalid_argument("pointwise: origin within h/2 of the boundary");
    if (!opt.skip_screen) subsolution_screen(dom, v, w, opt.n);

    PointwiseReport rep;
    const bool singular_side = dom.origin_in_closure_or_hole();
    rep.origin_rule = singular_side ? "singular" : "regular";
    rep.alpha = w.alpha;
    const double alpha_eff = singular_side ? w.alpha : 0.0;
    rep.threshold = 8.0 * kPi * (1.0 - alpha_eff);
    rep.mass = weighted_area(dom, v, w, opt.n);
    rep.tol = grid_tolerance(dom, opt);
    if (rep.mass >= rep.threshold)
        throw std::runtime_error("pointwise: mass above threshold; bound void");
    rep.bound_factor = std::pow(1.0 - rep.mass / rep.threshold, -2.0);

    double mb = -std::numeric_limits<double>::infinity();
    auto scan_boundary = [&](const Polyline& loop) {
        const std::size_t nseg = loop.pts.size();
        for (std::size_t k = 0; k < nseg; ++k) {
            const Point& a = loop.pts[k];
            const Point& b = loop.pts[(k + 1) % nseg];
            mb = std::max(mb, v(a[0], a[1]));
            mb = std::max(mb, v(0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])));
        }
    };
    scan_boundary(dom.outer);
    for (const auto& hole : dom.holes) scan_boundary(hole);

    double mi = mb;
    const auto inside = rasterize(dom, g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (inside[g.idx(i, j)]) mi = std::max(mi, v(g.x(i), g.y(j)));

    rep.max_interior = std::exp(mi);
    rep.max_boundary = std::exp(mb);
    rep.margin = rep.bound_factor * rep.max_boundary - rep.max_interior;
    const bool ok = rep.max_interior <=
                    rep.bound_factor * rep.max_boundary + rep.tol * rep.max_boundary;
    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    return rep;
}

}  // namespace coniso
