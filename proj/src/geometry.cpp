#include "coniso/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace coniso {

namespace {

constexpr double kPi = std::numbers::pi;

// 16-point Gauss-Legendre on [-1,1]
constexpr int kGaussN = 16;
constexpr double kGaussX[kGaussN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGaussW[kGaussN] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// Entry/exit radii of the ray with direction theta through the rectangle.
void ray_rect_chord(double c, double s, double xlo, double xhi, double ylo, double yhi,
                    double& rin, double& rout) {
    double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
    auto slab = [&](double d, double lo, double hi) {
        if (d == 0.0) {
            if (0.0 < lo || 0.0 > hi) t1 = -1.0;  // ray misses slab
            return;
        }
        double a = lo / d, b = hi / d;
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
    };
    slab(c, xlo, xhi);
    slab(s, ylo, yhi);
    if (t1 < t0) {
        rin = rout = 0.0;
    } else {
        rin = std::max(t0, 0.0);
        rout = std::max(t1, 0.0);
    }
}

}  // namespace

double power_weight_over_rect(double xlo, double xhi, double ylo, double yhi,
                              double alpha) {
    const double p = 2.0 - 2.0 * alpha;  // radial antiderivative exponent
    const bool origin_inside = (xlo < 0.0 && xhi > 0.0 && ylo < 0.0 && yhi > 0.0);
    const double cx = 0.5 * (xlo + xhi), cy = 0.5 * (ylo + yhi);
    std::vector<double> cuts;
    const double corners[4][2] = {{xlo, ylo}, {xhi, ylo}, {xhi, yhi}, {xlo, yhi}};
    if (origin_inside) {
        for (auto& c : corners) cuts.push_back(std::atan2(c[1], c[0]));
        cuts.push_back(-kPi);
        cuts.push_back(kPi);
    } else {
        // map corner angles near the center direction to avoid wraparound
        const double ref = std::atan2(cy, cx);
        for (auto& c : corners) {
            double a = std::atan2(c[1], c[0]) - ref;
            a = std::remainder(a, 2.0 * kPi);
            cuts.push_back(a + ref);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        if (b - a < 1e-15) continue;
        const double mid = 0.5 * (b - a), avg = 0.5 * (a + b);
        for (int q = 0; q < kGaussN; ++q) {
            const double th = avg + mid * kGaussX[q];
            double rin, rout;
            ray_rect_chord(std::cos(th), std::sin(th), xlo, xhi, ylo, yhi, rin, rout);
            if (rout <= rin) continue;
            total += kGaussW[q] * mid *
                     (std::pow(rout, p) - std::pow(rin, p)) / p;
        }
    }
    return total;
}

CellCover make_cell_cover(const PlanarDomain& dom, const GridSpec& g, double alpha) {
    if (alpha >= 1.0) throw std::invalid_argument("quadrature: alpha >= 1 not integrable");
    CellCover cover;
    cover.grid = g;
    cover.alpha = alpha;
    cover.area.assign(g.size(), 0.0);
    cover.wpow.assign(g.size(), 0.0);
    const auto mask = rasterize(dom, g);
    EdgeIndex edges(dom, g);
    const double h = g.h, half = 0.5 * h, cell_area = h * h;
    const double near_origin = 3.0 * h;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t id = g.idx(i, j);
            const double x = g.x(i), y = g.y(j);
            double a;
            if (edges.cell_touched(i, j)) {
                a = clipped_cell_area(dom, x - half, x + half, y - half, y + half);
            } else {
                a = mask[id] ? cell_area : 0.0;
            }
            if (a <= 0.0) continue;
            cover.area[id] = a;
            if (alpha == 0.0) {
                cover.wpow[id] = a;
            } else if (std::hypot(x, y) <= near_origin) {
                const double w_full = power_weight_over_rect(x - half, x + half, y - half,
                                                             y + half, alpha);
                cover.wpow[id] = w_full * (a / cell_area);
            } else {
                cover.wpow[id] = std::pow(x * x + y * y, -alpha) * a;
            }
        }
    }
    return cover;
}

double cell_integral(const CellCover& cover, const FieldFunction& exponent) {
    const GridSpec& g = cover.grid;
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t id = g.idx(i, j);
            if (cover.wpow[id] == 0.0) continue;
            const double e = exponent(g.x(i), g.y(j));
            if (!std::isfinite(e))
                throw std::runtime_error("quadrature: non-finite integrand exponent");
            total += std::exp(e) * cover.wpow[id];
        }
    return total;
}

double cell_integral_excess(const CellCover& cover, const ConformalWeight& w,
                            const FieldFunction& exponent) {
    const GridSpec& g = cover.grid;
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t id = g.idx(i, j);
            if (cover.wpow[id] == 0.0) continue;
            const double x = g.x(i), y = g.y(j);
            const double khat = w.khat(x, y);
            if (khat <= w.K0) continue;
            total += (khat - w.K0) * std::exp(exponent(x, y)) * cover.wpow[id];
        }
    return total;
}

namespace {

struct SegmentIntegrand {
    const FieldFunction& v;
    const ConformalWeight& w;
    double operator()(double x, double y) const {
        return std::exp(0.5 * (v(x, y) + w.g(x, y) + w.h_alpha(x, y)));
    }
};

double adaptive_simpson(const SegmentIntegrand& f, const Point& a, const Point& b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const Point m{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    const Point lm{0.5 * (a[0] + m[0]), 0.5 * (a[1] + m[1])};
    const Point rm{0.5 * (m[0] + b[0]), 0.5 * (m[1] + b[1])};
    const double flm = f(lm[0], lm[1]), frm = f(rm[0], rm[1]);
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    const double left = (fa + 4.0 * flm + fm) * len / 12.0;
    const double right = (fm + 4.0 * frm + fb) * len / 12.0;
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double segment_min_origin_dist(const Point& a, const Point& b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(-(a[0] * dx + a[1] * dy) / len2, 0.0, 1.0);
    return std::hypot(a[0] + t * dx, a[1] + t * dy);
}

}  // namespace

double weighted_boundary_length(const PlanarDomain& dom, const FieldFunction& v,
                                const ConformalWeight& w, double origin_clearance,
                                double rel_tol) {
    w.validate();
    SegmentIntegrand f{v, w};
    double total = 0.0;
    auto integrate_loop = [&](const Polyline& loop) {
        const std::size_t n = loop.pts.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Point& a = loop.pts[k];
            const Point& b = loop.pts[(k + 1) % n];
            const double d0 = segment_min_origin_dist(a, b);
            if (d0 == 0.0) throw std::invalid_argument("boundary length: origin on boundary");
            if (d0 < origin_clearance)
                throw std::invalid_argument("boundary length: boundary grazes the origin");
            const Point m{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
            const double fa = f(a[0], a[1]), fm = f(m[0], m[1]), fb = f(b[0], b[1]);
            const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
            const double whole = (fa + 4.0 * fm + fb) * len / 6.0;
            total += adaptive_simpson(f, a, b, fa, fm, fb, whole,
                                      rel_tol * std::abs(whole) + 1e-300, 24);
        }
    };
    integrate_loop(dom.outer);
    for (const auto& hole : dom.holes) integrate_loop(hole);
    return total;
}

double weighted_area(const PlanarDomain& dom, const FieldFunction& v,
                     const ConformalWeight& w, int n) {
    w.validate();
    const BBox b = dom.bbox();
    const GridSpec g = GridSpec::cover(b.xmin, b.xmax, b.ymin, b.ymax, n);
    const CellCover cover = make_cell_cover(dom, g, w.alpha);
    FieldFunction exponent([&](double x, double y) { return v(x, y) + w.g(x, y); });
    return cell_integral(cover, exponent);
}

double gamma_omega(const PlanarDomain& dom, const FieldFunction& v,
                   const ConformalWeight& w, double lambda, int n) {
    w.validate();
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("gamma_omega: lambda must lie in [0,1]");
    const BBox b = dom.bbox();
    const GridSpec g = GridSpec::cover(b.xmin, b.xmax, b.ymin, b.ymax, n);
    const CellCover cover = make_cell_cover(dom, g, w.alpha);
    FieldFunction exponent([&](double x, double y) { return v(x, y) + w.g(x, y); });
    return 2.0 * kPi * lambda - cell_integral_excess(cover, w, exponent);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

double default_tolerance(double h) { return std::max(1e-3, 5.0 * h); }

InequalityReport make_report(double lhs, double rhs, double tol) {
    InequalityReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = lhs - rhs;
    r.rel_slack = r.slack / std::max(lhs, 1e-300);
    r.tol = tol;
    if (r.rel_slack < -tol)
        r.verdict = Verdict::fail;
    else if (std::abs(r.rel_slack) <= tol)
        r.verdict = Verdict::inconclusive;
    else
        r.verdict = Verdict::pass;
    return r;
}

InequalityReport huber_check(const PlanarDomain& dom, const ConformalWeight& w, int n) {
    w.validate();
    dom.validate();
    const BBox b = dom.bbox();
    const double h = std::max(b.xmax - b.xmin, b.ymax - b.ymin) / (n - 1);
    if (dom.origin_boundary_distance() < 0.5 * h)
        throw std::invalid_argument("huber: origin within h/2 of the boundary");
    const FieldFunction zero = FieldFunction::zero();
    const double ell = weighted_boundary_length(dom, zero, w, 0.5 * h);
    const double m = weighted_area(dom, zero, w, n);
    const bool singular_side = dom.origin_in_closure_or_hole();
    const double factor = singular_side ? 4.0 * kPi * (1.0 - w.alpha) : 4.0 * kPi;
    InequalityReport r = make_report(ell * ell, factor * m, default_tolerance(h));
    r.strict_expected = !dom.is_simple();
    r.origin_rule = singular_side ? "singular" : "regular";
    r.alpha = w.alpha;
    r.K0 = w.K0;
    return r;
}

double weighted_contour_length(const ScalarField& eta, double level,
                               const FieldFunction& half_exponent) {
    const GridSpec& g = eta.grid;
    double total = 0.0;
    auto edge_point = [&](double xa, double ya, double va, double xb, double yb,
                          double vb) -> Point {
        const double t = (level - va) / (vb - va);
        return {xa + t * (xb - xa), ya + t * (yb - ya)};
    };
    auto add_seg = [&](const Point& p, const Point& q) {
        const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
        if (len <= 0.0) return;
        const double mx = 0.5 * (p[0] + q[0]), my = 0.5 * (p[1] + q[1]);
        total += len * std::exp(half_exponent(mx, my));
    };
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            if (!eta.in(i, j) || !eta.in(i + 1, j) || !eta.in(i, j + 1) ||
                !eta.in(i + 1, j + 1))
                continue;
            const double x0 = g.x(i), x1 = g.x(i + 1), y0 = g.y(j), y1 = g.y(j + 1);
            const double v00 = eta.at(i, j), v10 = eta.at(i + 1, j);
            const double v01 = eta.at(i, j + 1), v11 = eta.at(i + 1, j + 1);
            int code = 0;
            if (v00 > level) code |= 1;
            if (v10 > level) code |= 2;
            if (v11 > level) code |= 4;
            if (v01 > level) code |= 8;
            if (code == 0 || code == 15) continue;
            // crossing points on each cut edge
            Point pb, pt, pl, pr;
            const bool eb = ((code & 1) != 0) != ((code & 2) != 0);
            const bool er = ((code & 2) != 0) != ((code & 4) != 0);
            const bool et = ((code & 8) != 0) != ((code & 4) != 0);
            const bool el = ((code & 1) != 0) != ((code & 8) != 0);
            if (eb) pb = edge_point(x0, y0, v00, x1, y0, v10);
            if (er) pr = edge_point(x1, y0, v10, x1, y1, v11);
            if (et) pt = edge_point(x0, y1, v01, x1, y1, v11);
            if (el) pl = edge_point(x0, y0, v00, x0, y1, v01);
            switch (code) {
                case 1: case 14: add_seg(pb, pl); break;
                case 2: case 13: add_seg(pb, pr); break;
                case 3: case 12: add_seg(pl, pr); break;
                case 4: case 11: add_seg(pr, pt); break;
                case 6: case 9:  add_seg(pb, pt); break;
                case 7: case 8:  add_seg(pl, pt); break;
                case 5: case 10: {
                    // saddle: resolve by the cell-center average
                    const double vc = 0.25 * (v00 + v10 + v01 + v11);
                    const bool center_above = vc > level;
                    if ((code == 5) == center_above) {
                        add_seg(pl, pb);
                        add_seg(pt, pr);
                    } else {
                        add_seg(pl, pt);
                        add_seg(pb, pr);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return total;
}

}  // namespace coniso
