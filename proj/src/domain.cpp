#include "coniso/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace coniso {

namespace {

double seg_point_distance(const Point& a, const Point& b, double x, double y) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((x - a[0]) * dx + (y - a[1]) * dy) / len2, 0.0, 1.0);
    const double px = a[0] + t * dx - x, py = a[1] + t * dy - y;
    return std::hypot(px, py);
}

// Clip a loop against the half-plane keep(p) >= 0 (Sutherland-Hodgman step).
template <typename Keep, typename Cut>
std::vector<Point> clip_half(const std::vector<Point>& in, Keep keep, Cut cut) {
    std::vector<Point> out;
    out.reserve(in.size() + 4);
    const std::size_t n = in.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& cur = in[k];
        const Point& nxt = in[(k + 1) % n];
        const bool cin = keep(cur) >= 0.0, nin = keep(nxt) >= 0.0;
        if (cin) out.push_back(cur);
        if (cin != nin) out.push_back(cut(cur, nxt));
    }
    return out;
}

double loop_rect_clip_area(const Polyline& loop, double xlo, double xhi, double ylo,
                           double yhi) {
    std::vector<Point> poly = loop.pts;
    auto cut_x = [](double xc) {
        return [xc](const Point& p, const Point& q) -> Point {
            const double t = (xc - p[0]) / (q[0] - p[0]);
            return {xc, p[1] + t * (q[1] - p[1])};
        };
    };
    auto cut_y = [](double yc) {
        return [yc](const Point& p, const Point& q) -> Point {
            const double t = (yc - p[1]) / (q[1] - p[1]);
            return {p[0] + t * (q[0] - p[0]), yc};
        };
    };
    poly = clip_half(poly, [&](const Point& p) { return p[0] - xlo; }, cut_x(xlo));
    if (poly.empty()) return 0.0;
    poly = clip_half(poly, [&](const Point& p) { return xhi - p[0]; }, cut_x(xhi));
    if (poly.empty()) return 0.0;
    poly = clip_half(poly, [&](const Point& p) { return p[1] - ylo; }, cut_y(ylo));
    if (poly.empty()) return 0.0;
    poly = clip_half(poly, [&](const Point& p) { return yhi - p[1]; }, cut_y(yhi));
    if (poly.size() < 3) return 0.0;
    double a2 = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point& p = poly[k];
        const Point& q = poly[(k + 1) % poly.size()];
        a2 += p[0] * q[1] - q[0] * p[1];
    }
    return std::abs(a2) * 0.5;
}

}  // namespace

double Polyline::signed_area() const {
    double a2 = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& p = pts[k];
        const Point& q = pts[(k + 1) % n];
        a2 += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a2;
}

double Polyline::length() const {
    double len = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& p = pts[k];
        const Point& q = pts[(k + 1) % n];
        len += std::hypot(q[0] - p[0], q[1] - p[1]);
    }
    return len;
}

bool Polyline::contains(double x, double y) const {
    bool in = false;
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& p = pts[k];
        const Point& q = pts[(k + 1) % n];
        if ((p[1] > y) != (q[1] > y)) {
            const double xc = p[0] + (y - p[1]) / (q[1] - p[1]) * (q[0] - p[0]);
            if (x < xc) in = !in;
        }
    }
    return in;
}

bool PlanarDomain::contains(double x, double y) const {
    if (!outer.contains(x, y)) return false;
    for (const auto& hole : holes)
        if (hole.contains(x, y)) return false;
    return true;
}

bool PlanarDomain::origin_in_hole() const {
    for (const auto& hole : holes)
        if (hole.contains(0.0, 0.0)) return true;
    return false;
}

bool PlanarDomain::origin_in_closure_or_hole() const {
    return outer.contains(0.0, 0.0);  // holes lie inside the outer loop
}

double PlanarDomain::origin_boundary_distance() const {
    double d = std::numeric_limits<double>::infinity();
    auto scan = [&](const Polyline& loop) {
        const std::size_t n = loop.pts.size();
        for (std::size_t k = 0; k < n; ++k)
            d = std::min(d, seg_point_distance(loop.pts[k], loop.pts[(k + 1) % n], 0.0, 0.0));
    };
    scan(outer);
    for (const auto& hole : holes) scan(hole);
    return d;
}

BBox PlanarDomain::bbox() const {
    BBox b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : outer.pts) {
        b.xmin = std::min(b.xmin, p[0]);
        b.xmax = std::max(b.xmax, p[0]);
        b.ymin = std::min(b.ymin, p[1]);
        b.ymax = std::max(b.ymax, p[1]);
    }
    return b;
}

double PlanarDomain::area() const {
    double a = std::abs(outer.signed_area());
    for (const auto& hole : holes) a -= std::abs(hole.signed_area());
    return a;
}

void PlanarDomain::validate() const {
    if (outer.pts.size() < 3) throw std::invalid_argument("domain: outer loop degenerate");
    for (const auto& hole : holes) {
        if (hole.pts.size() < 3) throw std::invalid_argument("domain: hole loop degenerate");
        for (const auto& p : hole.pts)
            if (!outer.contains(p[0], p[1]))
                throw std::invalid_argument("domain: hole not inside outer loop");
    }
    for (std::size_t i = 0; i < holes.size(); ++i)
        for (std::size_t j = i + 1; j < holes.size(); ++j)
            for (const auto& p : holes[j].pts)
                if (holes[i].contains(p[0], p[1]))
                    throw std::invalid_argument("domain: holes overlap");
    if (origin_boundary_distance() == 0.0)
        throw std::invalid_argument("domain: origin on boundary");
}

PlanarDomain PlanarDomain::disk(double radius, double cx, double cy, int n_vertices) {
    if (radius <= 0.0) throw std::invalid_argument("disk: radius must be positive");
    PlanarDomain d;
    d.outer.pts.reserve(n_vertices);
    for (int k = 0; k < n_vertices; ++k) {
        const double th = 2.0 * std::numbers::pi * k / n_vertices;
        d.outer.pts.push_back({cx + radius * std::cos(th), cy + radius * std::sin(th)});
    }
    return d;
}

PlanarDomain PlanarDomain::annulus(double r_inner, double r_outer, double cx, double cy,
                                   int n_vertices) {
    if (!(0.0 < r_inner && r_inner < r_outer))
        throw std::invalid_argument("annulus: need 0 < r_inner < r_outer");
    PlanarDomain d = disk(r_outer, cx, cy, n_vertices);
    Polyline hole;
    hole.pts.reserve(n_vertices);
    for (int k = n_vertices - 1; k >= 0; --k) {  // clockwise hole loop
        const double th = 2.0 * std::numbers::pi * k / n_vertices;
        hole.pts.push_back({cx + r_inner * std::cos(th), cy + r_inner * std::sin(th)});
    }
    d.holes.push_back(std::move(hole));
    return d;
}

PlanarDomain PlanarDomain::rectangle(double xmin, double ymin, double xmax, double ymax) {
    if (!(xmax > xmin && ymax > ymin)) throw std::invalid_argument("rectangle: empty");
    PlanarDomain d;
    d.outer.pts = {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
    return d;
}

std::vector<std::uint8_t> rasterize(const PlanarDomain& dom, const GridSpec& g) {
    std::vector<std::uint8_t> mask(g.size(), 0);
    auto scan_loop = [&](const Polyline& loop, std::vector<std::vector<double>>& rows) {
        const std::size_t n = loop.pts.size();
        for (std::size_t k = 0; k < n; ++k) {
            const Point& p = loop.pts[k];
            const Point& q = loop.pts[(k + 1) % n];
            if (p[1] == q[1]) continue;
            const double ylo = std::min(p[1], q[1]), yhi = std::max(p[1], q[1]);
            int jlo = static_cast<int>(std::ceil((ylo - g.oy) / g.h));
            int jhi = static_cast<int>(std::floor((yhi - g.oy) / g.h));
            jlo = std::max(jlo, 0);
            jhi = std::min(jhi, g.ny - 1);
            for (int j = jlo; j <= jhi; ++j) {
                const double y = g.y(j);
                if ((p[1] > y) == (q[1] > y)) continue;  // half-open rule
                const double xc = p[0] + (y - p[1]) / (q[1] - p[1]) * (q[0] - p[0]);
                rows[j].push_back(xc);
            }
        }
    };
    std::vector<std::vector<double>> rows(g.ny);
    scan_loop(dom.outer, rows);
    for (const auto& hole : dom.holes) scan_loop(hole, rows);
    for (int j = 0; j < g.ny; ++j) {
        auto& xs = rows[j];
        if (xs.empty()) continue;
        std::sort(xs.begin(), xs.end());
        // inside between alternating crossing pairs
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            int ilo = static_cast<int>(std::ceil((xs[k] - g.ox) / g.h));
            int ihi = static_cast<int>(std::floor((xs[k + 1] - g.ox) / g.h));
            ilo = std::max(ilo, 0);
            ihi = std::min(ihi, g.nx - 1);
            for (int i = ilo; i <= ihi; ++i) mask[g.idx(i, j)] = 1;
        }
    }
    return mask;
}

EdgeIndex::EdgeIndex(const PlanarDomain& dom, const GridSpec& g) : grid_(g) {
    auto add_loop = [&](const Polyline& loop) {
        const std::size_t n = loop.pts.size();
        for (std::size_t k = 0; k < n; ++k)
            segs_.push_back({loop.pts[k], loop.pts[(k + 1) % n]});
    };
    add_loop(dom.outer);
    for (const auto& hole : dom.holes) add_loop(hole);

    cell_ = g.h;
    x0_ = g.ox - 0.5 * g.h;
    y0_ = g.oy - 0.5 * g.h;
    bx_ = g.nx + 1;
    by_ = g.ny + 1;
    buckets_.assign(static_cast<std::size_t>(bx_) * by_, {});
    for (int s = 0; s < static_cast<int>(segs_.size()); ++s) insert(s);
}

void EdgeIndex::insert(int seg_id) {
    const auto& s = segs_[seg_id];
    const double xlo = std::min(s[0][0], s[1][0]), xhi = std::max(s[0][0], s[1][0]);
    const double ylo = std::min(s[0][1], s[1][1]), yhi = std::max(s[0][1], s[1][1]);
    int ilo = std::clamp(static_cast<int>(std::floor((xlo - x0_) / cell_)), 0, bx_ - 1);
    int ihi = std::clamp(static_cast<int>(std::floor((xhi - x0_) / cell_)), 0, bx_ - 1);
    int jlo = std::clamp(static_cast<int>(std::floor((ylo - y0_) / cell_)), 0, by_ - 1);
    int jhi = std::clamp(static_cast<int>(std::floor((yhi - y0_) / cell_)), 0, by_ - 1);
    for (int j = jlo; j <= jhi; ++j)
        for (int i = ilo; i <= ihi; ++i)
            buckets_[static_cast<std::size_t>(j) * bx_ + i].push_back(seg_id);
}

std::vector<int> EdgeIndex::candidates(const Point& a, const Point& b) const {
    std::vector<int> out;
    const double xlo = std::min(a[0], b[0]), xhi = std::max(a[0], b[0]);
    const double ylo = std::min(a[1], b[1]), yhi = std::max(a[1], b[1]);
    int ilo = std::clamp(static_cast<int>(std::floor((xlo - x0_) / cell_)), 0, bx_ - 1);
    int ihi = std::clamp(static_cast<int>(std::floor((xhi - x0_) / cell_)), 0, bx_ - 1);
    int jlo = std::clamp(static_cast<int>(std::floor((ylo - y0_) / cell_)), 0, by_ - 1);
    int jhi = std::clamp(static_cast<int>(std::floor((yhi - y0_) / cell_)), 0, by_ - 1);
    for (int j = jlo; j <= jhi; ++j)
        for (int i = ilo; i <= ihi; ++i)
            for (int s : buckets_[static_cast<std::size_t>(j) * bx_ + i]) out.push_back(s);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<double> EdgeIndex::first_cut(const Point& a, const Point& b) const {
    const double rx = b[0] - a[0], ry = b[1] - a[1];
    double best = std::numeric_limits<double>::infinity();
    for (int sid : candidates(a, b)) {
        const auto& s = segs_[sid];
        const double sx = s[1][0] - s[0][0], sy = s[1][1] - s[0][1];
        const double den = rx * sy - ry * sx;
        if (den == 0.0) continue;
        const double qx = s[0][0] - a[0], qy = s[0][1] - a[1];
        const double t = (qx * sy - qy * sx) / den;
        const double u = (qx * ry - qy * rx) / den;
        if (t > 1e-12 && t <= 1.0 + 1e-12 && u >= -1e-12 && u <= 1.0 + 1e-12)
            best = std::min(best, t);
    }
    if (std::isfinite(best)) return std::min(best, 1.0);
    return std::nullopt;
}

bool EdgeIndex::cell_touched(int i, int j) const {
    // bucket (i,j) covers exactly the node-centered cell of node (i,j)
    if (i < 0 || i >= bx_ || j < 0 || j >= by_) return false;
    return !buckets_[static_cast<std::size_t>(j) * bx_ + i].empty();
}

double clipped_cell_area(const PlanarDomain& dom, double xlo, double xhi, double ylo,
                         double yhi) {
    double a = loop_rect_clip_area(dom.outer, xlo, xhi, ylo, yhi);
    for (const auto& hole : dom.holes) a -= loop_rect_clip_area(hole, xlo, xhi, ylo, yhi);
    return std::max(a, 0.0);
}

}  // namespace coniso
