#pragma once

#include <array>
#include <optional>
#include <vector>

#include "coniso/grid.hpp"

namespace coniso {

using Point = std::array<double, 2>;

/// Closed polyline; the segment from back() to front() is implicit.
struct Polyline {
    std::vector<Point> pts;
    double signed_area() const;   // positive for counter-clockwise loops
    double length() const;
    bool contains(double x, double y) const;  // even-odd rule
};

struct BBox {
    double xmin, xmax, ymin, ymax;
};

/// Polygonal Jordan-loop domain: one outer loop, zero or more hole loops.
/// A domain without holes is "simple"; with holes it is "regular" and the
/// hole interiors form the bounded complement component.
struct PlanarDomain {
    Polyline outer;
    std::vector<Polyline> holes;

    bool is_simple() const { return holes.empty(); }
    bool contains(double x, double y) const;
    bool contains_origin() const { return contains(0.0, 0.0); }
    bool origin_in_hole() const;
    /// 0 in closure(domain) union closure(holes) -- the factor-selection test.
    bool origin_in_closure_or_hole() const;
    double origin_boundary_distance() const;
    BBox bbox() const;
    double area() const;

    void validate() const;  // loop simplicity, hole containment, origin off boundary

    static PlanarDomain disk(double radius, double cx = 0.0, double cy = 0.0,
                             int n_vertices = 2048);
    static PlanarDomain annulus(double r_inner, double r_outer, double cx = 0.0,
                                double cy = 0.0, int n_vertices = 2048);
    static PlanarDomain rectangle(double xmin, double ymin, double xmax, double ymax);
};

/// Scanline rasterization: mask of grid nodes strictly inside the domain.
std::vector<std::uint8_t> rasterize(const PlanarDomain& dom, const GridSpec& g);

/// Grid-bucketed boundary segments for O(1) local queries.
class EdgeIndex {
public:
    EdgeIndex(const PlanarDomain& dom, const GridSpec& g);

    /// Earliest parameter t in (0,1] where segment a->b crosses the boundary.
    std::optional<double> first_cut(const Point& a, const Point& b) const;

    /// Does any boundary segment touch the node-centered cell of (i,j)?
    bool cell_touched(int i, int j) const;

private:
    GridSpec grid_;
    std::vector<std::array<Point, 2>> segs_;
    std::vector<std::vector<int>> buckets_;
    int bx_ = 0, by_ = 0;
    double cell_ = 1.0;
    double x0_ = 0.0, y0_ = 0.0;
    void insert(int seg_id);
    std::vector<int> candidates(const Point& a, const Point& b) const;
};

/// Area of the intersection of a convex axis-aligned rectangle with the
/// domain (outer minus holes) via polygon clipping.
double clipped_cell_area(const PlanarDomain& dom, double xlo, double xhi, double ylo,
                         double yhi);

}  // namespace coniso
