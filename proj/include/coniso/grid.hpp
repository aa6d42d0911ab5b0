#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace coniso {

/// Uniform node grid. Node (i,j) sits at (ox + i*h, oy + j*h).
/// Grids are constructed so that the plane origin never coincides with a
/// node: ox and oy are snapped to half-integer multiples of h.
struct GridSpec {
    double ox = 0.0;
    double oy = 0.0;
    double h = 1.0;
    int nx = 0;
    int ny = 0;

    double x(int i) const { return ox + i * h; }
    double y(int j) const { return oy + j * h; }
    int idx(int i, int j) const { return j * nx + i; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

    bool valid() const { return h > 0.0 && nx >= 8 && ny >= 8; }

    // Smallest half-cell-offset grid with n nodes across the longer side
    // whose node hull covers [xmin,xmax] x [ymin,ymax].
    static GridSpec cover(double xmin, double xmax, double ymin, double ymax, int n);
};

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;  // 1 = node belongs to the active domain

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g)
        : grid(g), values(g.size(), 0.0), mask(g.size(), 0) {}

    double& at(int i, int j) { return values[grid.idx(i, j)]; }
    double at(int i, int j) const { return values[grid.idx(i, j)]; }
    bool in(int i, int j) const { return mask[grid.idx(i, j)] != 0; }

    std::size_t count_masked() const;

    // Sample fn on every node; mask everything (or use the given predicate).
    static ScalarField sample(const GridSpec& g,
                              const std::function<double(double, double)>& fn);
    static ScalarField sample(const GridSpec& g,
                              const std::function<double(double, double)>& fn,
                              const std::function<bool(double, double)>& inside);
};

/// 5-point discrete Laplacian (Delta u). Output values are set at nodes whose
/// full 1-ring lies in the input mask; the output mask marks exactly those
/// stencil nodes. Throws "empty stencil set" if no node qualifies.
ScalarField laplacian(const ScalarField& f);

/// Bilinear interpolation of a masked field, falling back to the nearest
/// masked node when the surrounding cell is incomplete.
double interpolate(const ScalarField& f, double x, double y);

}  // namespace coniso
