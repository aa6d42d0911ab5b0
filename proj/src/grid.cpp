#include "coniso/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coniso {

GridSpec GridSpec::cover(double xmin, double xmax, double ymin, double ymax, int n) {
    if (n < 8) throw std::invalid_argument("grid: node count must be >= 8");
    if (!(xmax > xmin) || !(ymax > ymin)) throw std::invalid_argument("grid: empty box");
    const double side = std::max(xmax - xmin, ymax - ymin);
    const double h = side / (n - 1);
    GridSpec g;
    g.h = h;
    // snap the first node to a half-integer multiple of h so |x|=0 is never a node
    g.ox = (std::floor(xmin / h - 0.5) + 0.5) * h;
    g.oy = (std::floor(ymin / h - 0.5) + 0.5) * h;
    g.nx = static_cast<int>(std::ceil((xmax - g.ox) / h)) + 1;
    g.ny = static_cast<int>(std::ceil((ymax - g.oy) / h)) + 1;
    return g;
}

std::size_t ScalarField::count_masked() const {
    std::size_t c = 0;
    for (auto m : mask) c += (m != 0);
    return c;
}

ScalarField ScalarField::sample(const GridSpec& g,
                                const std::function<double(double, double)>& fn) {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            f.values[g.idx(i, j)] = fn(g.x(i), g.y(j));
            f.mask[g.idx(i, j)] = 1;
        }
    return f;
}

ScalarField ScalarField::sample(const GridSpec& g,
                                const std::function<double(double, double)>& fn,
                                const std::function<bool(double, double)>& inside) {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i), y = g.y(j);
            if (!inside(x, y)) continue;
            f.values[g.idx(i, j)] = fn(x, y);
            f.mask[g.idx(i, j)] = 1;
        }
    return f;
}

ScalarField laplacian(const ScalarField& f) {
    const GridSpec& g = f.grid;
    ScalarField out(g);
    const double inv_h2 = 1.0 / (g.h * g.h);
    std::size_t n_set = 0;
    for (int j = 1; j < g.ny - 1; ++j) {
        for (int i = 1; i < g.nx - 1; ++i) {
            if (!f.in(i, j) || !f.in(i - 1, j) || !f.in(i + 1, j) || !f.in(i, j - 1) ||
                !f.in(i, j + 1))
                continue;
            out.values[g.idx(i, j)] =
                (f.at(i - 1, j) + f.at(i + 1, j) + f.at(i, j - 1) + f.at(i, j + 1) -
                 4.0 * f.at(i, j)) * inv_h2;
            out.mask[g.idx(i, j)] = 1;
            ++n_set;
        }
    }
    if (n_set == 0) throw std::runtime_error("laplacian: empty stencil set");
    return out;
}

double interpolate(const ScalarField& f, double x, double y) {
    const GridSpec& g = f.grid;
    double fi = (x - g.ox) / g.h;
    double fj = (y - g.oy) / g.h;
    int i = static_cast<int>(std::floor(fi));
    int j = static_cast<int>(std::floor(fj));
    i = std::clamp(i, 0, g.nx - 2);
    j = std::clamp(j, 0, g.ny - 2);
    const double tx = std::clamp(fi - i, 0.0, 1.0);
    const double ty = std::clamp(fj - j, 0.0, 1.0);
    const bool m00 = f.in(i, j), m10 = f.in(i + 1, j), m01 = f.in(i, j + 1),
               m11 = f.in(i + 1, j + 1);
    if (m00 && m10 && m01 && m11) {
        return (1 - tx) * (1 - ty) * f.at(i, j) + tx * (1 - ty) * f.at(i + 1, j) +
               (1 - tx) * ty * f.at(i, j + 1) + tx * ty * f.at(i + 1, j + 1);
    }
    // fall back to nearest masked node in a growing window
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int radius = 1; radius <= std::max(g.nx, g.ny); ++radius) {
        const int ilo = std::max(0, i - radius), ihi = std::min(g.nx - 1, i + radius);
        const int jlo = std::max(0, j - radius), jhi = std::min(g.ny - 1, j + radius);
        for (int jj = jlo; jj <= jhi; ++jj)
            for (int ii = ilo; ii <= ihi; ++ii) {
                if (!f.in(ii, jj)) continue;
                const double dx = g.x(ii) - x, dy = g.y(jj) - y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = f.at(ii, jj);
                }
            }
        if (std::isfinite(best)) return best;
    }
    throw std::runtime_error("interpolate: field has empty mask");
}

}  // namespace coniso
