#include "coniso/poisson.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace coniso {

namespace {

struct System {
    GridSpec grid;
    std::vector<int> node_of;      // unknown index -> grid index
    std::vector<int> unknown_of;   // grid index -> unknown index or -1
    std::vector<double> b;         // rhs + Dirichlet contributions

    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        const int nx = grid.nx;
        const double inv_h2 = 1.0 / (grid.h * grid.h);
        const std::size_t n = node_of.size();
        for (std::size_t k = 0; k < n; ++k) {
            const int id = node_of[k];
            double acc = 4.0 * u[k];
            const int nb[4] = {id - 1, id + 1, id - nx, id + nx};
            for (int t = 0; t < 4; ++t) {
                const int un = unknown_of[nb[t]];
                if (un >= 0) acc -= u[un];
            }
            out[k] = acc * inv_h2;
        }
    }
};

}  // namespace

ScalarField solve_poisson(const PlanarDomain& dom, const ScalarField& rhs,
                          const std::function<double(double, double)>& boundary,
                          double rel_tol, SolveStats* stats) {
    const GridSpec& g = rhs.grid;
    System sys;
    sys.grid = g;
    sys.unknown_of.assign(g.size(), -1);
    const auto interior = rasterize(dom, g);

    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const int id = g.idx(i, j);
            if (!interior[id]) continue;
            sys.unknown_of[id] = static_cast<int>(sys.node_of.size());
            sys.node_of.push_back(id);
        }
    if (sys.node_of.empty()) throw std::runtime_error("poisson: empty stencil set");

    const EdgeIndex edges(dom, g);
    const double inv_h2 = 1.0 / (g.h * g.h);
    sys.b.resize(sys.node_of.size());
    for (std::size_t k = 0; k < sys.node_of.size(); ++k) {
        const int id = sys.node_of[k];
        const int i = id % g.nx, j = id / g.nx;
        if (!std::isfinite(rhs.values[id]))
            throw std::invalid_argument("poisson: rhs not finite on interior node");
        double acc = rhs.values[id];
        const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
        for (int t = 0; t < 4; ++t) {
            const int ni = i + di[t], nj = j + dj[t];
            const int nid = g.idx(ni, nj);
            if (sys.unknown_of[nid] >= 0) continue;
            // Dirichlet neighbor: sample the data at the boundary cut point
            const Point a{g.x(i), g.y(j)};
            const Point b{g.x(ni), g.y(nj)};
            const auto t_cut = edges.first_cut(a, b);
            const double tc = t_cut.value_or(0.5);
            const double bx = a[0] + tc * (b[0] - a[0]);
            const double by = a[1] + tc * (b[1] - a[1]);
            acc += boundary(bx, by) * inv_h2;
        }
        sys.b[k] = acc;
    }

    // preconditioned CG; the diagonal is constant so the preconditioner is a scaling
    const std::size_t n = sys.node_of.size();
    std::vector<double> u(n, 0.0), r = sys.b, z(n), p(n), Ap(n);
    const double diag = 4.0 * inv_h2;
    double bnorm = 0.0;
    for (double v : sys.b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    SolveStats local_stats;
    SolveStats& st = stats ? *stats : local_stats;
    st.residual_history.clear();
    if (bnorm == 0.0) bnorm = 1.0;

    double rz = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = r[k] / diag;
        rz += r[k] * z[k];
    }
    p = z;
    double rnorm = 0.0;
    for (double v : r) rnorm += v * v;
    rnorm = std::sqrt(rnorm);

    const int max_iter = 40 * std::max(g.nx, g.ny) + 200;
    int it = 0;
    while (rnorm / bnorm > rel_tol && it < max_iter) {
        sys.apply(p, Ap);
        double pAp = 0.0;
        for (std::size_t k = 0; k < n; ++k) pAp += p[k] * Ap[k];
        const double alpha = rz / pAp;
        for (std::size_t k = 0; k < n; ++k) {
            u[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
        }
        double rz_new = 0.0;
        rnorm = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            z[k] = r[k] / diag;
            rz_new += r[k] * z[k];
            rnorm += r[k] * r[k];
        }
        rnorm = std::sqrt(rnorm);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
        ++it;
        if (it % 50 == 0 || rnorm / bnorm <= rel_tol)
            st.residual_history.push_back(rnorm / bnorm);
    }
    st.iterations = it;
    st.rel_residual = rnorm / bnorm;
    if (st.rel_residual > rel_tol) {
        std::string hist;
        for (double h : st.residual_history) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), " %.3e", h);
            hist += buf;
        }
        throw std::runtime_error("poisson: linear solve did not converge; residuals:" + hist);
    }

    ScalarField out(g);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[sys.node_of[k]] = u[k];
        out.mask[sys.node_of[k]] = 1;
    }
    return out;
}

ScalarField harmonic_extension(const PlanarDomain& dom, const GridSpec& g,
                               const std::function<double(double, double)>& boundary,
                               double rel_tol, SolveStats* stats) {
    ScalarField zero_rhs(g);
    for (auto& m : zero_rhs.mask) m = 1;
    return solve_poisson(dom, zero_rhs, boundary, rel_tol, stats);
}

}  // namespace coniso
