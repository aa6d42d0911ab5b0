#include "coniso/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace coniso {

namespace {

constexpr double kPi = std::numbers::pi;

struct LevelCells {
    std::vector<double> eta;   // per covered cell
    std::vector<double> tau;   // e^{g2} * weighted overlap measure
    std::vector<double> x, y;  // node position (for the excess integral)
    double mu_total = 0.0;
};

LevelCells collect_level_cells(const SubsolutionDecomposition& dec,
                               const CellCover& cover) {
    const GridSpec& g = cover.grid;
    LevelCells cells;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t id = g.idx(i, j);
            if (cover.wpow[id] == 0.0) continue;
            double eta_c, g2_c;
            if (dec.eta.mask[id]) {
                eta_c = dec.eta.values[id];
                g2_c = dec.g2.values[id];
            } else {
                // boundary band cell whose node fell outside the mask:
                // eta vanishes on the boundary, g2 from the nearest node
                eta_c = 0.0;
                g2_c = interpolate(dec.g2, g.x(i), g.y(j));
            }
            cells.eta.push_back(eta_c);
            cells.tau.push_back(std::exp(g2_c) * cover.wpow[id]);
            cells.x.push_back(g.x(i));
            cells.y.push_back(g.y(j));
            cells.mu_total += cells.tau.back();
        }
    return cells;
}

}  // namespace

SubsolutionDecomposition decompose_subsolution(const PlanarDomain& dom,
                                               const ScalarField& v,
                                               const ConformalWeight& w) {
    w.validate();
    dom.validate();
    const GridSpec& g = v.grid;
    const double tol = default_tolerance(g.h);

    SubsolutionDecomposition dec;
    dec.domain = dom;
    dec.weight = w;
    dec.tol = tol;

    const auto mask = rasterize(dom, g);
    ScalarField v_dom(g);
    for (std::size_t id = 0; id < g.size(); ++id) {
        if (!mask[id] || !v.mask[id]) continue;
        v_dom.values[id] = v.values[id];
        v_dom.mask[id] = 1;
    }
    if (v_dom.count_masked() == 0)
        throw std::invalid_argument("decompose: field does not cover the domain");
    dec.v = v_dom;

    // screen the strong-subsolution inequality and assemble f = -Δv - Vhat e^{g+h+v}
    const ScalarField lap = laplacian(v_dom);
    ScalarField f(g);
    const double excl2 = 9.0 * g.h * g.h;
    std::size_t screened = 0, violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    int wi = 0, wj = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t id = g.idx(i, j);
            if (!v_dom.mask[id]) continue;
            f.mask[id] = 1;
            if (!lap.mask[id]) continue;  // incomplete stencil: keep f = 0
            const double x = g.x(i), y = g.y(j);
            const double rhs = w.vhat(x, y) *
                               std::exp(w.g(x, y) + w.h_alpha(x, y) + v_dom.values[id]);
            double fv = -lap.values[id] - rhs;
            const bool near_origin = (x * x + y * y <= excl2);
            if (!near_origin) {
                ++screened;
                if (fv > tol * (1.0 + rhs)) {
                    ++violations;
                    if (fv > worst) {
                        worst = fv;
                        wi = i;
                        wj = j;
                    }
                }
            } else {
                fv = std::min(fv, 0.0);  // weights may be unresolved here
            }
            f.values[id] = fv;
            dec.max_f = std::max(dec.max_f, fv);
        }
    if (screened == 0) throw std::runtime_error("decompose: empty stencil set");
    if (violations > 0 &&
        static_cast<double>(violations) / static_cast<double>(screened) > 1e-3) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "decompose: subsolution screen failed at %zu/%zu nodes "
                      "(worst f=%.3e at node %d,%d)",
                      violations, screened, worst, wi, wj);
        throw std::runtime_error(buf);
    }

    dec.w = solve_poisson(dom, f, [](double, double) { return 0.0; });

    // harmonic extension of v on the boundary cut points; w vanishes there
    const ScalarField& vref = v;  // may extend beyond the domain, helps the cut samples
    dec.g1 = harmonic_extension(dom, g, [&](double x, double y) {
        return interpolate(vref, x, y);
    });

    dec.eta = ScalarField(g);
    dec.g2 = ScalarField(g);
    double min_eta = std::numeric_limits<double>::infinity();
    for (std::size_t id = 0; id < g.size(); ++id) {
        if (!dec.w.mask[id] || !dec.g1.mask[id] || !v_dom.mask[id]) continue;
        const int i = static_cast<int>(id) % g.nx, j = static_cast<int>(id) / g.nx;
        dec.eta.values[id] = v_dom.values[id] - dec.w.values[id] - dec.g1.values[id];
        dec.eta.mask[id] = 1;
        dec.g2.values[id] = dec.w.values[id] + dec.g1.values[id] + w.g(g.x(i), g.y(j));
        dec.g2.mask[id] = 1;
        min_eta = std::min(min_eta, dec.eta.values[id]);
    }
    if (min_eta < -tol)
        throw std::runtime_error(
            "decompose: eta positivity violated (non-subharmonic g or bad input)");
    return dec;
}

double tilde_gamma_plus(const SubsolutionDecomposition& dec, const ConformalWeight& w) {
    const CellCover cover = make_cell_cover(dec.domain, dec.eta.grid, w.alpha);
    const LevelCells cells = collect_level_cells(dec, cover);
    double total = 0.0;
    for (std::size_t c = 0; c < cells.eta.size(); ++c) {
        const double khat = w.khat(cells.x[c], cells.y[c]);
        if (khat <= w.K0) continue;
        total += (khat - w.K0) * std::exp(cells.eta[c]) * cells.tau[c];
    }
    return total;
}

LevelSetData build_level_data(const SubsolutionDecomposition& dec,
                              const ConformalWeight& w, int n_levels) {
    if (n_levels < 64) throw std::invalid_argument("level data: need n_levels >= 64");
    const CellCover cover = make_cell_cover(dec.domain, dec.eta.grid, w.alpha);
    const LevelCells cells = collect_level_cells(dec, cover);

    // sort cells by eta descending (stable in the original cell order)
    std::vector<std::size_t> order(cells.eta.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cells.eta[a] > cells.eta[b];
    });

    const double t_m = cells.eta[order.front()];
    if (!(t_m > 0.0)) throw std::runtime_error("level data: degenerate subsolution");

    // distinct positive levels with the cumulative measure above each
    std::vector<double> lev, mu_at;
    double cum = 0.0;
    std::size_t k = 0;
    while (k < order.size()) {
        const double t = cells.eta[order[k]];
        if (t <= 0.0) break;
        // mu(t) counts cells strictly above t
        lev.push_back(t);
        mu_at.push_back(cum);
        while (k < order.size() && cells.eta[order[k]] == t) cum += cells.tau[order[k++]];
    }

    LevelSetData ls;
    ls.t_m = t_m;
    ls.mu0 = cells.mu_total;
    ls.alpha = w.alpha;
    ls.K0 = w.K0;
    ls.tol = dec.tol;
    ls.tilde_gamma = tilde_gamma_plus(dec, w);

    // subsample the distinct levels to n_levels, keeping both ends
    std::vector<std::size_t> pick;
    const std::size_t m = lev.size();
    if (m <= static_cast<std::size_t>(n_levels)) {
        pick.resize(m);
        std::iota(pick.begin(), pick.end(), std::size_t{0});
    } else {
        for (int q = 0; q < n_levels; ++q)
            pick.push_back((static_cast<std::size_t>(q) * (m - 1)) / (n_levels - 1));
        pick.erase(std::unique(pick.begin(), pick.end()), pick.end());
    }

    // descending levels arrive with ascending superlevel measure, which is
    // exactly the ascending area coordinate; close with the full-measure sample
    for (std::size_t q : pick) {
        ls.s.push_back(mu_at[q]);
        ls.eta_star.push_back(lev[q]);
    }
    if (ls.s.empty() || ls.s.back() < ls.mu0) {
        ls.s.push_back(ls.mu0);
        ls.eta_star.push_back(0.0);
    }
    if (ls.s.front() > 0.0) {
        ls.s.insert(ls.s.begin(), 0.0);
        ls.eta_star.insert(ls.eta_star.begin(), t_m);
    }

    // F by exact integration of e^{eta*} on each linear piece; F' = 2 K0 e^{eta*}
    const std::size_t n = ls.s.size();
    ls.F.assign(n, 0.0);
    for (std::size_t q = 1; q < n; ++q) {
        const double ds = ls.s[q] - ls.s[q - 1];
        const double ta = ls.eta_star[q - 1], tb = ls.eta_star[q];
        double seg;
        if (std::abs(tb - ta) > 1e-14)
            seg = ds * (std::exp(tb) - std::exp(ta)) / (tb - ta);
        else
            seg = ds * std::exp(0.5 * (ta + tb));
        ls.F[q] = ls.F[q - 1] + 2.0 * w.K0 * seg;
    }

    const double lam = 1.0 - w.alpha;
    ls.P.assign(n, 0.0);
    ls.J.assign(n, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
        const double Fp = 2.0 * w.K0 * std::exp(ls.eta_star[q]);
        ls.P[q] = 4.0 * kPi * lam * ls.s[q] * Fp - 4.0 * kPi * lam * ls.F[q] +
                  2.0 * ls.tilde_gamma * ls.F[q] + 0.5 * ls.F[q] * ls.F[q];
        if (ls.s[q] > 0.0 && ls.F[q] > 0.0)
            ls.J[q] = ls.s[q] / ls.F[q] - ls.s[q] / (8.0 * kPi * lam);
        else
            ls.J[q] = 1.0 / (2.0 * w.K0 * std::exp(t_m));
    }

    // level of the origin by bilinear interpolation of eta
    if (dec.domain.contains(0.0, 0.0)) {
        ls.t_origin = interpolate(dec.eta, 0.0, 0.0);
        // invert the sampled rearrangement at t_origin
        double s0 = ls.mu0;
        for (std::size_t q = 1; q < n; ++q) {
            if (ls.eta_star[q] <= ls.t_origin) {
                const double ta = ls.eta_star[q - 1], tb = ls.eta_star[q];
                const double frac = (ta - ls.t_origin) / std::max(ta - tb, 1e-300);
                s0 = ls.s[q - 1] + frac * (ls.s[q] - ls.s[q - 1]);
                break;
            }
        }
        ls.s_origin = s0;
    } else {
        ls.t_origin = std::numeric_limits<double>::quiet_NaN();
        ls.s_origin = 0.0;
    }

    ls.tol_P = 10.0 * ls.tol * (1.0 + ls.F.back()) * (1.0 + ls.F.back());
    ls.tol_J = ls.tol / (2.0 * w.K0 * std::exp(t_m));
    return ls;
}

double LevelSetData::eval_eta_star(double s_query) const {
    if (s.empty()) throw std::runtime_error("level data: empty");
    if (s_query <= s.front()) return eta_star.front();
    if (s_query >= s.back()) return eta_star.back();
    const auto it = std::upper_bound(s.begin(), s.end(), s_query);
    const std::size_t q = static_cast<std::size_t>(it - s.begin());
    const double ds = s[q] - s[q - 1];
    if (ds <= 0.0) return eta_star[q];
    const double t = (s_query - s[q - 1]) / ds;
    return eta_star[q - 1] + t * (eta_star[q] - eta_star[q - 1]);
}

MonotonicityReport verify_monotonicity(const LevelSetData& ls) {
    MonotonicityReport rep;
    rep.tol_P = ls.tol_P;
    rep.tol_J = ls.tol_J;
    rep.min_P = std::numeric_limits<double>::infinity();
    for (double p : ls.P) rep.min_P = std::min(rep.min_P, p);
    for (std::size_t q = 1; q < ls.P.size(); ++q) {
        rep.max_P_decrease = std::max(rep.max_P_decrease, ls.P[q - 1] - ls.P[q]);
        rep.max_J_increase = std::max(rep.max_J_increase, ls.J[q] - ls.J[q - 1]);
    }
    rep.terminal_margin = ls.P.back() - ls.P.front();
    rep.P_nonnegative = rep.min_P >= -ls.tol_P;
    rep.P_nondecreasing = rep.max_P_decrease <= ls.tol_P;
    rep.J_nonincreasing = rep.max_J_increase <= ls.tol_J;
    rep.terminal_ok = rep.terminal_margin >= -ls.tol_P;
    return rep;
}

double lipschitz_estimate(const LevelSetData& ls, double a_bar, double b_bar) {
    if (!(0.0 < a_bar && a_bar < b_bar && b_bar < ls.mu0))
        throw std::invalid_argument("lipschitz: window must satisfy 0 < a < b < mu0");
    // difference quotients over uniform steps a few sample gaps wide; single
    // adjacent-sample slopes jitter with the level subsampling
    const int steps = 32;
    const double step = (b_bar - a_bar) / steps;
    double worst = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double sa = a_bar + k * step, sb = sa + step;
        worst = std::max(worst,
                         (ls.eval_eta_star(sa) - ls.eval_eta_star(sb)) / step);
    }
    return worst;
}

}  // namespace coniso
