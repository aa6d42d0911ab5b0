#include "coniso/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coniso {

namespace {

struct State {
    double u, p;  // u and u' = p
};

inline double nonlinearity(double r, double u, const RadialParams& q) {
    return std::pow(r, 2.0 * q.N) * std::exp(u) + std::pow(r, 2.0 * q.L) * std::exp(q.a * u);
}

inline State deriv(double r, const State& y, const RadialParams& q) {
    return {y.p, -y.p / r - nonlinearity(r, y.u, q)};
}

// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

}  // namespace

RadialProfile solve_radial_ode(double N, double L, double a, double u0, double r_max,
                               double tol) {
    if (!(N > -1.0 && L > -1.0))
        throw std::invalid_argument("radial: need N > -1 and L > -1");
    if (!(a > 0.0)) throw std::invalid_argument("radial: need a > 0");
    if (!(r_max > 0.0 && tol > 0.0))
        throw std::invalid_argument("radial: need r_max > 0 and tol > 0");

    RadialProfile prof;
    prof.params = {N, L, a};
    prof.u0 = u0;
    prof.tol = tol;

    // series start: u ~ u0 - e^{u0} r^{2N+2}/(2N+2)^2 - e^{a u0} r^{2L+2}/(2L+2)^2
    const double pn = 2.0 * N + 2.0, pl = 2.0 * L + 2.0;
    const double pmin = 2.0 * std::min(N, L) + 2.0;
    const double r0 = std::min(1e-4, std::pow(tol, 1.0 / pmin));
    const double cn = std::exp(u0) / (pn * pn), cl = std::exp(a * u0) / (pl * pl);
    State y;
    y.u = u0 - cn * std::pow(r0, pn) - cl * std::pow(r0, pl);
    y.p = -cn * pn * std::pow(r0, pn - 1.0) - cl * pl * std::pow(r0, pl - 1.0);

    double r = r0;
    double h = 0.01 * r0;
    const double grading = 0.008;  // cap h <= grading * r, keeps the derivative stencils tight
    prof.r.push_back(r);
    prof.u.push_back(y.u);
    prof.du.push_back(y.p);

    State k1 = deriv(r, y, prof.params);
    const std::size_t max_nodes = 2'000'000;
    while (r < r_max) {
        h = std::min(h, grading * r);
        if (r + 1.4 * h >= r_max) h = r_max - r;  // absorb the remainder, no sliver step
        if (!(h > 0.0) || r + h == r)
            throw std::runtime_error("radial: step size underflow");
        const State k2 = deriv(r + C2 * h, {y.u + h * A21 * k1.u, y.p + h * A21 * k1.p},
                               prof.params);
        const State k3 = deriv(r + C3 * h,
                               {y.u + h * (A31 * k1.u + A32 * k2.u),
                                y.p + h * (A31 * k1.p + A32 * k2.p)},
                               prof.params);
        const State k4 = deriv(r + C4 * h,
                               {y.u + h * (A41 * k1.u + A42 * k2.u + A43 * k3.u),
                                y.p + h * (A41 * k1.p + A42 * k2.p + A43 * k3.p)},
                               prof.params);
        const State k5 =
            deriv(r + C5 * h,
                  {y.u + h * (A51 * k1.u + A52 * k2.u + A53 * k3.u + A54 * k4.u),
                   y.p + h * (A51 * k1.p + A52 * k2.p + A53 * k3.p + A54 * k4.p)},
                  prof.params);
        const State k6 =
            deriv(r + h,
                  {y.u + h * (A61 * k1.u + A62 * k2.u + A63 * k3.u + A64 * k4.u + A65 * k5.u),
                   y.p + h * (A61 * k1.p + A62 * k2.p + A63 * k3.p + A64 * k4.p + A65 * k5.p)},
                  prof.params);
        const State y_new{
            y.u + h * (B1 * k1.u + B3 * k3.u + B4 * k4.u + B5 * k5.u + B6 * k6.u),
            y.p + h * (B1 * k1.p + B3 * k3.p + B4 * k4.p + B5 * k5.p + B6 * k6.p)};
        const State k7 = deriv(r + h, y_new, prof.params);
        const double err_u =
            h * (E1 * k1.u + E3 * k3.u + E4 * k4.u + E5 * k5.u + E6 * k6.u + E7 * k7.u);
        const double err_p =
            h * (E1 * k1.p + E3 * k3.p + E4 * k4.p + E5 * k5.p + E6 * k6.p + E7 * k7.p);
        const double su = tol * (1.0 + std::max(std::abs(y.u), std::abs(y_new.u)));
        const double sp = tol * (1.0 + std::max(std::abs(y.p), std::abs(y_new.p)));
        const double err = std::sqrt(0.5 * ((err_u / su) * (err_u / su) +
                                            (err_p / sp) * (err_p / sp)));
        if (err <= 1.0) {
            r += h;
            y = y_new;
            k1 = k7;  // FSAL
            prof.r.push_back(r);
            prof.u.push_back(y.u);
            prof.du.push_back(y.p);
            if (y.u > u0 + 100.0)
                throw std::runtime_error("radial: integrator blow-up (u unbounded)");
            if (prof.r.size() > max_nodes)
                throw std::runtime_error("radial: node budget exceeded");
        }
        const double scale = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(scale, 0.2, 5.0);
    }
    return prof;
}

double RadialProfile::rhs(double radius, double u_val) const {
    return nonlinearity(radius, u_val, params);
}

namespace {

std::size_t locate(const std::vector<double>& r, double x) {
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t k = static_cast<std::size_t>(it - r.begin());
    if (k == 0) return 0;
    if (k >= r.size()) return r.size() - 2;
    return k - 1;
}

}  // namespace

double RadialProfile::eval_u(double radius) const {
    const double x = std::clamp(radius, r.front(), r.back());
    const std::size_t k = locate(r, x);
    const double h = r[k + 1] - r[k];
    const double t = (x - r[k]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * u[k] + h * h10 * du[k] + h01 * u[k + 1] + h * h11 * du[k + 1];
}

double RadialProfile::eval_du(double radius) const {
    const double x = std::clamp(radius, r.front(), r.back());
    const std::size_t k = locate(r, x);
    const double h = r[k + 1] - r[k];
    const double t = (x - r[k]) / h;
    // derivative of the cubic Hermite basis
    const double g00 = 6 * t * (t - 1) / h, g10 = (3 * t - 1) * (t - 1);
    const double g01 = -6 * t * (t - 1) / h, g11 = t * (3 * t - 2);
    return g00 * u[k] + g10 * du[k] + g01 * u[k + 1] + g11 * du[k + 1];
}

namespace {

// u'' at node i from the degree-4 Lagrange fit of du through the 5 nodes
// {base, base+k, ..., base+4k}; the window need not be centered on i
double strided_second_derivative(const std::vector<double>& r,
                                 const std::vector<double>& du, std::size_t i,
                                 std::size_t base, std::size_t k) {
    const std::size_t idx[5] = {base, base + k, base + 2 * k, base + 3 * k, base + 4 * k};
    double upp = 0.0;
    for (int m = 0; m < 5; ++m) {
        double dsum = 0.0;
        for (int l = 0; l < 5; ++l) {
            if (l == m) continue;
            double prod = 1.0;
            for (int q = 0; q < 5; ++q) {
                if (q == m || q == l) continue;
                prod *= (r[i] - r[idx[q]]) / (r[idx[m]] - r[idx[q]]);
            }
            dsum += prod / (r[idx[m]] - r[idx[l]]);
        }
        upp += dsum * du[idx[m]];
    }
    return upp;
}

// u'' at node i from a least-squares quartic fit of du over all nodes in
// [lo, hi]; averaging suppresses quantization noise in the stored samples
double ls_second_derivative(const std::vector<double>& r, const std::vector<double>& du,
                            std::size_t i, std::size_t lo, std::size_t hi) {
    const double scale = std::max(r[hi] - r[i], r[i] - r[lo]);
    double ata[5][5] = {};
    double atb[5] = {};
    for (std::size_t m = lo; m <= hi; ++m) {
        const double t = (r[m] - r[i]) / scale;
        double basis[5] = {1.0, t, t * t, t * t * t, t * t * t * t};
        for (int p = 0; p < 5; ++p) {
            atb[p] += basis[p] * du[m];
            for (int q = 0; q < 5; ++q) ata[p][q] += basis[p] * basis[q];
        }
    }
    // solve the 5x5 normal equations by Gaussian elimination with pivoting
    int perm[5] = {0, 1, 2, 3, 4};
    for (int c = 0; c < 5; ++c) {
        int piv = c;
        for (int rr = c + 1; rr < 5; ++rr)
            if (std::abs(ata[perm[rr]][c]) > std::abs(ata[perm[piv]][c])) piv = rr;
        std::swap(perm[c], perm[piv]);
        const double d = ata[perm[c]][c];
        for (int rr = c + 1; rr < 5; ++rr) {
            const double fct = ata[perm[rr]][c] / d;
            for (int cc = c; cc < 5; ++cc) ata[perm[rr]][cc] -= fct * ata[perm[c]][cc];
            atb[perm[rr]] -= fct * atb[perm[c]];
        }
    }
    double coef[5];
    for (int c = 4; c >= 0; --c) {
        double acc = atb[perm[c]];
        for (int cc = c + 1; cc < 5; ++cc) acc -= ata[perm[c]][cc] * coef[cc];
        coef[c] = acc / ata[perm[c]][c];
    }
    return coef[1] / scale;  // d(du)/dr at r_i
}

}  // namespace

double equation_residual(const RadialProfile& p) {
    const std::size_t n = p.r.size();
    if (n < 7) throw std::invalid_argument("residual: profile too short");
    // several stencil widths: wide ones average out rounding noise in the
    // stored derivatives, the narrow one controls truncation in the tail;
    // near the ends the wide windows become one-sided
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double target = p.rhs(p.r[i], p.u[i]);
        const double upp5 = strided_second_derivative(p.r, p.du, i, i - 2, 1);
        double best = std::abs(-(upp5 + p.du[i] / p.r[i]) - target);
        for (std::size_t k : {std::size_t{8}, std::size_t{64}}) {
            if (n <= 4 * k) break;
            const std::size_t base =
                std::min(i >= 2 * k ? i - 2 * k : std::size_t{0}, n - 1 - 4 * k);
            const double upp = strided_second_derivative(p.r, p.du, i, base, k);
            best = std::min(best, std::abs(-(upp + p.du[i] / p.r[i]) - target));
        }
        for (std::size_t hw : {std::size_t{16}, std::size_t{128}}) {
            if (n <= 2 * hw) break;
            const std::size_t lo = (i >= hw) ? i - hw : 0;
            const std::size_t hi = std::min(lo + 2 * hw, n - 1);
            const double upp = ls_second_derivative(p.r, p.du, i, lo, hi);
            best = std::min(best, std::abs(-(upp + p.du[i] / p.r[i]) - target));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double equation_residual(const ScalarField& u, double N, double L, double a) {
    const ScalarField lap = laplacian(u);
    const GridSpec& g = u.grid;
    const double excl = 3.0 * g.h;
    double worst = 0.0;
    bool any = false;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!lap.in(i, j)) continue;
            const double x = g.x(i), y = g.y(j);
            const double r2 = x * x + y * y;
            if (r2 <= excl * excl) continue;
            const double uv = u.at(i, j);
            const double f = std::pow(r2, N) * std::exp(uv) + std::pow(r2, L) * std::exp(a * uv);
            worst = std::max(worst, std::abs(-lap.at(i, j) - f));
            any = true;
        }
    if (!any) throw std::runtime_error("residual: empty stencil set");
    return worst;
}

}  // namespace coniso
