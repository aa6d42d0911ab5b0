#include "coniso/cosmic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace coniso {

namespace {

constexpr double kPi = std::numbers::pi;

// 4-point Gauss-Legendre on [-1,1]
constexpr double kG4X[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                            0.8611363115940526};
constexpr double kG4W[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                            0.3478548451374538};

// mass of the series piece below the first node
double center_mass(const RadialProfile& p) {
    const double r0 = p.r.front();
    const double pn = 2.0 * p.params.N + 2.0, pl = 2.0 * p.params.L + 2.0;
    return std::exp(p.u0) * std::pow(r0, pn) / pn +
           std::exp(p.params.a * p.u0) * std::pow(r0, pl) / pl;
}

// ∫ f(r,u) r dr over [lo,hi] with Hermite-interpolated u
double interval_mass(const RadialProfile& p, double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) {
        const double r = mid + half * kG4X[q];
        acc += kG4W[q] * p.rhs(r, p.eval_u(r)) * r;
    }
    return acc * half;
}

double cumulative_mass(const RadialProfile& p, double r_to) {
    double m = center_mass(p);
    for (std::size_t i = 0; i + 1 < p.r.size(); ++i) {
        if (p.r[i] >= r_to) break;
        m += interval_mass(p, p.r[i], std::min(p.r[i + 1], r_to));
    }
    return m;
}

// stable log(1+e^x)
double log1p_exp(double x) {
    if (x > 36.0) return x + std::exp(-x);
    if (x < -36.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

// stable e^x/(1+e^x)
double logistic(double x) {
    if (x > 36.0) return 1.0;
    if (x < -36.0) return std::exp(x);
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// u'' at node i from the degree-4 fit of u' through nodes [i-2, i+2]
double second_derivative5(const std::vector<double>& r, const std::vector<double>& du,
                          std::size_t i) {
    double upp = 0.0;
    for (std::size_t m = i - 2; m <= i + 2; ++m) {
        double dsum = 0.0;
        for (std::size_t l = i - 2; l <= i + 2; ++l) {
            if (l == m) continue;
            double prod = 1.0;
            for (std::size_t q = i - 2; q <= i + 2; ++q) {
                if (q == m || q == l) continue;
                prod *= (r[i] - r[q]) / (r[m] - r[q]);
            }
            dsum += prod / (r[m] - r[l]);
        }
        upp += dsum * du[m];
    }
    return upp;
}

}  // namespace

FieldFunction flat_bubble(double lambda, double cx, double cy) {
    if (!(lambda > 0.0)) throw std::invalid_argument("bubble: lambda must be positive");
    return FieldFunction([lambda, cx, cy](double x, double y) {
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        return std::log(8.0 * lambda * lambda) - 2.0 * std::log1p(lambda * lambda * r2);
    });
}

FieldFunction singular_bubble(double alpha, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("bubble: lambda must be positive");
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("bubble: alpha must lie in [0,1)");
    const double c = std::log(8.0 * (1.0 - alpha) * (1.0 - alpha) * lambda * lambda);
    const double m = 2.0 - 2.0 * alpha;
    return FieldFunction([c, m, lambda](double x, double y) {
        const double r = std::hypot(x, y);
        return c - 2.0 * std::log1p(lambda * lambda * std::pow(r, m));
    });
}

RadialProfile bubble_profile(double lambda, double r_max, int n_nodes) {
    if (!(lambda > 0.0 && r_max > 0.0 && n_nodes >= 16))
        throw std::invalid_argument("bubble profile: bad parameters");
    RadialProfile p;
    p.params = {0.0, 0.0, 1.0};
    p.u0 = std::log(4.0 * lambda * lambda);
    p.tol = 1e-14;
    const double r0 = 1e-6;
    const double step = std::log(r_max / r0) / (n_nodes - 1);
    p.r.resize(n_nodes);
    p.u.resize(n_nodes);
    p.du.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        const double r = r0 * std::exp(step * i);
        const double l2r2 = lambda * lambda * r * r;
        p.r[i] = r;
        p.u[i] = p.u0 - 2.0 * std::log1p(l2r2);
        p.du[i] = -4.0 * lambda * lambda * r / (1.0 + l2r2);
    }
    return p;
}

TotalMass total_mass(const RadialProfile& p, double r_trunc) {
    if (r_trunc > p.r_max() * (1.0 + 1e-12))
        throw std::invalid_argument("total mass: profile does not extend to r_trunc");
    if (r_trunc < 10.0 * p.r_min())
        throw std::invalid_argument("total mass: truncation radius too small");

    TotalMass tm;
    // decay detection over the last decade: -r u'(r) stable within 1%
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        if (p.r[i] < 0.1 * r_trunc || p.r[i] > r_trunc) continue;
        const double psi = -p.r[i] * p.du[i];
        lo = std::min(lo, psi);
        hi = std::max(hi, psi);
        mean += psi;
        ++cnt;
    }
    if (cnt < 4) throw std::runtime_error("total mass: too few nodes in the last decade");
    mean /= static_cast<double>(cnt);
    tm.tail_exponent = -r_trunc * p.eval_du(r_trunc);
    tm.tail_variation = (hi - lo) / std::max(std::abs(mean), 1e-300);
    if (tm.tail_variation > 0.01)
        throw std::runtime_error("total mass: profile not in decay regime; increase r_trunc");

    tm.quadrature = cumulative_mass(p, r_trunc);
    const double N = p.params.N, L = p.params.L, a = p.params.a;
    const double u_t = p.eval_u(r_trunc);
    auto tail_for = [&](double beta) -> double {
        const double c = u_t + beta * std::log(r_trunc);
        if (!(beta > 2.0 * N + 2.0) || !(a * beta > 2.0 * L + 2.0))
            return std::numeric_limits<double>::infinity();
        return std::exp(c) * std::pow(r_trunc, 2.0 * N + 2.0 - beta) / (beta - 2.0 * N - 2.0) +
               std::exp(a * c) * std::pow(r_trunc, 2.0 * L + 2.0 - a * beta) /
                   (a * beta - 2.0 * L - 2.0);
    };
    double beta = tm.tail_exponent;  // -r u' equals the enclosed mass
    const double beta1 = tm.quadrature + tail_for(beta);
    const double beta2 = tm.quadrature + tail_for(beta1);
    if (!std::isfinite(beta2))
        throw std::runtime_error("total mass: tail integral divergent at the detected decay");
    tm.tail = beta2 - tm.quadrature;
    tm.beta = beta2;
    tm.iteration_delta = std::abs(beta2 - beta1);
    return tm;
}

double local_mass(const RadialProfile& p, double delta) {
    if (delta < p.r_min() || delta > p.r_max())
        throw std::invalid_argument("local mass: delta outside the profile range");
    return cumulative_mass(p, delta);
}

KelvinResult kelvin_transform(const RadialProfile& p, double beta) {
    KelvinResult kr;
    const double N = p.params.N, L = p.params.L, a = p.params.a;
    kr.N_prime = 0.5 * (beta - 2.0 * (N + 2.0));
    kr.L_prime = 0.5 * (a * beta - 2.0 * (L + 2.0));
    kr.integrable_at_origin = (kr.N_prime > -1.0) && (kr.L_prime > -1.0);

    RadialProfile& q = kr.transformed;
    q.params = {kr.N_prime, kr.L_prime, a};
    q.tol = p.tol;
    const std::size_t n = p.r.size();
    q.r.resize(n);
    q.u.resize(n);
    q.du.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        const double rho = 1.0 / p.r[j];
        q.r[i] = rho;
        // extended precision: r du + beta cancels heavily in the far tail
        const long double rj = p.r[j];
        const long double s = rj * static_cast<long double>(p.du[j]) +
                              static_cast<long double>(beta);
        q.u[i] = static_cast<double>(static_cast<long double>(p.u[j]) +
                                     static_cast<long double>(beta) * std::log(rj));
        q.du[i] = static_cast<double>(-rj * s);
    }
    q.u0 = p.u.back() + beta * std::log(p.r.back());
    if (kr.integrable_at_origin && n >= 7) kr.residual = equation_residual(q);
    return kr;
}

std::string to_string(AuxBranch b) {
    switch (b) {
        case AuxBranch::l_nonnegative: return "N>=L, L>=0";
        case AuxBranch::l_negative: return "N>=L, -1<L<0";
        default: return "N<L via v=au swap";
    }
}

namespace {

struct AuxSetup {
    RadialParams eff;       // parameters after the optional swap
    double weight_constant; // multiplies |x|^{2L} in the target inequality
    bool swapped;
    AuxBranch branch;
    double C_a;
};

AuxSetup aux_setup(double N, double L, double a) {
    AuxSetup s;
    if (!(a > 0.0)) throw std::invalid_argument("auxiliary: need a > 0");
    if (!(N > -1.0 && L > -1.0)) throw std::invalid_argument("auxiliary: need N, L > -1");
    if (N < L) {
        s.eff = {L, N, 1.0 / a};
        s.weight_constant = a;
        s.swapped = true;
        s.branch = AuxBranch::swapped;
    } else {
        s.eff = {N, L, a};
        s.weight_constant = 1.0;
        s.swapped = false;
        s.branch = (L >= 0.0) ? AuxBranch::l_nonnegative : AuxBranch::l_negative;
    }
    s.C_a = std::max(1.0, s.eff.a);
    return s;
}

// log V_a, eta_a and its radial derivative from (v, v') at radius r
void aux_point(const AuxSetup& s, double r, double v, double dv, double& V_out,
               double& xi_out, double& eta_out, double& deta_out) {
    const double Neff = s.eff.N, Leff = s.eff.L, aeff = s.eff.a;
    const double logV = 2.0 * (Neff - Leff) * std::log(r) + (1.0 - aeff) * v;
    const double log1pV = log1p_exp(logV);
    const double xi = v + log1pV / aeff;
    const double q = logistic(logV);  // V/(1+V)
    const double dlogV = 2.0 * (Neff - Leff) / r + (1.0 - aeff) * dv;
    const double dxi = dv + q * dlogV / aeff;
    V_out = std::exp(std::min(logV, 700.0));
    xi_out = xi;
    eta_out = aeff * xi + (aeff > 1.0 ? std::log(aeff) : 0.0);
    deta_out = aeff * dxi;
}

}  // namespace

double RadialAuxiliary::eval_eta(double radius) const {
    const double x = std::clamp(radius, r.front(), r.back());
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t k = static_cast<std::size_t>(it - r.begin());
    if (k == 0) k = 1;
    if (k >= r.size()) k = r.size() - 1;
    const double h = r[k] - r[k - 1];
    const double t = (x - r[k - 1]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * eta_a[k - 1] + h * h10 * deta_a[k - 1] + h01 * eta_a[k] +
           h * h11 * deta_a[k];
}

RadialAuxiliary auxiliary_subsolution(const RadialProfile& p) {
    const AuxSetup s = aux_setup(p.params.N, p.params.L, p.params.a);
    RadialAuxiliary out;
    out.report.branch = s.branch;
    out.report.swapped = s.swapped;
    out.report.C_a = s.C_a;
    out.report.weight_constant = s.weight_constant;
    out.report.effective = s.eff;
    out.report.screen_residual = equation_residual(p);
    const double screen_tol = std::max(1e-6, 100.0 * p.tol);
    if (out.report.screen_residual > screen_tol)
        throw std::runtime_error("auxiliary: input fails the equation-residual screen");

    const std::size_t n = p.r.size();
    out.r = p.r;
    out.V_a.resize(n);
    out.xi_a.resize(n);
    out.eta_a.resize(n);
    out.deta_a.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = s.swapped ? p.params.a * p.u[i] : p.u[i];
        const double dv = s.swapped ? p.params.a * p.du[i] : p.du[i];
        aux_point(s, p.r[i], v, dv, out.V_a[i], out.xi_a[i], out.eta_a[i], out.deta_a[i]);
    }

    const double tol_rel = 1e-6;
    out.report.exclusion_radius = out.r[2];
    out.report.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double epp = second_derivative5(out.r, out.deta_a, i);
        const double neg_lap = -(epp + out.deta_a[i] / out.r[i]);
        const double rhs = s.weight_constant * std::pow(out.r[i], 2.0 * s.eff.L) *
                           std::exp(out.eta_a[i]);
        const double margin = rhs - neg_lap;
        ++out.report.checked;
        if (margin < -tol_rel * (1.0 + rhs)) ++out.report.violations;
        out.report.worst_margin = std::min(out.report.worst_margin, margin);
    }
    return out;
}

FieldAuxiliary auxiliary_subsolution(const ScalarField& u, double N, double L, double a) {
    const AuxSetup s = aux_setup(N, L, a);
    const double screen_tol = 1e-2;  // grid residual is O(h^2) at best
    const double res = equation_residual(u, N, L, a);
    FieldAuxiliary out;
    out.report.branch = s.branch;
    out.report.swapped = s.swapped;
    out.report.C_a = s.C_a;
    out.report.weight_constant = s.weight_constant;
    out.report.effective = s.eff;
    out.report.screen_residual = res;
    if (res > screen_tol)
        throw std::runtime_error("auxiliary: input fails the equation-residual screen");

    const GridSpec& g = u.grid;
    out.V_a = ScalarField(g);
    out.xi_a = ScalarField(g);
    out.eta_a = ScalarField(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t id = g.idx(i, j);
            if (!u.mask[id]) continue;
            const double r = std::hypot(g.x(i), g.y(j));
            const double v = s.swapped ? a * u.values[id] : u.values[id];
            double V, xi, eta, deta;
            aux_point(s, r, v, 0.0, V, xi, eta, deta);
            out.V_a.values[id] = V;
            out.xi_a.values[id] = xi;
            out.eta_a.values[id] = eta;
            out.V_a.mask[id] = out.xi_a.mask[id] = out.eta_a.mask[id] = 1;
        }

    const ScalarField lap = laplacian(out.eta_a);
    const double excl = 3.0 * g.h;
    out.report.exclusion_radius = excl;
    const double tol_abs = default_tolerance(g.h);
    out.report.worst_margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t id = g.idx(i, j);
            if (!lap.mask[id]) continue;
            const double x = g.x(i), y = g.y(j);
            if (x * x + y * y <= excl * excl) continue;
            const double r2L = std::pow(x * x + y * y, s.eff.L);
            const double rhs = s.weight_constant * r2L * std::exp(out.eta_a.values[id]);
            const double margin = rhs + lap.values[id];  // rhs - (-Delta eta)
            ++out.report.checked;
            if (margin < -tol_abs * (1.0 + rhs)) ++out.report.violations;
            out.report.worst_margin = std::min(out.report.worst_margin, margin);
        }
    if (out.report.checked == 0) throw std::runtime_error("auxiliary: empty stencil set");
    return out;
}

double blowup_floor_finite(double a) { return 4.0 / std::max(1.0, a); }

double blowup_floor_origin(double a, double N) {
    return 4.0 * (1.0 + std::min(0.0, N)) / std::max(1.0, a);
}

double blowup_floor_infinity(double a, double N, double beta) {
    const double t1 = std::min(0.0, a * beta - 4.0);
    const double t2 = std::min(0.0, beta - 2.0 * (N + 2.0));
    return (2.0 + std::min(t1, t2)) / std::max(1.0, a);
}

MassReport mass_threshold_report(const RadialProfile& p, double delta, int grid_n,
                                 std::optional<double> beta_hint) {
    MassReport rep;
    rep.N = p.params.N;
    rep.L = p.params.L;
    rep.a = p.params.a;
    rep.delta = delta;
    rep.solver_tol = p.tol;
    rep.r_trunc = p.r_max();
    rep.grid_n = grid_n;

    if (beta_hint) {
        rep.beta = *beta_hint;
        rep.beta_error = 0.0;
        rep.beta_known = true;
    } else {
        try {
            const TotalMass tm = total_mass(p, p.r_max());
            rep.beta = tm.beta;
            rep.beta_error = tm.iteration_delta + tm.tail_variation * tm.tail;
            rep.beta_known = true;
        } catch (const std::exception&) {
            rep.beta_known = false;  // decay not detected; floors at infinity unavailable
        }
    }

    rep.local_mass = local_mass(p, delta);
    const double maxa = std::max(1.0, rep.a);
    rep.M_aNL = maxa * 2.0 * kPi * rep.local_mass;
    const double minNL = std::min(std::min(0.0, rep.N), std::min(0.0, rep.L));
    rep.threshold = 8.0 * kPi * (1.0 + minNL);
    rep.bound_defined = rep.M_aNL < rep.threshold;
    if (rep.bound_defined)
        rep.pointwise_bound = std::pow(1.0 - rep.M_aNL / rep.threshold, -2.0);

    rep.floor_finite = blowup_floor_finite(rep.a);
    rep.floor_origin = blowup_floor_origin(rep.a, rep.N);
    if (rep.beta_known) {
        rep.floor_infinity = blowup_floor_infinity(rep.a, rep.N, rep.beta);
        rep.floor_infinity_known = true;
    }

    if (rep.bound_defined) {
        // pointwise mechanism: eta_a is a strong subsolution for the weight
        // |x|^{2 min(N,L)} = e^{g + h_alpha} with alpha = -min{N_-, L_-}
        const RadialAuxiliary aux = auxiliary_subsolution(p);
        const double alpha_eff = -minNL;
        const double g_coeff = 2.0 * std::min(rep.N, rep.L) + 2.0 * alpha_eff;
        ConformalWeight w = ConformalWeight::unit(alpha_eff, 0.5);
        if (g_coeff != 0.0)
            w.g = FieldFunction([g_coeff](double x, double y) {
                return g_coeff * std::log(std::hypot(x, y));
            });
        const PlanarDomain ball = PlanarDomain::disk(delta);
        FieldFunction eta_fn = FieldFunction::radial(
            [&aux](double r) { return aux.eval_eta(r); });
        CheckOptions opt;
        opt.n = grid_n;
        rep.eta_report = check_pointwise(ball, eta_fn, w, opt);
        rep.pointwise_checked = true;

        double mi = p.u0;
        for (std::size_t i = 0; i < p.r.size() && p.r[i] <= delta; ++i)
            mi = std::max(mi, p.u[i]);
        rep.max_interior_u = std::exp(mi);
        rep.max_boundary_u = std::exp(p.eval_u(delta));
        rep.u_bound_holds = rep.max_interior_u <= rep.pointwise_bound *
                                                      rep.max_boundary_u *
                                                      (1.0 + rep.eta_report.tol);
    }
    return rep;
}

}  // namespace coniso
