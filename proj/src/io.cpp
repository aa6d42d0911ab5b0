#include "coniso/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coniso {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io: cannot write " + path);
    out.precision(17);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot read " + path);
    return in;
}

}  // namespace

void dump_field_csv(const ScalarField& f, const std::string& path) {
    auto out = open_out(path);
    out << "# " << f.grid.nx << ' ' << f.grid.ny << ' ' << f.grid.h << ' ' << f.grid.ox
        << ' ' << f.grid.oy << '\n';
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) {
            const std::size_t id = f.grid.idx(i, j);
            out << i << ',' << j << ',' << f.values[id] << ','
                << static_cast<int>(f.mask[id]) << '\n';
        }
}

ScalarField load_field_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#')
        throw std::runtime_error("io: field file missing header: " + path);
    GridSpec g;
    if (std::sscanf(line.c_str(), "# %d %d %lf %lf %lf", &g.nx, &g.ny, &g.h, &g.ox,
                    &g.oy) != 5)
        throw std::runtime_error("io: malformed field header: " + path);
    ScalarField f(g);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int i, j, m;
        double v;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%d", &i, &j, &v, &m) != 4)
            throw std::runtime_error("io: malformed field row: " + line);
        f.values[g.idx(i, j)] = v;
        f.mask[g.idx(i, j)] = static_cast<std::uint8_t>(m);
    }
    return f;
}

void dump_profile_csv(const RadialProfile& p, const std::string& path) {
    auto out = open_out(path);
    out << "# " << p.params.N << ' ' << p.params.L << ' ' << p.params.a << ' ' << p.u0
        << ' ' << p.tol << '\n';
    out << "r,u,du\n";
    for (std::size_t i = 0; i < p.r.size(); ++i)
        out << p.r[i] << ',' << p.u[i] << ',' << p.du[i] << '\n';
}

RadialProfile load_profile_csv(const std::string& path) {
    auto in = open_in(path);
    RadialProfile p;
    std::string line;
    bool have_params = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (std::sscanf(line.c_str(), "# %lf %lf %lf %lf %lf", &p.params.N,
                            &p.params.L, &p.params.a, &p.u0, &p.tol) >= 4)
                have_params = true;
            continue;
        }
        if (line.rfind("r,", 0) == 0) continue;  // column header
        double r, u, du;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &u, &du) != 3)
            throw std::runtime_error("io: malformed profile row: " + line);
        p.r.push_back(r);
        p.u.push_back(u);
        p.du.push_back(du);
    }
    if (p.r.size() < 2) throw std::runtime_error("io: profile too short: " + path);
    if (!have_params) p.u0 = p.u.front();
    if (p.tol <= 0.0) p.tol = 1e-10;
    for (std::size_t i = 1; i < p.r.size(); ++i)
        if (!(p.r[i] > p.r[i - 1]))
            throw std::runtime_error("io: profile radii not increasing: " + path);
    return p;
}

void dump_levelset_csv(const LevelSetData& ls, const std::string& path) {
    auto out = open_out(path);
    out << "# alpha " << ls.alpha << " K0 " << ls.K0 << " mu0 " << ls.mu0 << " t_m "
        << ls.t_m << '\n';
    out << "s,eta_star,F,P_alpha,J_alpha\n";
    for (std::size_t k = 0; k < ls.s.size(); ++k)
        out << ls.s[k] << ',' << ls.eta_star[k] << ',' << ls.F[k] << ',' << ls.P[k] << ','
            << ls.J[k] << '\n';
}

json report_to_json(const InequalityReport& r) {
    json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["rel_slack"] = r.rel_slack;
    j["tol"] = r.tol;
    j["verdict"] = to_string(r.verdict);
    j["strict_expected"] = r.strict_expected;
    j["case"] = {{"origin_rule", r.origin_rule}, {"alpha", r.alpha}, {"K0", r.K0}};
    return j;
}

json report_to_json(const PointwiseReport& r) {
    json j;
    j["max_interior"] = r.max_interior;
    j["max_boundary"] = r.max_boundary;
    j["mass"] = r.mass;
    j["threshold"] = r.threshold;
    j["bound_factor"] = r.bound_factor;
    j["margin"] = r.margin;
    j["tol"] = r.tol;
    j["verdict"] = to_string(r.verdict);
    j["case"] = {{"origin_rule", r.origin_rule}, {"alpha", r.alpha}};
    return j;
}

json report_to_json(const MonotonicityReport& r, const LevelSetData& ls) {
    json j;
    j["min_P"] = r.min_P;
    j["max_P_decrease"] = r.max_P_decrease;
    j["max_J_increase"] = r.max_J_increase;
    j["terminal_margin"] = r.terminal_margin;
    j["tol_P"] = r.tol_P;
    j["tol_J"] = r.tol_J;
    j["P_nonnegative"] = r.P_nonnegative;
    j["P_nondecreasing"] = r.P_nondecreasing;
    j["J_nonincreasing"] = r.J_nonincreasing;
    j["terminal_ok"] = r.terminal_ok;
    j["ok"] = r.ok();
    j["case"] = {{"alpha", ls.alpha},   {"K0", ls.K0},   {"mu0", ls.mu0},
                 {"t_m", ls.t_m},       {"t_origin", ls.t_origin},
                 {"s_origin", ls.s_origin}, {"tilde_gamma_plus", ls.tilde_gamma}};
    return j;
}

json report_to_json(const AuxReport& r) {
    json j;
    j["branch"] = to_string(r.branch);
    j["swapped"] = r.swapped;
    j["C_a"] = r.C_a;
    j["weight_constant"] = r.weight_constant;
    j["effective"] = {{"N", r.effective.N}, {"L", r.effective.L}, {"a", r.effective.a}};
    j["checked"] = r.checked;
    j["violations"] = r.violations;
    j["worst_margin"] = r.worst_margin;
    j["exclusion_radius"] = r.exclusion_radius;
    j["screen_residual"] = r.screen_residual;
    return j;
}

json report_to_json(const TotalMass& tm) {
    json j;
    j["beta"] = tm.beta;
    j["quadrature"] = tm.quadrature;
    j["tail"] = tm.tail;
    j["iteration_delta"] = tm.iteration_delta;
    j["tail_exponent"] = tm.tail_exponent;
    j["tail_variation"] = tm.tail_variation;
    return j;
}

json report_to_json(const KelvinResult& kr) {
    json j;
    j["N_prime"] = kr.N_prime;
    j["L_prime"] = kr.L_prime;
    j["integrable_at_origin"] = kr.integrable_at_origin;
    j["residual"] = kr.residual;
    return j;
}

json report_to_json(const MassReport& r) {
    json j;
    j["params"] = {{"N", r.N}, {"L", r.L}, {"a", r.a}, {"delta", r.delta}};
    j["beta_known"] = r.beta_known;
    if (r.beta_known) {
        j["beta"] = r.beta;
        j["beta_error"] = r.beta_error;
    }
    j["local_mass"] = r.local_mass;
    j["M_aNL"] = r.M_aNL;
    j["threshold"] = r.threshold;
    j["bound_defined"] = r.bound_defined;
    if (r.bound_defined) j["pointwise_bound"] = r.pointwise_bound;
    j["floors"] = json{{"finite", r.floor_finite}, {"origin", r.floor_origin}};
    if (r.floor_infinity_known) j["floors"]["infinity"] = r.floor_infinity;
    if (r.pointwise_checked) {
        j["eta_pointwise"] = report_to_json(r.eta_report);
        j["max_interior_u"] = r.max_interior_u;
        j["max_boundary_u"] = r.max_boundary_u;
        j["u_bound_holds"] = r.u_bound_holds;
    }
    j["provenance"] = {{"solver_tol", r.solver_tol},
                       {"r_trunc", r.r_trunc},
                       {"grid_n", r.grid_n}};
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

}  // namespace coniso
