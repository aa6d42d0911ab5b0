// coniso: weighted isoperimetric checks for singular Liouville-type equations.
//
// Subcommands:
//   check {huber|bol|alexandrov|pointwise}   inequality reports
//   rearrange                                 level-set engine + monotonicity
//   cosmic {solve|mass|kelvin|aux|floors}     radial solver and mass accounting
//   sweep <config.toml>                       fan out independent runs

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "coniso/cosmic.hpp"
#include "coniso/inequalities.hpp"
#include "coniso/io.hpp"
#include "coniso/rearrangement.hpp"

namespace fs = std::filesystem;
using namespace coniso;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitViolated = 2;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

PlanarDomain parse_domain(const std::string& spec) {
    const auto main_parts = split(spec, '@');
    double cx = 0.0, cy = 0.0;
    if (main_parts.size() == 2 && main_parts[1] != "origin") {
        const auto c = split(main_parts[1], ',');
        if (c.size() != 2) throw std::invalid_argument("domain: bad center: " + spec);
        cx = std::stod(c[0]);
        cy = std::stod(c[1]);
    } else if (main_parts.size() > 2) {
        throw std::invalid_argument("domain: bad spec: " + spec);
    }
    const auto parts = split(main_parts[0], ':');
    if (parts[0] == "disk" && parts.size() == 2)
        return PlanarDomain::disk(std::stod(parts[1]), cx, cy);
    if (parts[0] == "annulus" && parts.size() == 3)
        return PlanarDomain::annulus(std::stod(parts[1]), std::stod(parts[2]), cx, cy);
    if (parts[0] == "square" && parts.size() == 2) {
        const double s = 0.5 * std::stod(parts[1]);
        return PlanarDomain::rectangle(cx - s, cy - s, cx + s, cy + s);
    }
    if (parts[0] == "rect" && parts.size() == 2) {
        const auto c = split(parts[1], ',');
        if (c.size() == 4)
            return PlanarDomain::rectangle(std::stod(c[0]), std::stod(c[1]),
                                           std::stod(c[2]), std::stod(c[3]));
    }
    throw std::invalid_argument("domain: unknown spec: " + spec +
                                " (want disk:R[@cx,cy], annulus:r:R, square:L, "
                                "rect:x0,y0,x1,y1)");
}

FieldFunction parse_field(const std::string& spec, double alpha, unsigned seed) {
    const auto parts = split(spec, ':');
    if (parts[0] == "zero") return FieldFunction::zero();
    if (parts[0] == "const" && parts.size() == 2)
        return FieldFunction::constant(std::stod(parts[1]));
    if (parts[0] == "bubble" && parts.size() >= 2) {
        const auto lam_center = split(parts[1], '@');
        double cx = 0.0, cy = 0.0;
        if (lam_center.size() == 2 && lam_center[1] != "origin") {
            const auto c = split(lam_center[1], ',');
            if (c.size() != 2) throw std::invalid_argument("field: bad center: " + spec);
            cx = std::stod(c[0]);
            cy = std::stod(c[1]);
        }
        return flat_bubble(std::stod(lam_center[0]), cx, cy);
    }
    if (parts[0] == "singular_bubble" && parts.size() == 3)
        return singular_bubble(std::stod(parts[1]), std::stod(parts[2]));
    if (parts[0] == "singular_bubble" && parts.size() == 2)
        return singular_bubble(alpha, std::stod(parts[1]));
    if (parts[0] == "file" && parts.size() == 2)
        return FieldFunction::from_field(load_field_csv(parts[1]));
    if (parts[0] == "random") {
        // a translated bubble raised by a nonnegative constant is still a
        // strong subsolution on domains inside the unit disk
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> lam(0.5, 2.0), off(-0.25, 0.25),
            lift(0.0, 1.0);
        const double l = lam(rng), cx = off(rng), cy = off(rng), c = lift(rng);
        const FieldFunction b = flat_bubble(l, cx, cy);
        return FieldFunction([b, c](double x, double y) { return b(x, y) - 0.0 + c; });
    }
    throw std::invalid_argument("field: unknown spec: " + spec +
                                " (want zero, const:c, bubble:lambda[@cx,cy], "
                                "singular_bubble:alpha:lambda, file:path, random)");
}

FieldFunction parse_g(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts[0] == "zero") return FieldFunction::zero();
    if (parts[0] == "logcoeff" && parts.size() == 2) {
        const double c = std::stod(parts[1]);
        return FieldFunction(
            [c](double x, double y) { return c * std::log(std::hypot(x, y)); });
    }
    throw std::invalid_argument("g: unknown spec: " + spec + " (want zero, logcoeff:c)");
}

struct CommonOpts {
    std::string domain = "disk:1";
    std::string field = "zero";
    std::string g = "zero";
    double alpha = 0.0;
    double K0 = 0.5;
    double vhat = 1.0;
    int n = 512;
    double tol = 0.0;
    std::string out;
    unsigned seed = 0;
    bool boundary_case = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--domain", o.domain, "domain spec (disk:R[@cx,cy], annulus:r:R, ...)");
    cmd->add_option("--field", o.field, "field spec (zero, bubble:lambda, ...)");
    cmd->add_option("--g", o.g, "subharmonic correction (zero, logcoeff:c)");
    cmd->add_option("--alpha", o.alpha, "cone order in [0,1)");
    cmd->add_option("--K0", o.K0, "comparison curvature");
    cmd->add_option("--vhat", o.vhat, "constant V-hat factor");
    cmd->add_option("--n", o.n, "grid resolution");
    cmd->add_option("--tol", o.tol, "verdict tolerance override");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "seed for sampled fields");
    cmd->add_flag("--boundary-case", o.boundary_case,
                  "treat the domain as the full ambient domain");
}

ConformalWeight weight_from(const CommonOpts& o) {
    ConformalWeight w = ConformalWeight::with_vhat(o.alpha, o.vhat, o.K0);
    w.g = parse_g(o.g);
    return w;
}

void emit(const json& report, const CommonOpts& o, const std::string& name) {
    std::cout << report.dump(2) << '\n';
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        std::ofstream f(fs::path(o.out) / (name + ".json"));
        f << report.dump(2) << '\n';
    }
}

int verdict_exit(Verdict v) {
    return v == Verdict::fail ? kExitViolated : kExitPass;
}

json config_echo(const CommonOpts& o, const std::string& command) {
    json j;
    j["command"] = command;
    j["domain"] = o.domain;
    j["field"] = o.field;
    j["g"] = o.g;
    j["alpha"] = o.alpha;
    j["K0"] = o.K0;
    j["vhat"] = o.vhat;
    j["n"] = o.n;
    j["seed"] = o.seed;
    j["boundary_case"] = o.boundary_case;
    return j;
}

int run_check(const std::string& kind, const CommonOpts& o) {
    const PlanarDomain dom = parse_domain(o.domain);
    const ConformalWeight w = weight_from(o);
    const FieldFunction v = parse_field(o.field, o.alpha, o.seed);
    json out;
    out["config"] = config_echo(o, "check " + kind);
    int code = kExitPass;
    if (kind == "huber") {
        const InequalityReport r = huber_check(dom, w, o.n);
        out["report"] = report_to_json(r);
        code = verdict_exit(r.verdict);
    } else {
        CheckOptions copt;
        copt.n = o.n;
        copt.boundary_case = o.boundary_case;
        copt.tol_override = o.tol;
        if (kind == "bol") {
            const InequalityReport r = check_bol(dom, v, w, copt);
            out["report"] = report_to_json(r);
            code = verdict_exit(r.verdict);
        } else if (kind == "alexandrov") {
            const InequalityReport r = check_alexandrov(dom, v, w, copt);
            out["report"] = report_to_json(r);
            code = verdict_exit(r.verdict);
        } else {  // pointwise
            const PointwiseReport r = check_pointwise(dom, v, w, copt);
            out["report"] = report_to_json(r);
            code = verdict_exit(r.verdict);
        }
    }
    emit(out, o, "check_" + kind);
    return code;
}

int run_rearrange(const CommonOpts& o, int n_levels) {
    const PlanarDomain dom = parse_domain(o.domain);
    const ConformalWeight w = weight_from(o);
    const FieldFunction vfn = parse_field(o.field, o.alpha, o.seed);
    const BBox b = dom.bbox();
    const GridSpec g = GridSpec::cover(b.xmin, b.xmax, b.ymin, b.ymax, o.n);
    const ScalarField v = ScalarField::sample(g, [&](double x, double y) {
        return vfn(x, y);
    });
    const SubsolutionDecomposition dec = decompose_subsolution(dom, v, w);
    const LevelSetData ls = build_level_data(dec, w, n_levels);
    const MonotonicityReport mono = verify_monotonicity(ls);
    json out;
    out["config"] = config_echo(o, "rearrange");
    out["config"]["levels"] = n_levels;
    out["report"] = report_to_json(mono, ls);
    out["report"]["two_route"] = {
        {"F_end", ls.F.back()},
        {"2K0_M_alpha", 2.0 * w.K0 * weighted_area(dom, vfn, w, o.n)}};
    out["report"]["lipschitz_[0.2,0.8]mu0"] =
        lipschitz_estimate(ls, 0.2 * ls.mu0, 0.8 * ls.mu0);
    emit(out, o, "rearrange");
    if (!o.out.empty()) dump_levelset_csv(ls, (fs::path(o.out) / "levelset.csv").string());
    return mono.ok() ? kExitPass : kExitViolated;
}

struct CosmicOpts {
    double N = 0.0, L = 0.0, a = 1.0;
    double u0 = 1.386;
    double rmax = 1e4;
    double tol = 1e-10;
    double delta = 1.0;
    double beta = std::nan("");
    std::string in;
    std::string x0 = "";
    std::string out;
    int n = 256;
};

RadialProfile cosmic_profile(const CosmicOpts& c) {
    if (!c.in.empty()) return load_profile_csv(c.in);
    return solve_radial_ode(c.N, c.L, c.a, c.u0, c.rmax, c.tol);
}

json cosmic_config(const CosmicOpts& c, const std::string& command) {
    json j;
    j["command"] = command;
    j["N"] = c.N;
    j["L"] = c.L;
    j["a"] = c.a;
    j["u0"] = c.u0;
    j["rmax"] = c.rmax;
    j["tol"] = c.tol;
    if (!c.in.empty()) j["in"] = c.in;
    return j;
}

void cosmic_emit(const json& report, const std::string& out_dir, const std::string& name) {
    std::cout << report.dump(2) << '\n';
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream f(fs::path(out_dir) / (name + ".json"));
        f << report.dump(2) << '\n';
    }
}

int run_cosmic(const std::string& kind, const CosmicOpts& c) {
    json out;
    out["config"] = cosmic_config(c, "cosmic " + kind);
    if (kind == "solve") {
        const RadialProfile p = cosmic_profile(c);
        out["report"]["nodes"] = p.r.size();
        out["report"]["residual"] = equation_residual(p);
        try {
            out["report"]["total_mass"] = report_to_json(total_mass(p, p.r_max()));
        } catch (const std::exception& e) {
            out["report"]["total_mass_error"] = e.what();
        }
        cosmic_emit(out, c.out, "solve");
        if (!c.out.empty())
            dump_profile_csv(p, (fs::path(c.out) / "profile.csv").string());
        return kExitPass;
    }
    if (kind == "mass") {
        const RadialProfile p = cosmic_profile(c);
        std::optional<double> hint;
        if (!std::isnan(c.beta)) hint = c.beta;
        const MassReport rep = mass_threshold_report(p, c.delta, c.n, hint);
        out["report"] = report_to_json(rep);
        cosmic_emit(out, c.out, "mass");
        if (rep.pointwise_checked && !rep.u_bound_holds) return kExitViolated;
        return kExitPass;
    }
    if (kind == "kelvin") {
        const RadialProfile p = cosmic_profile(c);
        if (std::isnan(c.beta))
            throw std::invalid_argument("kelvin: --beta is required");
        const KelvinResult kr = kelvin_transform(p, c.beta);
        out["report"] = report_to_json(kr);
        cosmic_emit(out, c.out, "kelvin");
        if (!c.out.empty())
            dump_profile_csv(kr.transformed,
                             (fs::path(c.out) / "kelvin_profile.csv").string());
        return kExitPass;
    }
    if (kind == "aux") {
        const RadialProfile p = cosmic_profile(c);
        const RadialAuxiliary aux = auxiliary_subsolution(p);
        out["report"] = report_to_json(aux.report);
        const double frac = aux.report.checked
                                ? static_cast<double>(aux.report.violations) /
                                      static_cast<double>(aux.report.checked)
                                : 0.0;
        out["report"]["violation_fraction"] = frac;
        cosmic_emit(out, c.out, "aux");
        return frac <= 1e-3 ? kExitPass : kExitViolated;
    }
    // floors
    out["report"]["finite"] = blowup_floor_finite(c.a);
    out["report"]["origin"] = blowup_floor_origin(c.a, c.N);
    if (!std::isnan(c.beta))
        out["report"]["infinity"] = blowup_floor_infinity(c.a, c.N, c.beta);
    if (!c.x0.empty()) {
        double sel;
        if (c.x0 == "finite")
            sel = blowup_floor_finite(c.a);
        else if (c.x0 == "origin")
            sel = blowup_floor_origin(c.a, c.N);
        else if (c.x0 == "infinity" && !std::isnan(c.beta))
            sel = blowup_floor_infinity(c.a, c.N, c.beta);
        else
            throw std::invalid_argument("floors: bad --x0 (finite|origin|infinity, "
                                        "infinity needs --beta)");
        out["report"]["selected"] = sel;
        out["report"]["x0"] = c.x0;
    }
    cosmic_emit(out, c.out, "floors");
    return kExitPass;
}

int run_argv(const std::vector<std::string>& args, const std::string& out_override);

int run_sweep(const std::string& config_path, unsigned workers_flag) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("sweep: cannot read " + config_path);
    std::string out_dir = "sweep_out";
    unsigned workers = workers_flag ? workers_flag : 4;
    struct Run {
        std::string name;
        std::string args;
    };
    std::vector<Run> runs;
    std::string line;
    bool in_run = false;
    auto unquote = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        if (a == std::string::npos) return std::string();
        s = s.substr(a, b - a + 1);
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
            s = s.substr(1, s.size() - 2);
        return s;
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string trimmed = unquote(line);
        if (trimmed.empty()) continue;
        if (trimmed == "[[run]]") {
            runs.push_back({});
            in_run = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = unquote(line.substr(0, eq));
        const std::string val = unquote(line.substr(eq + 1));
        if (!in_run) {
            if (key == "out") out_dir = val;
            if (key == "workers" && workers_flag == 0)
                workers = static_cast<unsigned>(std::stoul(val));
        } else {
            if (key == "name") runs.back().name = val;
            if (key == "args") runs.back().args = val;
        }
    }
    if (runs.empty()) throw std::invalid_argument("sweep: no [[run]] entries in config");
    for (std::size_t k = 0; k < runs.size(); ++k)
        if (runs[k].name.empty()) runs[k].name = "run_" + std::to_string(k);

    std::vector<int> codes(runs.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= runs.size()) return;
            std::vector<std::string> argv;
            std::istringstream ss(runs[k].args);
            std::string tok;
            while (ss >> tok) argv.push_back(tok);
            const std::string run_out = (fs::path(out_dir) / runs[k].name).string();
            try {
                codes[k] = run_argv(argv, run_out);
            } catch (const std::exception& e) {
                fs::create_directories(run_out);
                std::ofstream f(fs::path(run_out) / "error.txt");
                f << e.what() << '\n';
                codes[k] = kExitError;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned nw = std::min<unsigned>(workers, std::max<std::size_t>(runs.size(), 1));
    pool.reserve(nw);
    for (unsigned t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int code = kExitPass;
    json summary;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        summary[runs[k].name] = codes[k];
        code = std::max(code, codes[k]);
    }
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / "summary.json");
    f << summary.dump(2) << '\n';
    std::cout << summary.dump(2) << '\n';
    return code;
}

int run_argv(const std::vector<std::string>& args, const std::string& out_override) {
    CLI::App app{"weighted isoperimetric checks for singular Liouville-type equations"};
    app.set_config("--config")->configurable(false);
    app.require_subcommand(1);

    CommonOpts common;
    auto* check = app.add_subcommand("check", "inequality reports");
    check->require_subcommand(1);
    std::vector<CLI::App*> check_subs;
    for (const char* kind : {"huber", "bol", "alexandrov", "pointwise"}) {
        auto* sub = check->add_subcommand(kind);
        add_common(sub, common);
        check_subs.push_back(sub);
    }

    CommonOpts re_opts;
    int n_levels = 256;
    auto* rearrange = app.add_subcommand("rearrange", "level-set rearrangement engine");
    re_opts.n = 256;
    add_common(rearrange, re_opts);
    rearrange->add_option("--levels", n_levels, "level samples");

    CosmicOpts cosmic;
    auto* cosmic_app = app.add_subcommand("cosmic", "radial solver and mass accounting");
    cosmic_app->require_subcommand(1);
    std::vector<CLI::App*> cosmic_subs;
    for (const char* kind : {"solve", "mass", "kelvin", "aux", "floors"}) {
        auto* sub = cosmic_app->add_subcommand(kind);
        sub->add_option("--N", cosmic.N, "first exponent");
        sub->add_option("--L", cosmic.L, "second exponent");
        sub->add_option("--a", cosmic.a, "coupling");
        sub->add_option("--u0", cosmic.u0, "center value");
        sub->add_option("--rmax", cosmic.rmax, "integration radius");
        sub->add_option("--tol", cosmic.tol, "solver tolerance");
        sub->add_option("--delta", cosmic.delta, "ball radius for local mass");
        sub->add_option("--beta", cosmic.beta, "total mass (when known)");
        sub->add_option("--in", cosmic.in, "input profile CSV");
        sub->add_option("--x0", cosmic.x0, "blow-up locus (finite|origin|infinity)");
        sub->add_option("--out", cosmic.out, "output directory");
        sub->add_option("--n", cosmic.n, "grid resolution for the pointwise run");
        cosmic_subs.push_back(sub);
    }

    std::string sweep_config;
    unsigned sweep_workers = 0;
    auto* sweep = app.add_subcommand("sweep", "run a TOML batch");
    sweep->add_option("config", sweep_config, "TOML config")->required();
    sweep->add_option("--workers", sweep_workers, "worker pool size");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help() << '\n';
            return kExitPass;
        }
        throw std::invalid_argument(e.what());
    }

    if (!out_override.empty()) {
        common.out = out_override;
        re_opts.out = out_override;
        cosmic.out = out_override;
    }

    if (check->parsed()) {
        const char* kinds[] = {"huber", "bol", "alexandrov", "pointwise"};
        for (int k = 0; k < 4; ++k)
            if (check_subs[k]->parsed()) return run_check(kinds[k], common);
    }
    if (rearrange->parsed()) return run_rearrange(re_opts, n_levels);
    if (cosmic_app->parsed()) {
        const char* kinds[] = {"solve", "mass", "kelvin", "aux", "floors"};
        for (int k = 0; k < 5; ++k)
            if (cosmic_subs[k]->parsed()) return run_cosmic(kinds[k], cosmic);
    }
    if (sweep->parsed()) return run_sweep(sweep_config, sweep_workers);
    throw std::invalid_argument("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_argv(args, "");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
