// singreg: regularizing correlation functions for singular pair potentials.
//
// Exit codes: 0 success, 2 usage/config, 3 numeric, 4 I/O.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "singreg/correlation.hpp"
#include "singreg/csv.hpp"
#include "singreg/errors.hpp"
#include "singreg/factor_approximants.hpp"
#include "singreg/materials.hpp"
#include "singreg/ode_oracle.hpp"
#include "singreg/potentials.hpp"
#include "singreg/shortrange_series.hpp"

namespace {

using namespace singreg;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string potential = "lj";
    std::optional<double> n;
    std::string table;
    std::optional<std::string> material;
    std::optional<double> lambda;
    std::string registry;
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t steps = 500;
    bool log_grid = false;
    double tol = 0.0;
    std::string out;
    unsigned threads = 1;
    std::uint64_t seed = 0;
};

struct Resolved {
    PotentialSpec potential;
    std::optional<double> lambda;
};

MaterialRegistry load_registry(const RunConfig& cfg)
{
    MaterialRegistry registry = MaterialRegistry::with_builtins();
    std::string path = cfg.registry;
    if (path.empty())
        if (const char* env = std::getenv("SINGREG_REGISTRY"))
            path = env;
    if (!path.empty())
        registry.load_file(path);
    return registry;
}

PotentialSpec load_table(const std::string& path, double n)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open potential table " + path);
    std::vector<double> xs, vs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0)
            continue;
        std::istringstream fields(line);
        double x = 0.0, v = 0.0;
        char comma = 0;
        if (!(fields >> x >> comma >> v) || comma != ',') {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected 'x,v'";
            throw ParseError(msg.str());
        }
        xs.push_back(x);
        vs.push_back(v);
    }
    return PotentialSpec::tabulated(std::move(xs), std::move(vs), n);
}

PotentialSpec resolve_potential(const RunConfig& cfg)
{
    if (cfg.potential == "lj") {
        if (cfg.n && *cfg.n != 12.0)
            throw ConfigError("--potential lj has n = 12");
        return PotentialSpec::lennard_jones();
    }
    if (cfg.potential == "power") {
        if (!cfg.n)
            throw ConfigError("--potential power needs --n");
        return PotentialSpec::power_law(*cfg.n);
    }
    if (cfg.potential == "table") {
        if (!cfg.n || cfg.table.empty())
            throw ConfigError("--potential table needs --n and --table <csv>");
        return load_table(cfg.table, *cfg.n);
    }
    throw ConfigError("unknown potential '" + cfg.potential + "' (lj, power, table)");
}

Resolved resolve(const RunConfig& cfg, bool need_lambda = true)
{
    if (cfg.material && cfg.lambda)
        throw ConfigError("give either --material or --lambda, not both");
    if (cfg.material) {
        const MaterialRegistry registry = load_registry(cfg);
        const Material& m = registry.lookup(*cfg.material);
        return {m.potential, m.lambda};
    }
    if (need_lambda && !cfg.lambda)
        throw ConfigError("one of --material or --lambda is required");
    Resolved r{resolve_potential(cfg), cfg.lambda};
    for (const std::string& w : r.potential.warnings())
        std::cerr << "warning: " << w << '\n';
    return r;
}

Eigen::ArrayXd grid_of(const RunConfig& cfg, double default_min, double default_max)
{
    const double lo = cfg.x_min > 0.0 ? cfg.x_min : default_min;
    const double hi = cfg.x_max > 0.0 ? cfg.x_max : default_max;
    // The default range is log-spaced; explicit ranges are linear unless --log.
    const bool log_spaced = cfg.log_grid || (cfg.x_min <= 0.0 && cfg.x_max <= 0.0);
    return make_grid(lo, hi, cfg.steps, log_spaced);
}

void emit(const RunConfig& cfg, const std::string& text)
{
    if (cfg.out.empty() || cfg.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file || !(file << text))
        throw IoError("cannot write " + cfg.out);
}

void add_model_options(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--potential", cfg.potential, "Potential kind: lj, power or table")
        ->check(CLI::IsMember({"lj", "power", "table"}));
    cmd->add_option("--n", cfg.n, "Singularity exponent (power, table)");
    cmd->add_option("--table", cfg.table, "CSV file of x,v pairs for --potential table");
    cmd->add_option("--material", cfg.material, "Material id from the registry");
    cmd->add_option("--lambda", cfg.lambda, "Dimensionless coupling Lambda");
    cmd->add_option("--registry", cfg.registry, "Extra material registry file");
}

void add_grid_options(CLI::App* cmd, RunConfig& cfg)
{
    cmd->add_option("--x-min", cfg.x_min, "Grid start");
    cmd->add_option("--x-max", cfg.x_max, "Grid end");
    cmd->add_option("--steps", cfg.steps, "Number of grid points")->check(CLI::Range(2, 100000000));
    cmd->add_flag("--log", cfg.log_grid, "Log-spaced grid");
    cmd->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1, 1024));
    cmd->add_option("--out", cfg.out, "Output file (default stdout)");
}

int cmd_curve(const RunConfig& cfg, bool regularized)
{
    const Resolved r = resolve(cfg);
    const CorrelationModel model = build_model(r.potential, *r.lambda);
    const Eigen::ArrayXd x = regularized ? grid_of(cfg, 0.5, 3.0) : grid_of(cfg, 0.3, 10.0);
    const Eigen::ArrayXd y = parallel_map(
        x, [&](double xi) { return regularized ? phi_reg(model, xi) : g(model, xi); }, cfg.threads);
    std::ostringstream out;
    write_csv(out, {"x", regularized ? "phi_reg" : "g"}, {x, y});
    emit(cfg, out.str());
    return kExitOk;
}

struct VerifyFlags {
    int dimension = 3;
    bool bare_only = false;
    double x_max = 50.0;
    int halvings = 8;
};

void print_sequence(std::ostream& out, const std::string& label, const IntegralSequence& seq)
{
    for (std::size_t j = 0; j < seq.value.size(); ++j) {
        out << label << ',' << format_double(seq.x_min[j]) << ',' << format_double(seq.value[j]) << ',';
        if (j > 0)
            out << format_double(seq.ratio[j - 1]);
        out << '\n';
    }
}

int cmd_verify(const RunConfig& cfg, const VerifyFlags& flags)
{
    IntegrabilityOptions opts;
    opts.dimension = flags.dimension;
    opts.x_max = flags.x_max;
    opts.halvings = flags.halvings;
    if (cfg.tol > 0.0)
        opts.tol = cfg.tol;

    std::ostringstream out;
    const Resolved r = resolve(cfg, !flags.bare_only);
    const PotentialSpec& p = r.potential;
    const double tail = potential_tail(p, opts.dimension, opts.x_max);
    const double predicted = std::pow(2.0, p.n() - opts.dimension);

    bool ok = true;
    std::optional<IntegralSequence> regularized;
    if (!flags.bare_only) {
        const CorrelationModel model = build_model(p, *r.lambda);
        out << "# model: potential=" << p.name() << " n=" << format_double(p.n())
            << " lambda=" << format_double(model.lambda) << " A=" << format_double(model.A)
            << " alpha=" << format_double(model.alpha) << " mu=" << format_double(model.mu)
            << " s0=" << format_double(model.s0) << '\n';
        out << "# A/lambda=" << format_double(model.A / model.lambda);
        if (p.kind() == PotentialKind::LennardJones)
            out << " (A = lambda/2 for Lennard-Jones; the constant A = 1/2 holds only at lambda = 1)";
        out << '\n';
        regularized = integrate_sequence([&](double x) { return phi_reg(model, x); }, tail, opts);
    }
    const IntegralSequence bare = integrate_sequence([&](double x) { return p.evaluate(x); }, tail, opts);

    out << "# dimension=" << opts.dimension << " x_max=" << format_double(opts.x_max)
        << " tail=" << format_double(tail) << " tol=" << format_double(opts.tol) << '\n';
    out << "sequence,x_min,value,ratio\n";
    if (regularized)
        print_sequence(out, "regularized", *regularized);
    print_sequence(out, "bare", bare);

    if (regularized) {
        out << "# regularized converged: " << (regularized->converged ? "yes" : "no") << '\n';
        ok = ok && regularized->converged;
    }
    const double observed = bare.ratio.empty() ? 0.0 : bare.ratio.back();
    const bool rate_ok = !bare.converged && std::abs(observed / predicted - 1.0) < 0.05;
    out << "# bare converged: " << (bare.converged ? "yes" : "no") << '\n';
    out << "# bare divergence rate per halving: observed " << format_double(observed)
        << " predicted " << format_double(predicted) << " (within 5%: " << (rate_ok ? "yes" : "no")
        << ")\n";
    ok = ok && rate_ok;
    emit(cfg, out.str());
    return ok ? kExitOk : kExitNumeric;
}

struct OracleFlags {
    std::string window = "0.2:0.5";
    std::size_t order = 1;
    double x0 = 0.0;
    std::size_t points = 31;
    bool solution = false;
    bool inward = false;
};

std::pair<double, double> parse_window(const std::string& w)
{
    const auto colon = w.find(':');
    if (colon == std::string::npos)
        throw ConfigError("--window expects lo:hi");
    try {
        std::size_t used = 0;
        const double lo = std::stod(w.substr(0, colon), &used);
        const double hi = std::stod(w.substr(colon + 1));
        if (!(lo > 0.0) || !(hi > lo))
            throw ConfigError("--window needs 0 < lo < hi");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw ConfigError("--window expects two numbers lo:hi");
    }
}

int cmd_oracle(const RunConfig& cfg, const OracleFlags& flags)
{
    const Resolved r = resolve(cfg);
    const PotentialSpec& p = r.potential;
    const double lambda = *r.lambda;
    const auto [lo, hi] = parse_window(flags.window);
    const Eigen::ArrayXd x = make_grid(lo, hi, flags.points, false);

    SolveOptions opts;
    if (cfg.tol > 0.0)
        opts.rtol = opts.atol = cfg.tol;
    opts.checkpoints.assign(x.data(), x.data() + x.size());

    std::ostringstream out;
    if (flags.inward) {
        const OracleSolution sol = solve_inward(p, lambda, hi, lo, opts);
        out << "# proxy: inward solution from phi = 1, phi' = 0 at x = " << format_double(hi)
            << "; qualitative comparison only\n";
        Eigen::ArrayXd phi(x.size()), dphi(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            phi[i] = value(sol, x[i]);
            dphi[i] = phi[i] * log_derivative(sol, x[i]);
        }
        write_csv(out, {"x", "phi", "dphi"}, {x, phi, dphi});
        emit(cfg, out.str());
        return kExitOk;
    }

    const ShortRangeExpansion expansion = make_expansion(p, lambda, flags.order);
    const double x0 = flags.x0 > 0.0 ? flags.x0 : 0.9 * lo;
    if (!(x0 <= lo))
        throw ConfigError("--x0 must not exceed the window start");
    const OracleSolution sol = solve_outward(p, lambda, x0, hi, expansion, opts);

    if (flags.solution) {
        // Normalized to phi(hi) = 1 so the growing branch stays finite.
        Eigen::ArrayXd phi(x.size()), dphi(x.size());
        const std::size_t end = sol.size() - 1;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const std::size_t k = sol.find(x[i]);
            const double rel = std::exp(sol.log_scale[k] - sol.log_scale[end]);
            phi[i] = sol.phi[k] * rel / sol.phi[end];
            dphi[i] = sol.dphi[k] * rel / sol.phi[end];
        }
        write_csv(out, {"x", "phi", "dphi"}, {x, phi, dphi});
        emit(cfg, out.str());
        return kExitOk;
    }

    std::optional<CorrelationModel> model;
    try {
        model = build_model(p, lambda);
    } catch (const DegeneracyError& e) {
        std::cerr << "approximant column unavailable: " << e.what() << '\n';
    } catch (const DomainError& e) {
        std::cerr << "approximant column unavailable: " << e.what() << '\n';
    }

    Eigen::ArrayXd ode(x.size()), series(x.size()), approx(x.size()), rel_s(x.size()), rel_a(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        ode[i] = log_derivative(sol, x[i]);
        series[i] = series_log_derivative(expansion, p, x[i]);
        approx[i] = model ? extrapolated_log_derivative(*model, x[i]) : NAN;
        rel_s[i] = std::abs(series[i] - ode[i]) / std::abs(ode[i]);
        rel_a[i] = model ? std::abs(approx[i] - ode[i]) / std::abs(ode[i]) : NAN;
    }
    write_csv(out, {"x", "logderiv_ode", "logderiv_series", "logderiv_approx", "rel_diff_series", "rel_diff_approx"},
              {x, ode, series, approx, rel_s, rel_a});
    emit(cfg, out.str());
    std::cerr << "max rel_diff_series = " << format_double(rel_s.maxCoeff()) << '\n';
    if (model)
        std::cerr << "max rel_diff_approx = " << format_double(rel_a.maxCoeff()) << '\n';
    return kExitOk;
}

int cmd_figures(const RunConfig& cfg, const std::string& out_dir)
{
    const MaterialRegistry registry = load_registry(cfg);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir + ": " + ec.message());

    struct Figure {
        const char* file;
        std::vector<std::string> ids;
        bool regularized;
    };
    const std::vector<Figure> figures = {
        {"fig1.csv", {"he3", "he4", "he6"}, false},
        {"fig2.csv", {"h_pol", "d_pol", "t_pol"}, false},
        {"fig3.csv", {"he3", "he4", "he6"}, true},
        {"fig4.csv", {"h_pol", "d_pol", "t_pol"}, true},
    };
    for (const Figure& fig : figures) {
        const Eigen::ArrayXd x = fig.regularized ? make_grid(0.5, 3.0, cfg.steps, true)
                                                 : make_grid(0.3, 10.0, cfg.steps, true);
        std::vector<std::string> header{"x"};
        std::vector<Eigen::ArrayXd> columns{x};
        for (const std::string& id : fig.ids) {
            const Material& m = registry.lookup(id);
            const CorrelationModel model = build_model(m.potential, m.lambda);
            header.push_back(id);
            columns.push_back(parallel_map(
                x, [&](double xi) { return fig.regularized ? phi_reg(model, xi) : g(model, xi); },
                cfg.threads));
        }
        const auto path = std::filesystem::path(out_dir) / fig.file;
        std::ofstream file(path, std::ios::binary);
        if (!file)
            throw IoError("cannot write " + path.string());
        write_csv(file, header, columns);
        if (!file)
            throw IoError("write failed for " + path.string());
    }
    return kExitOk;
}

int cmd_materials(const RunConfig& cfg)
{
    const MaterialRegistry registry = load_registry(cfg);
    std::ostringstream out;
    out << "id,display_name,lambda,potential,n\n";
    for (const Material& m : registry.all())
        out << m.id << ',' << m.display_name << ',' << format_double(m.lambda) << ','
            << m.potential.name() << ',' << format_double(m.potential.n()) << '\n';
    emit(cfg, out.str());
    return kExitOk;
}

struct ApproximantFlags {
    std::vector<double> coeffs;
    std::size_t factors = 1;
    std::optional<double> nu;
    std::optional<double> boundary_c;
    double power = 0.0;
    std::optional<double> amplitude;
    bool free_amplitude = false;
};

int cmd_approximant(const RunConfig& cfg, const ApproximantFlags& flags)
{
    if (flags.nu.has_value() != flags.boundary_c.has_value())
        throw ConfigError("--nu and --C must be given together");
    SeriesInput series;
    series.coeffs = flags.coeffs;
    if (series.coeffs.empty() || series.coeffs.front() != 1.0)
        series.coeffs.insert(series.coeffs.begin(), 1.0);
    series.prefactor.power = flags.power;
    series.prefactor.amplitude = flags.free_amplitude ? std::nullopt : std::optional<double>(flags.amplitude.value_or(1.0));
    std::optional<BoundaryData> boundary;
    if (flags.nu)
        boundary = BoundaryData{*flags.boundary_c, *flags.nu};
    TrainOptions opts;
    opts.seed = cfg.seed;
    if (cfg.tol > 0.0)
        opts.tolerance = cfg.tol;
    const FactorApproximant fa = train(series, boundary, flags.factors, opts);
    emit(cfg, to_text(fa));
    return kExitOk;
}

int cmd_series(const RunConfig& cfg, std::size_t order)
{
    const Resolved r = resolve(cfg);
    const ShortRangeExpansion e = make_expansion(r.potential, *r.lambda, order);
    std::ostringstream out;
    out << "p,a_p\n";
    for (std::size_t p = 0; p < e.coeffs.size(); ++p)
        out << p << ',' << format_double(e.coeffs[p]) << '\n';
    emit(cfg, out.str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regularizing correlation functions for highly singular pair potentials"};
    app.require_subcommand(1);

    RunConfig cfg;
    VerifyFlags verify_flags;
    OracleFlags oracle_flags;
    ApproximantFlags approx_flags;
    std::string out_dir = "figures";
    std::size_t series_order = 1;

    auto* correlation = app.add_subcommand("correlation", "Emit x,g on a grid");
    add_model_options(correlation, cfg);
    add_grid_options(correlation, cfg);

    auto* regularized = app.add_subcommand("regularized", "Emit x,phi_reg on a grid");
    add_model_options(regularized, cfg);
    add_grid_options(regularized, cfg);

    auto* verify = app.add_subcommand("verify", "Integrability of the regularized vs bare potential");
    add_model_options(verify, cfg);
    verify->add_option("--tol", cfg.tol, "Relative convergence tolerance (default 1e-6)");
    verify->add_option("--dim", verify_flags.dimension, "Spatial dimension")->check(CLI::Range(1, 5));
    verify->add_option("--cutoff", verify_flags.x_max, "Upper integration limit before the analytic tail");
    verify->add_option("--halvings", verify_flags.halvings, "Number of x_min halvings")->check(CLI::Range(2, 30));
    verify->add_flag("--bare-only", verify_flags.bare_only, "Only the bare potential");
    verify->add_option("--out", cfg.out, "Output file (default stdout)");

    auto* oracle = app.add_subcommand("oracle", "Compare log-derivatives against the ODE solution");
    add_model_options(oracle, cfg);
    oracle->add_option("--window", oracle_flags.window, "Comparison window lo:hi");
    oracle->add_option("--order", oracle_flags.order, "Series order k");
    oracle->add_option("--x0", oracle_flags.x0, "Series initialization point (default 0.9*lo)");
    oracle->add_option("--steps", oracle_flags.points, "Comparison points")->check(CLI::Range(2, 100000));
    oracle->add_option("--tol", cfg.tol, "Integrator tolerance (default 1e-10)");
    oracle->add_flag("--solution", oracle_flags.solution, "Emit x,phi,dphi instead of the comparison");
    oracle->add_flag("--inward", oracle_flags.inward, "Inward proxy solution x,phi,dphi");
    oracle->add_option("--out", cfg.out, "Output file (default stdout)");

    auto* figures = app.add_subcommand("figures", "Write fig1..fig4 CSV files");
    figures->add_option("out_dir", out_dir, "Output directory");
    figures->add_option("--out", out_dir, "Output directory");
    figures->add_option("--steps", cfg.steps, "Points per curve")->check(CLI::Range(2, 100000000));
    figures->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1, 1024));
    figures->add_option("--registry", cfg.registry, "Extra material registry file");

    auto* materials = app.add_subcommand("materials", "List registered materials");
    materials->add_option("--registry", cfg.registry, "Extra material registry file");
    materials->add_option("--out", cfg.out, "Output file (default stdout)");

    auto* approximant = app.add_subcommand("approximant", "Train a factor approximant on a series");
    approximant->add_option("--coeffs", approx_flags.coeffs, "Series coefficients a_0,a_1,...")
        ->delimiter(',')
        ->required();
    approximant->add_option("--factors", approx_flags.factors, "Number of factors");
    approximant->add_option("--nu", approx_flags.nu, "Large-variable exponent");
    approximant->add_option("--C", approx_flags.boundary_c, "Large-variable amplitude");
    approximant->add_option("--prefactor-power", approx_flags.power, "Prefactor power p in c0 t^p");
    approximant->add_option("--amplitude", approx_flags.amplitude, "Prefactor amplitude c0");
    approximant->add_flag("--free-amplitude", approx_flags.free_amplitude, "Fix c0 from the boundary amplitude");
    approximant->add_option("--seed", cfg.seed, "Multistart seed");
    approximant->add_option("--tol", cfg.tol, "Residual tolerance (default 1e-10)");
    approximant->add_option("--out", cfg.out, "Output file (default stdout)");

    auto* series = app.add_subcommand("series", "Emit the short-range series coefficients p,a_p");
    add_model_options(series, cfg);
    series->add_option("--order", series_order, "Series order k");
    series->add_option("--out", cfg.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*correlation)
            return cmd_curve(cfg, false);
        if (*regularized)
            return cmd_curve(cfg, true);
        if (*verify)
            return cmd_verify(cfg, verify_flags);
        if (*oracle)
            return cmd_oracle(cfg, oracle_flags);
        if (*figures)
            return cmd_figures(cfg, out_dir);
        if (*materials)
            return cmd_materials(cfg);
        if (*approximant)
            return cmd_approximant(cfg, approx_flags);
        if (*series)
            return cmd_series(cfg, series_order);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const ConstructionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::range_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitConfig;
}
