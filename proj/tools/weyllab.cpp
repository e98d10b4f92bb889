// ============================================================
// weyllab: experiment driver.
//
// One config tree (JSON or dotted-key text), `--set key=value`
// overrides, and a subcommand per pipeline stage.  Data files are
// byte-identical across reruns: every numeric field prints as %.17g
// and timestamps live only in the `.meta.json` sidecar.  Eigensolves
// go through the on-disk cache keyed by the spectral identity;
// WEYLLAB_CACHE_DIR overrides the configured directory.
//
// Exit codes: 0 success, 1 error (with `--error-json`, a machine
// readable record on stdout), 2 duhamel-check residual over tolerance.
// ============================================================

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "weyllab/cache.hpp"
#include "weyllab/config.hpp"
#include "weyllab/csv.hpp"
#include "weyllab/diagnostics.hpp"
#include "weyllab/lattice.hpp"
#include "weyllab/mollifier.hpp"
#include "weyllab/potential.hpp"
#include "weyllab/remainders.hpp"
#include "weyllab/scaling_fit.hpp"
#include "weyllab/spectral.hpp"

namespace {

using namespace weyllab;

// ------------------------------------------------------------
// Artifact plumbing.
// ------------------------------------------------------------

std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for: " + path);
}

// The sidecar carries everything time-dependent, next to the data file.
void write_sidecar(const std::string& path, const std::string& command,
                   const nlohmann::json& tree) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["config"] = tree;
    meta["written_at"] = utc_now();
    write_file(path + ".meta.json", meta.dump(2) + "\n");
}

// Data goes to the configured path when one is set, otherwise stdout.
void emit(const ExperimentConfig& cfg, const nlohmann::json& tree,
          const std::string& command, const std::string& text,
          const std::string& suffix = "") {
    if (cfg.output.path.empty()) {
        std::cout << text;
        return;
    }
    const std::string path = cfg.output.path + suffix;
    write_file(path, text);
    write_sidecar(path, command, tree);
    std::cout << "wrote " << path << "\n";
}

std::string flag_join(const std::vector<std::string>& flags) {
    std::string out;
    for (const auto& f : flags) {
        if (!out.empty()) out += ';';
        out += f;
    }
    return out;
}

// ------------------------------------------------------------
// Shared pipeline pieces.
// ------------------------------------------------------------

SpectralData cached_eigensolve(const ExperimentConfig& cfg) {
    const LatticeBasis basis = enumerate_ball(cfg.dimension, cfg.truncation);
    const FourierTable table = cfg.fourier_table();
    const std::string dir = resolve_cache_dir(cfg.cache_dir);
    CachedDecompose got = decompose_cached(basis, table, dir);
    std::cerr << "eigensolve: " << (got.hit ? "cache hit " : "computed ")
              << got.path << "\n";
    return std::move(got.data);
}

std::vector<std::string> weyl_flags(const SpectralData& sd, double lambda,
                                    const MollifierSpec* mspec) {
    std::vector<std::string> flags;
    if (lambda > sd.reliable_cutoff()) flags.push_back("above_reliable_cutoff");
    if (mspec != nullptr &&
        mollifier_value(*mspec, sd.reliable_cutoff(), 0) > 1e-6)
        flags.push_back("window_reaches_cutoff");
    return flags;
}

// JSON has no spelling for infinities; unbounded windows print null.
std::string json_number(double v) {
    return std::isfinite(v) ? g17(v) : "null";
}

// The scaling-fit record used by both `fit` and `report`; manual
// serialization keeps key order and the 17 digit number contract.
std::string fit_record_json(const std::string& command,
                            const ExperimentConfig& cfg, const ScalingFit& fit,
                            double window_lo, double window_hi) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"command\": \"" << command << "\",\n";
    os << "  \"eta\": " << g17(cfg.eta) << ",\n";
    os << "  \"n\": " << cfg.dimension << ",\n";
    os << "  \"lambda_window\": [" << json_number(window_lo) << ", "
       << json_number(window_hi) << "],\n";
    os << "  \"slope\": " << g17(fit.slope) << ",\n";
    os << "  \"residual\": " << g17(fit.residual_rms) << ",\n";
    os << "  \"expected_exponent\": " << g17(cfg.dimension - cfg.eta) << ",\n";
    os << "  \"prefactor\": " << g17(fit.prefactor) << ",\n";
    os << "  \"sign\": " << fit.sign << ",\n";
    os << "  \"points_used\": " << fit.used.size() << ",\n";
    os << "  \"notices\": [";
    for (std::size_t i = 0; i < fit.notices.size(); ++i)
        os << (i ? ", " : "") << "\"" << json_escape(fit.notices[i]) << "\"";
    os << "]\n}\n";
    return os.str();
}

// ------------------------------------------------------------
// Commands.  Each returns the process exit code.
// ------------------------------------------------------------

int cmd_count(const ExperimentConfig& cfg, const nlohmann::json& tree, int dim,
              double radius) {
    const long long n = count_ball(dim, radius);
    const double rem = weyl_remainder(dim, radius);
    std::cout << n << "\n";
    CsvTable t;
    t.header = {"dim", "radius", "count", "remainder"};
    t.add_row({std::to_string(dim), g17(radius), std::to_string(n), g17(rem)});
    emit(cfg, tree, "count", t.to_string());
    return 0;
}

int cmd_shells(const ExperimentConfig& cfg, const nlohmann::json& tree,
               int dim, long long max_norm_sq) {
    CsvTable t;
    t.header = {"dim", "norm_sq", "multiplicity"};
    for (long long m = 0; m <= max_norm_sq; ++m) {
        const long long mult = shell_multiplicity(dim, m);
        if (mult == 0) continue;
        t.add_row({std::to_string(dim), std::to_string(m), std::to_string(mult)});
    }
    emit(cfg, tree, "shells", t.to_string());
    return 0;
}

int cmd_annulus(const ExperimentConfig& cfg, const nlohmann::json& tree,
                double lambda, int ell, int m) {
    CsvTable t;
    t.header = {"dim",     "lambda",  "ell",     "m",       "j_count",
                "max_k_count", "pair_count", "j_bound", "k_bound", "s_bound",
                "j_ratio", "k_ratio", "s_ratio"};
    const auto add = [&](const AnnulusCensus& c) {
        t.add_row({std::to_string(c.dim), g17(c.lambda), std::to_string(c.ell),
                   std::to_string(c.m), std::to_string(c.j_count),
                   std::to_string(c.max_k_count), std::to_string(c.pair_count),
                   g17(c.j_bound), g17(c.k_bound), g17(c.s_bound),
                   g17(c.j_ratio), g17(c.k_ratio), g17(c.s_ratio)});
    };
    if (ell >= 0 && m >= 0) {
        add(annulus_census(cfg.dimension, lambda, ell, m));
    } else {
        // Sweep every admissible dyadic pair at this lambda.
        for (int l = 0; l <= max_admissible_ell(lambda); ++l)
            for (int mm = 0; mm <= max_admissible_m(lambda); ++mm)
                add(annulus_census(cfg.dimension, lambda, l, mm));
    }
    emit(cfg, tree, "annulus", t.to_string());
    return 0;
}

int cmd_caps(const ExperimentConfig& cfg, const nlohmann::json& tree,
             long long norm_sq, double cap_radius) {
    const CapCensus c = cap_count(cfg.dimension, norm_sq, cap_radius);
    CsvTable t;
    t.header = {"dim", "norm_sq", "cap_radius", "max_count", "empty_sphere",
                "center"};
    std::string center;
    for (std::size_t i = 0; i < c.center.size(); ++i)
        center += (i ? " " : "") + std::to_string(c.center[i]);
    t.add_row({std::to_string(c.dim), std::to_string(c.norm_sq),
               g17(c.cap_radius), std::to_string(c.max_count),
               c.empty_sphere ? "1" : "0", center});
    emit(cfg, tree, "caps", t.to_string());
    return 0;
}

int cmd_fourier(const ExperimentConfig& cfg, const nlohmann::json& tree,
                double xi_max) {
    const FourierTable table = cfg.fourier_table();
    if (cfg.gamma != 0.0)
        table.ensure_up_to(detail::norm_sq_threshold(xi_max));
    CsvTable t;
    t.header = {"xi_norm_sq", "value", "err_estimate"};
    for (const auto& [nsq, entry] : table.rows())
        t.add_row({std::to_string(nsq), g17(entry.value), g17(entry.err)});
    emit(cfg, tree, "fourier", t.to_string());
    return 0;
}

int cmd_assemble(const ExperimentConfig& cfg, const nlohmann::json& tree) {
    const LatticeBasis basis = enumerate_ball(cfg.dimension, cfg.truncation);
    const FourierTable table = cfg.fourier_table();
    const std::vector<double> h = hamiltonian_matrix(basis, table);
    const std::size_t nb = basis.points.size();
    double frob = 0.0, dmin = h[0], dmax = h[0], omax = 0.0;
    for (std::size_t a = 0; a < nb; ++a) {
        for (std::size_t b = 0; b < nb; ++b) {
            const double v = h[a + b * nb];
            frob += v * v;
            if (a == b) {
                dmin = std::min(dmin, v);
                dmax = std::max(dmax, v);
            } else {
                omax = std::max(omax, std::abs(v));
            }
        }
    }
    CsvTable t;
    t.header = {"basis_points", "frobenius", "diag_min", "diag_max",
                "offdiag_max"};
    t.add_row({std::to_string(nb), g17(std::sqrt(frob)), g17(dmin), g17(dmax),
               g17(omax)});
    emit(cfg, tree, "assemble", t.to_string());
    return 0;
}

int cmd_eigs(const ExperimentConfig& cfg, const nlohmann::json& tree) {
    const SpectralData sd = cached_eigensolve(cfg);
    CsvTable t;
    t.header = {"index", "eigenvalue", "shifted", "tau"};
    for (std::size_t k = 0; k < sd.size(); ++k)
        t.add_row({std::to_string(k), g17(sd.raw_eigenvalue(k)),
                   g17(sd.shifted_eigenvalue(k)), g17(sd.tau(k))});
    emit(cfg, tree, "eigs", t.to_string());
    return 0;
}

int cmd_weyl(const ExperimentConfig& cfg, const nlohmann::json& tree,
             const std::string& mode) {
    const SpectralData sd = cached_eigensolve(cfg);
    const auto points = cfg.points();
    CsvTable t;
    t.header = {"lambda", "x_index", "value", "mode", "warning_flags"};
    for (double lambda : cfg.lambda_points()) {
        for (std::size_t xi = 0; xi < points.size(); ++xi) {
            if (mode == "indicator" || mode == "both") {
                const PointwiseRemainder r =
                    pointwise_remainder_indicator(sd, lambda, points[xi]);
                t.add_row({g17(lambda), std::to_string(xi), g17(r.remainder),
                           "indicator",
                           flag_join(weyl_flags(sd, lambda, nullptr))});
            }
            if (mode == "mollified" || mode == "both") {
                const MollifierSpec mspec = cfg.mollifier_at(lambda);
                const PointwiseRemainder r =
                    pointwise_remainder_mollified(sd, mspec, points[xi]);
                t.add_row({g17(lambda), std::to_string(xi), g17(r.remainder),
                           "mollified",
                           flag_join(weyl_flags(sd, lambda, &mspec))});
            }
        }
    }
    emit(cfg, tree, "weyl", t.to_string());
    return 0;
}

int cmd_duhamel_check(const ExperimentConfig& cfg, const nlohmann::json& tree,
                      double tolerance, long long r2_cap) {
    const SpectralData sd = cached_eigensolve(cfg);
    const FourierTable table = cfg.fourier_table();
    const double lambda = cfg.lambda_points().front();
    const MollifierSpec mspec = cfg.mollifier_at(lambda);
    const DuhamelCheck c =
        duhamel_identity_check(sd, table, mspec, cfg.points().front(), r2_cap);

    std::cout << "res1_rel=" << g17(c.res1_rel) << "\n";
    std::cout << "res2_rel=" << g17(c.res2_rel) << "\n";
    const bool pass = c.res1_rel <= tolerance && c.res2_rel <= tolerance;
    std::cout << (pass ? "pass" : "fail") << " tolerance=" << g17(tolerance)
              << "\n";

    CsvTable t;
    t.header = {"lambda",   "delta_diag", "r1_mixed", "r1_free", "r2",
                "res1_abs", "res1_rel",   "res2_abs", "res2_rel"};
    t.add_row({g17(lambda), g17(c.delta_diag), g17(c.r1_mixed), g17(c.r1_free),
               g17(c.r2), g17(c.res1_abs), g17(c.res1_rel), g17(c.res2_abs),
               g17(c.res2_rel)});
    emit(cfg, tree, "duhamel-check", t.to_string());
    return pass ? 0 : 2;
}

int cmd_r1(const ExperimentConfig& cfg, const nlohmann::json& tree) {
    const LatticeBasis basis = enumerate_ball(cfg.dimension, cfg.truncation);
    const FourierTable table = cfg.fourier_table();
    const auto x = cfg.points().front();
    CsvTable t;
    t.header = {"lambda",        "value",          "tail_estimate",
                "tail_fraction", "tail_certified", "truncation_warning"};
    for (double lambda : cfg.lambda_points()) {
        const R1Result r = r1_sum(basis, table, cfg.mollifier_at(lambda), x);
        t.add_row({g17(lambda), g17(r.value), g17(r.tail_estimate),
                   g17(r.tail_fraction), r.tail_certified ? "1" : "0",
                   r.truncation_warning ? "1" : "0"});
    }
    emit(cfg, tree, "r1", t.to_string());
    return 0;
}

int cmd_r1_lower(const ExperimentConfig& cfg, const nlohmann::json& tree,
                 double k_factor) {
    CsvTable t;
    t.header = {"lambda",     "k_max",      "value",
                "pair_count", "tail_bound", "tail_fraction"};
    for (double lambda : cfg.lambda_points()) {
        const double k_max = k_factor * lambda;
        const ModelR1Lower r =
            r1_indicator_lower(cfg.dimension, cfg.eta, lambda, k_max);
        t.add_row({g17(lambda), g17(k_max), g17(r.value),
                   std::to_string(r.pair_count), g17(r.tail_bound),
                   g17(r.tail_fraction)});
    }
    emit(cfg, tree, "r1-lower", t.to_string());
    return 0;
}

int cmd_r2(const ExperimentConfig& cfg, const nlohmann::json& tree,
           long long r2_cap) {
    const SpectralData sd = cached_eigensolve(cfg);
    const FourierTable table = cfg.fourier_table();
    const auto x = cfg.points().front();
    CsvTable t;
    t.header = {"lambda", "value"};
    for (double lambda : cfg.lambda_points()) {
        const double v = r2_sum(sd, table, cfg.mollifier_at(lambda), x, r2_cap);
        t.add_row({g17(lambda), g17(v)});
    }
    emit(cfg, tree, "r2", t.to_string());
    return 0;
}

int cmd_fit(const ExperimentConfig& cfg, const nlohmann::json& tree,
            const std::string& input, int lambda_col, int value_col,
            double window_lo, double window_hi) {
    if (lambda_col < 0 || value_col < 0)
        throw std::invalid_argument("fit: column indices must be >= 0");
    const auto rows = read_csv_columns(
        input, {static_cast<std::size_t>(lambda_col),
                static_cast<std::size_t>(value_col)});
    if (rows.empty())
        throw std::invalid_argument("fit: no usable rows in " + input);
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : rows) pts.emplace_back(row[0], row[1]);
    const ScalingFit fit = fit_exponent(pts, window_lo, window_hi);
    const std::string record =
        fit_record_json("fit", cfg, fit, fit.window_lo, fit.window_hi);
    std::cout << record;
    if (!cfg.output.path.empty()) emit(cfg, tree, "fit", record, ".fit.json");
    return 0;
}

int cmd_diagnose(const ExperimentConfig& cfg, const nlohmann::json& tree,
                 double heat_c) {
    const SpectralData sd = cached_eigensolve(cfg);
    const auto x0 = cfg.points().front();
    const auto grid = diagnostic_grid(cfg.dimension, x0);
    CsvTable t;
    t.header = {"report", "lambda", "key", "value"};
    const auto add_report = [&](const BoundReport& rep, const std::string& lam) {
        for (const auto& [key, value] : rep.params)
            t.add_row({rep.name, lam, "param:" + key, g17(value)});
        for (const auto& [key, value] : rep.rows)
            t.add_row({rep.name, lam, key, g17(value)});
        t.add_row({rep.name, lam, "max_ratio", g17(rep.max_ratio)});
        t.add_row({rep.name, lam, "argmax", rep.argmax});
        for (const auto& f : rep.flags)
            t.add_row({rep.name, lam, "flag:" + f, "1"});
    };

    for (double lambda : cfg.lambda_points()) {
        if (lambda + 1.0 <= sd.reliable_cutoff())
            add_report(band_ratio(sd, lambda, grid), g17(lambda));
        if (lambda <= sd.reliable_cutoff())
            add_report(rough_bound_ratio(sd, lambda, grid), g17(lambda));
    }

    // Heat pairs: coincident at x0 and the antipodal worst case, at a
    // few clean times clamped into the admissible window.
    std::vector<double> antipode = x0;
    for (double& c : antipode) c = std::fmod(c + M_PI, 2.0 * M_PI);
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>
        pairs = {{x0, x0}, {x0, antipode}};
    const double t_lo = 4.0 / (sd.lambda_max() * sd.lambda_max());
    std::vector<double> t_grid;
    for (double tt : {0.2, 0.5, 1.0}) {
        const double clamped = std::min(1.0, std::max(tt, t_lo));
        if (t_grid.empty() || clamped > t_grid.back())
            t_grid.push_back(clamped);
    }
    add_report(heat_bound_ratio(sd, t_grid, pairs, heat_c), "");

    emit(cfg, tree, "diagnose", t.to_string());
    return 0;
}

int cmd_report(const ExperimentConfig& cfg, const nlohmann::json& tree) {
    const SpectralData sd = cached_eigensolve(cfg);
    const auto points = cfg.points();
    CsvTable t;
    t.header = {"lambda", "x_index", "value", "mode", "warning_flags"};
    std::vector<std::pair<double, double>> pts;
    for (double lambda : cfg.lambda_points()) {
        const MollifierSpec mspec = cfg.mollifier_at(lambda);
        for (std::size_t xi = 0; xi < points.size(); ++xi) {
            const double d = perturbation_difference(sd, mspec, points[xi]);
            t.add_row({g17(lambda), std::to_string(xi), g17(d), "mollified",
                       flag_join(weyl_flags(sd, lambda, &mspec))});
            if (xi == 0) pts.emplace_back(lambda, d);
        }
    }
    const ScalingFit fit = fit_exponent(pts);
    const std::string record = fit_record_json(
        "report", cfg, fit, cfg.lambda_grid.min, cfg.lambda_grid.max);
    std::cout << record;
    emit(cfg, tree, "report", t.to_string());
    if (!cfg.output.path.empty()) emit(cfg, tree, "report", record, ".fit.json");
    return 0;
}

// ------------------------------------------------------------
// Wiring.
// ------------------------------------------------------------

struct GlobalArgs {
    std::string config_path;
    std::vector<std::string> sets;
    bool error_json = false;
};

nlohmann::json effective_tree(const GlobalArgs& g) {
    nlohmann::json tree = g.config_path.empty()
                              ? nlohmann::json::object()
                              : load_config_json(g.config_path);
    for (const auto& s : g.sets) apply_override(tree, s);
    return tree;
}

}  // namespace

int main(int argc, char** argv) {
    GlobalArgs g;
    CLI::App app{"weyllab: lattice counting, singular Schrodinger spectra, "
                 "and pointwise Weyl remainders on flat tori"};
    app.require_subcommand(1);
    app.fallthrough();  // global options are legal after the subcommand
    app.add_option("--config", g.config_path,
                   "config file (*.json or dotted-key text)");
    app.add_option("--set", g.sets, "override, key=value (repeatable)");
    app.add_flag("--error-json", g.error_json,
                 "report errors as JSON on stdout");

    // Per-command argument stores; negative sentinels mean "from config".
    int dim = -1;
    double radius = -1.0, lambda = -1.0, cap_radius = 1.0, xi_max = -1.0;
    long long max_norm_sq = -1, norm_sq = -1, r2_cap = 2500;
    int ell = -1, m = -1, lambda_col = 0, value_col = 1;
    double tolerance = 1e-8, k_factor = 4.0, heat_c = 0.125;
    double window_lo = 0.0, window_hi = std::numeric_limits<double>::infinity();
    std::string mode = "mollified", fit_input;

    CLI::App* c_count = app.add_subcommand("count", "lattice ball count and remainder");
    c_count->add_option("--dim", dim, "dimension (default: config)");
    c_count->add_option("--radius", radius, "ball radius (default: truncation)");
    CLI::App* c_shells = app.add_subcommand("shells", "shell multiplicities");
    c_shells->add_option("--dim", dim, "dimension (default: config)");
    c_shells->add_option("--max-norm-sq", max_norm_sq,
                         "largest |j|^2 listed (default: truncation^2)");
    CLI::App* c_annulus =
        app.add_subcommand("annulus", "dyadic annulus pair census");
    c_annulus->add_option("--lambda", lambda, "level (default: lambda_grid.min)");
    c_annulus->add_option("--ell", ell, "dyadic |tau - lambda| window index");
    c_annulus->add_option("--m", m, "dyadic offset window index");
    CLI::App* c_caps = app.add_subcommand("caps", "spherical cap census");
    c_caps->add_option("--norm-sq", norm_sq,
                       "sphere |j|^2 (default: round(lambda_grid.min^2))");
    c_caps->add_option("--cap-radius", cap_radius, "cap diameter scale");
    CLI::App* c_fourier =
        app.add_subcommand("fourier", "potential Fourier table export");
    c_fourier->add_option("--xi-max", xi_max,
                          "largest |xi| tabulated (default: truncation)");
    app.add_subcommand("assemble", "Hamiltonian assembly summary");
    app.add_subcommand("eigs", "cached eigendecomposition export");
    CLI::App* c_weyl =
        app.add_subcommand("weyl", "pointwise counting remainders");
    c_weyl->add_option("--mode", mode, "indicator | mollified | both")
        ->check(CLI::IsMember({"indicator", "mollified", "both"}));
    CLI::App* c_duh = app.add_subcommand(
        "duhamel-check", "first and second order identity residuals");
    c_duh->add_option("--tolerance", tolerance, "pass threshold (relative)");
    c_duh->add_option("--r2-cap", r2_cap, "largest basis the triple sum accepts");
    app.add_subcommand("r1", "first-order mollified sum");
    CLI::App* c_r1l = app.add_subcommand(
        "r1-lower", "model first-order sum with the idealized kernel");
    c_r1l->add_option("--k-factor", k_factor, "K = factor * lambda (>= 4)");
    CLI::App* c_r2 = app.add_subcommand("r2", "second-order remainder sum");
    c_r2->add_option("--r2-cap", r2_cap, "largest basis the triple sum accepts");
    CLI::App* c_fit = app.add_subcommand("fit", "log-log exponent fit of a CSV");
    c_fit->add_option("--input", fit_input, "CSV file of samples")->required();
    c_fit->add_option("--lambda-col", lambda_col, "lambda column index");
    c_fit->add_option("--value-col", value_col, "value column index");
    c_fit->add_option("--window-lo", window_lo, "smallest lambda fitted");
    c_fit->add_option("--window-hi", window_hi, "largest lambda fitted");
    CLI::App* c_diag =
        app.add_subcommand("diagnose", "band, rough, and heat bound reports");
    c_diag->add_option("--heat-c", heat_c, "Gaussian rate in the heat envelope");
    app.add_subcommand("report", "full pipeline: eigensolve, difference, fit");

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();

    try {
        const nlohmann::json tree = effective_tree(g);
        const ExperimentConfig cfg = config_from_json(tree);
        if (dim < 0) dim = cfg.dimension;
        if (radius < 0.0) radius = cfg.truncation;
        if (lambda < 0.0) lambda = cfg.lambda_grid.min;
        if (max_norm_sq < 0)
            max_norm_sq = static_cast<long long>(cfg.truncation * cfg.truncation);
        if (norm_sq < 0)
            norm_sq = std::llround(cfg.lambda_grid.min * cfg.lambda_grid.min);
        if (xi_max < 0.0) xi_max = cfg.truncation;

        if (command == "count") return cmd_count(cfg, tree, dim, radius);
        if (command == "shells") return cmd_shells(cfg, tree, dim, max_norm_sq);
        if (command == "annulus") return cmd_annulus(cfg, tree, lambda, ell, m);
        if (command == "caps") return cmd_caps(cfg, tree, norm_sq, cap_radius);
        if (command == "fourier") return cmd_fourier(cfg, tree, xi_max);
        if (command == "assemble") return cmd_assemble(cfg, tree);
        if (command == "eigs") return cmd_eigs(cfg, tree);
        if (command == "weyl") return cmd_weyl(cfg, tree, mode);
        if (command == "duhamel-check")
            return cmd_duhamel_check(cfg, tree, tolerance, r2_cap);
        if (command == "r1") return cmd_r1(cfg, tree);
        if (command == "r1-lower") return cmd_r1_lower(cfg, tree, k_factor);
        if (command == "r2") return cmd_r2(cfg, tree, r2_cap);
        if (command == "fit")
            return cmd_fit(cfg, tree, fit_input, lambda_col, value_col,
                           window_lo, window_hi);
        if (command == "diagnose") return cmd_diagnose(cfg, tree, heat_c);
        if (command == "report") return cmd_report(cfg, tree);
        throw std::logic_error("unhandled command: " + command);
    } catch (const std::exception& e) {
        if (g.error_json) {
            nlohmann::json err;
            err["error"]["command"] = command;
            err["error"]["message"] = e.what();
            std::cout << err.dump(2) << "\n";
        } else {
            std::cerr << "weyllab " << command << ": " << e.what() << "\n";
        }
        return 1;
    }
}
