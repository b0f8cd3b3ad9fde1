#include "anchor/cli.hpp"

#include "anchor/diagnostics.hpp"
#include "anchor/estimator.hpp"
#include "anchor/output.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

namespace anchor::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::map<std::string, std::vector<std::string>> kAllowedKeys = {
    {"problem",
     {"kind", "dim", "spectrum", "skew", "noise", "n", "d", "lambda", "sampling", "csv", "target",
      "standardize", "gen_seed", "constraint", "start", "start_scale"}},
    {"solver",
     {"method", "methods", "estimator", "eps", "eta0", "mu", "dist0", "lipschitz",
      "constant_scale", "stop_on_estimate", "max_iters", "budget", "step", "batch", "seed",
      "replications", "eps_grid", "checkpoints", "s1_scale", "s2_cap", "workers",
      "record_stride", "rounds"}},
    {"output", {"dir", "formats"}},
};

const std::set<std::string> kMethods = {
    "halpern",   "halpern_minibatch",  "halpern_constrained", "e_halpern",
    "e_halpern_minibatch", "e_halpern_single", "restarted_e_halpern",
    "gda",       "eg",                 "popov",               "halpern_single"};

Vec make_start(const std::string& kind, double scale, int dim, Seed master) {
    if (kind == "zero") return Vec::Zero(dim);
    if (kind == "ones") return Vec(scale * Vec::Ones(dim) / std::sqrt(static_cast<double>(dim)));
    if (kind == "random") {
        RngStream rng(master, /*stream=*/0x57A27ULL);
        Vec g(dim);
        for (int i = 0; i < dim; ++i) g(i) = rng.normal();
        const double norm = g.norm();
        return norm > 0.0 ? Vec(scale * g / norm) : Vec(scale * Vec::Unit(dim, 0));
    }
    throw ConfigError("unknown start '" + kind + "' (expected zero, ones, or random)");
}

Projection parse_constraint(const std::vector<std::string>& tokens, int dim) {
    if (tokens.empty() || tokens[0] == "none") return Projection::identity();
    if (tokens[0] == "ball") {
        if (tokens.size() != 2) throw ConfigError("constraint ball expects: ball RADIUS");
        return Projection::ball(std::stod(tokens[1]));
    }
    if (tokens[0] == "box") {
        if (tokens.size() != 3) throw ConfigError("constraint box expects: box LO HI");
        const double lo = std::stod(tokens[1]), hi = std::stod(tokens[2]);
        return Projection::box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
    }
    throw ConfigError("unknown constraint '" + tokens[0] + "' (expected none, ball, or box)");
}

struct BuiltProblem {
    ProblemInstance problem;
    Vec u0;
};

BuiltProblem build_problem(const KeyValueConfig& cfg, Seed master) {
    const std::string kind = cfg.get_string("problem", "kind");
    const std::string start = cfg.get_string_or("problem", "start", "random");
    const double start_scale = cfg.get_double_opt("problem", "start_scale").value_or(1.0);
    const std::uint64_t gen_seed =
        static_cast<std::uint64_t>(cfg.get_int_opt("problem", "gen_seed").value_or(7));

    if (kind == "identity" || kind == "linear" || kind == "bilinear") {
        const double noise = cfg.get_double_opt("problem", "noise").value_or(0.0);
        ProblemInstance problem = [&] {
            if (kind == "identity")
                return make_identity_problem(
                    static_cast<int>(cfg.get_int("problem", "dim")), noise);
            if (kind == "bilinear") return make_bilinear_problem(noise);
            LinearProblemSpec spec;
            spec.dim = static_cast<int>(cfg.get_int("problem", "dim"));
            std::vector<double> spectrum = cfg.get_double_list("problem", "spectrum");
            if (spectrum.size() == 2 && spec.dim > 2) {
                // Two values are interpreted as an even spread lo..hi.
                const double lo = spectrum[0], hi = spectrum[1];
                spectrum.resize(static_cast<std::size_t>(spec.dim));
                for (int i = 0; i < spec.dim; ++i)
                    spectrum[static_cast<std::size_t>(i)] =
                        lo + (hi - lo) * static_cast<double>(i) /
                                 static_cast<double>(spec.dim - 1);
            }
            spec.spectrum = std::move(spectrum);
            spec.skew = cfg.get_double_opt("problem", "skew").value_or(0.0);
            spec.noise = noise;
            spec.gen_seed = gen_seed;
            return make_linear_problem(spec);
        }();
        Vec u0 = make_start(start, start_scale, problem.dim(), master);
        if (cfg.has("problem", "constraint")) {
            Projection proj =
                parse_constraint(cfg.get_string_list("problem", "constraint"), problem.dim());
            problem = problem.with_projection(proj);
            u0 = proj(u0);
        }
        return {std::move(problem), std::move(u0)};
    }

    if (kind == "rls" || kind == "rls_csv") {
        const double lambda = cfg.get_double("problem", "lambda");
        if (lambda <= 1.0)
            throw ConfigError(
                "rls requires lambda > 1: the inner maximization must stay concave "
                "(lambda = " + std::to_string(lambda) + " at line " +
                std::to_string(cfg.line_of("problem", "lambda")) + ")");
        RlsSpec spec;
        if (kind == "rls") {
            spec = make_synthetic_rls(static_cast<int>(cfg.get_int("problem", "n")),
                                      static_cast<int>(cfg.get_int("problem", "d")), lambda,
                                      gen_seed);
        } else {
            CsvLoadOptions opts;
            opts.standardize = cfg.get_bool_or("problem", "standardize", false);
            CsvMatrix data = load_matrix_csv(cfg.get_string("problem", "csv"),
                                             cfg.get_string("problem", "target"), opts);
            spec.A = std::move(data.A);
            spec.b = std::move(data.b);
            spec.lambda = lambda;
        }
        const std::string sampling = cfg.get_string_or("problem", "sampling", "rows");
        if (sampling == "rows")
            spec.sampling = RlsSampling::RowSubsample;
        else if (sampling == "full")
            spec.sampling = RlsSampling::Full;
        else
            throw ConfigError("unknown sampling '" + sampling + "' (expected rows or full)");

        const int dim = static_cast<int>(spec.A.rows() + spec.A.cols());
        Vec u0 = make_start(start, start_scale, dim, master);
        spec.sigma_reference = u0;  // sigma is measured where the run starts
        return {make_rls_problem(spec), std::move(u0)};
    }

    throw ConfigError("unknown problem kind '" + kind + "'");
}

void validate_eta0(const Experiment& exp, const std::string& method) {
    if (!exp.eta0) return;
    if (method.rfind("e_halpern", 0) != 0 && method != "restarted_e_halpern") return;
    const double lipschitz = exp.lipschitz.value_or(exp.problem.constants().lipschitz);
    const double bound = eta0_upper_bound(lipschitz);
    if (*exp.eta0 > bound * (1.0 + 1e-12))
        throw ConfigError("eta0 = " + std::to_string(*exp.eta0) +
                          " violates the step bound eta0 <= 1/(3*sqrt(3)*L) = " +
                          std::to_string(bound));
    if (*exp.eta0 <= 0.0) throw ConfigError("eta0 must be positive");
}

double default_step(const std::string& method, double lipschitz) {
    if (method == "gda") return 1.0 / (2.0 * lipschitz);
    if (method == "eg" || method == "popov") return 1.0 / (3.0 * lipschitz);
    return 1.0 / lipschitz;  // halpern_single
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    body(out);
}

json summary_json(const SolveResult& result, double wall_seconds) {
    const TraceRecord& last = result.trace.last();
    json j;
    j["status"] = run_status_name(result.trace.status);
    j["iterations"] = last.k;
    j["total_queries"] = result.trace.total_queries;
    j["final_op_norm_true"] = last.op_norm_true;
    j["final_op_norm_est"] = last.op_norm_est;
    j["final_dist_to_solution"] = last.dist_to_solution;
    j["s2_cap_hits"] = result.trace.s2_cap_hits;
    j["wall_time_s"] = wall_seconds;
    return j;
}

int report_error(std::ostream& err, const char* command, const std::exception& ex, int code) {
    err << "anchor " << command << ": " << ex.what() << "\n";
    return code;
}

}  // namespace

Experiment load_experiment(const KeyValueConfig& cfg, const Overrides& overrides) {
    cfg.reject_unknown(kAllowedKeys);

    const Seed master{overrides.seed.value_or(
        static_cast<std::uint64_t>(cfg.get_int_opt("solver", "seed").value_or(1)))};
    BuiltProblem built = build_problem(cfg, master);
    Experiment exp{std::move(built.problem), std::move(built.u0)};
    exp.master = master;

    exp.method = cfg.get_string_or("solver", "method", "");
    if (cfg.has("solver", "methods")) exp.methods = cfg.get_string_list("solver", "methods");
    for (const std::string& m : exp.methods)
        if (!kMethods.count(m)) throw ConfigError("unknown method '" + m + "'");
    if (!exp.method.empty() && !kMethods.count(exp.method))
        throw ConfigError("unknown method '" + exp.method + "'");

    exp.estimator = cfg.get_string_or("solver", "estimator", "page");
    if (exp.estimator != "page" && exp.estimator != "minibatch" && exp.estimator != "single")
        throw ConfigError("unknown estimator '" + exp.estimator + "'");

    exp.eps = cfg.get_double_opt("solver", "eps").value_or(0.1);
    if (exp.eps <= 0.0) throw ConfigError("eps must be > 0");
    exp.eta0 = cfg.get_double_opt("solver", "eta0");
    exp.mu = cfg.get_double_opt("solver", "mu");
    exp.dist0 = cfg.get_double_opt("solver", "dist0");
    exp.lipschitz = cfg.get_double_opt("solver", "lipschitz");
    exp.constant_scale = cfg.get_double_opt("solver", "constant_scale").value_or(1.0);
    if (exp.constant_scale <= 0.0) throw ConfigError("constant_scale must be > 0");
    exp.s1_scale = cfg.get_double_opt("solver", "s1_scale").value_or(1.0);
    exp.stop_on_estimate = cfg.get_bool_or("solver", "stop_on_estimate", false);
    exp.max_iters = cfg.get_int_opt("solver", "max_iters");
    if (auto b = cfg.get_int_opt("solver", "budget")) {
        if (*b <= 0) throw ConfigError("budget must be positive");
        exp.budget = static_cast<std::uint64_t>(*b);
    }
    if (auto s = cfg.get_double_opt("solver", "step")) exp.step = s;
    exp.batch = cfg.get_int_opt("solver", "batch").value_or(1);
    if (exp.batch < 1) throw ConfigError("batch must be >= 1");
    exp.replications = static_cast<int>(cfg.get_int_opt("solver", "replications").value_or(0));
    if (cfg.has("solver", "eps_grid")) exp.eps_grid = cfg.get_double_list("solver", "eps_grid");
    if (cfg.has("solver", "checkpoints")) {
        exp.checkpoints.clear();
        for (double c : cfg.get_double_list("solver", "checkpoints"))
            exp.checkpoints.push_back(static_cast<std::int64_t>(c));
    }
    if (auto cap = cfg.get_int_opt("solver", "s2_cap")) exp.s2_cap = *cap;
    exp.record_stride = cfg.get_int_opt("solver", "record_stride").value_or(1);
    if (exp.record_stride < 1) throw ConfigError("record_stride must be >= 1");
    exp.rounds = cfg.get_int_opt("solver", "rounds");
    exp.workers = static_cast<int>(cfg.get_int_opt("solver", "workers").value_or(0));

    exp.out_dir = cfg.get_string_or("output", "dir", "out");
    if (overrides.out_dir) exp.out_dir = *overrides.out_dir;
    if (cfg.has("output", "formats")) {
        exp.want_csv = exp.want_svg = exp.want_json = false;
        for (const std::string& f : cfg.get_string_list("output", "formats")) {
            if (f == "csv")
                exp.want_csv = true;
            else if (f == "svg")
                exp.want_svg = true;
            else if (f == "json")
                exp.want_json = true;
            else
                throw ConfigError("unknown output format '" + f + "'");
        }
    }

    if (!exp.method.empty()) validate_eta0(exp, exp.method);
    for (const std::string& m : exp.methods) validate_eta0(exp, m);
    return exp;
}

SolveResult run_method(const Experiment& exp, const std::string& method, Seed seed,
                       std::optional<double> eps_override,
                       std::optional<std::uint64_t> budget_override, bool keep_iterates) {
    const double eps = eps_override.value_or(exp.eps);
    const std::optional<std::uint64_t> budget =
        budget_override ? budget_override : exp.budget;
    const double lipschitz = exp.lipschitz.value_or(exp.problem.constants().lipschitz);

    EstimatorKind estimator = EstimatorKind::Page;
    if (exp.estimator == "minibatch") estimator = EstimatorKind::MiniBatch;
    if (exp.estimator == "single") estimator = EstimatorKind::SingleSample;

    if (method == "halpern" || method == "halpern_minibatch" || method == "halpern_constrained") {
        CocoerciveConfig config;
        config.eps = eps;
        config.lipschitz = exp.lipschitz;
        config.dist0 = exp.dist0;
        config.max_iters = exp.max_iters;
        config.query_budget = budget;
        config.stop_on_estimate = exp.stop_on_estimate;
        config.master_seed = seed;
        config.constant_scale = exp.constant_scale;
        config.s2_cap = exp.s2_cap;
        config.page_s1_scale = exp.s1_scale;
        config.estimator = method == "halpern_minibatch" ? EstimatorKind::MiniBatch : estimator;
        config.keep_iterates = keep_iterates;
        config.record_stride = exp.record_stride;
        if (method == "halpern_constrained")
            return halpern_cocoercive_constrained(exp.problem, exp.u0, config);
        return halpern_cocoercive(exp.problem, exp.u0, config);
    }

    if (method.rfind("e_halpern", 0) == 0) {
        MonotoneConfig config;
        config.eps = eps;
        config.lipschitz = exp.lipschitz;
        config.eta0 = exp.eta0;
        config.dist0 = exp.dist0;
        config.max_iters = exp.max_iters;
        config.query_budget = budget;
        config.master_seed = seed;
        config.constant_scale = exp.constant_scale;
        config.s2_cap = exp.s2_cap;
        config.page_s1_scale = exp.s1_scale;
        config.estimator = estimator;
        if (method == "e_halpern_minibatch") config.estimator = EstimatorKind::MiniBatch;
        if (method == "e_halpern_single") config.estimator = EstimatorKind::SingleSample;
        config.keep_iterates = keep_iterates;
        config.record_stride = exp.record_stride;
        return e_halpern(exp.problem, exp.u0, config);
    }

    if (method == "restarted_e_halpern") {
        SharpConfig config;
        config.max_rounds = exp.rounds;
        config.eps = eps;
        config.lipschitz = exp.lipschitz;
        config.mu = exp.mu;
        config.eta0 = exp.eta0;
        config.dist0 = exp.dist0;
        config.query_budget = budget;
        config.master_seed = seed;
        config.constant_scale = exp.constant_scale;
        config.s2_cap = exp.s2_cap;
        config.page_s1_scale = exp.s1_scale;
        config.keep_iterates = keep_iterates;
        config.record_stride = exp.record_stride;
        return restarted_e_halpern(exp.problem, exp.u0, config);
    }

    // Baselines consume a query budget rather than an iteration count.
    if (!budget)
        throw ConfigError("method '" + method + "' needs a query budget in [solver]");
    BaselineConfig config;
    config.step = exp.step.value_or(default_step(method, lipschitz));
    config.batch = exp.batch;
    config.budget = *budget;
    config.max_iters = exp.max_iters;
    config.master_seed = seed;
    config.keep_iterates = keep_iterates;
    config.record_stride = exp.record_stride;
    return run_baseline(baseline_from_name(method), exp.problem, exp.u0, config);
}

int cmd_solve(const std::string& config_path, const Overrides& overrides, std::ostream& err) {
    try {
        const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
        Experiment exp = load_experiment(cfg, overrides);
        if (exp.method.empty()) throw ConfigError("solve needs 'method' in [solver]");

        const auto t0 = std::chrono::steady_clock::now();
        SolveResult result = run_method(exp, exp.method, exp.master);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        fs::create_directories(exp.out_dir);
        if (exp.want_csv)
            write_file(fs::path(exp.out_dir) / "trace.csv",
                       [&](std::ostream& out) { write_trace_csv(out, result.trace); });
        if (exp.want_json)
            write_file(fs::path(exp.out_dir) / "summary.json", [&](std::ostream& out) {
                out << summary_json(result, wall).dump(2) << "\n";
            });
        return kExitOk;
    } catch (const DivergenceError& ex) {
        return report_error(err, "solve", ex, kExitDivergence);
    } catch (const std::exception& ex) {
        return report_error(err, "solve", ex, kExitConfigError);
    }
}

int cmd_compare(const std::string& config_path, const Overrides& overrides, std::ostream& err) {
    try {
        const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
        Experiment exp = load_experiment(cfg, overrides);
        if (exp.methods.size() < 2)
            throw ConfigError("compare needs at least 2 entries in 'methods'");
        if (!exp.budget) throw ConfigError("compare needs a shared 'budget' in [solver]");

        std::vector<SolveResult> results(exp.methods.size());
        std::vector<std::string> failures(exp.methods.size());
        std::vector<bool> diverged(exp.methods.size(), false);
        parallel_for(
            static_cast<std::int64_t>(exp.methods.size()),
            [&](std::int64_t i) {
                const auto idx = static_cast<std::size_t>(i);
                try {
                    results[idx] = run_method(exp, exp.methods[idx],
                                              derive_seed(exp.master, 1000 + idx));
                } catch (const DivergenceError& ex) {
                    failures[idx] = ex.what();
                    diverged[idx] = true;
                } catch (const std::exception& ex) {
                    failures[idx] = ex.what();
                }
            },
            exp.workers);

        for (std::size_t i = 0; i < exp.methods.size(); ++i)
            if (!failures[i].empty()) {
                err << "anchor compare: method " << exp.methods[i] << ": " << failures[i] << "\n";
                return diverged[i] ? kExitDivergence : kExitConfigError;
            }

        fs::create_directories(exp.out_dir);
        if (exp.want_csv)
            for (std::size_t i = 0; i < exp.methods.size(); ++i)
                write_file(fs::path(exp.out_dir) / ("trace_" + exp.methods[i] + ".csv"),
                           [&](std::ostream& out) { write_trace_csv(out, results[i].trace); });

        // Aligned grid: last observed operator norm at or before each query count.
        const int grid_points = 201;
        if (exp.want_csv)
            write_file(fs::path(exp.out_dir) / "comparison.csv", [&](std::ostream& out) {
                CsvWriter csv(out);
                std::vector<std::string> head{"queries"};
                for (const std::string& m : exp.methods) head.push_back(m);
                csv.header(head);
                for (int g = 0; g < grid_points; ++g) {
                    const std::uint64_t q = static_cast<std::uint64_t>(
                        static_cast<double>(*exp.budget) * g / (grid_points - 1));
                    std::vector<std::string> row{CsvWriter::cell(q)};
                    for (const SolveResult& r : results) {
                        double norm = std::numeric_limits<double>::quiet_NaN();
                        for (const TraceRecord& rec : r.trace.records) {
                            if (rec.queries_cum > q) break;
                            norm = rec.op_norm_true;
                        }
                        row.push_back(CsvWriter::cell(norm));
                    }
                    csv.row(row);
                }
            });

        if (exp.want_svg)
            write_file(fs::path(exp.out_dir) / "comparison.svg", [&](std::ostream& out) {
                std::vector<PlotSeries> series;
                for (std::size_t i = 0; i < exp.methods.size(); ++i) {
                    PlotSeries s;
                    s.label = exp.methods[i];
                    const auto& records = results[i].trace.records;
                    const std::size_t stride = std::max<std::size_t>(1, records.size() / 2000);
                    for (std::size_t r = 0; r < records.size(); r += stride) {
                        s.x.push_back(static_cast<double>(records[r].queries_cum));
                        s.y.push_back(records[r].op_norm_true);
                    }
                    series.push_back(std::move(s));
                }
                PlotOptions options;
                options.title = "operator norm vs stochastic queries";
                options.x_label = "stochastic oracle queries";
                options.y_label = "||F(u)||";
                options.log_y = true;
                write_svg_plot(out, series, options);
            });
        return kExitOk;
    } catch (const DivergenceError& ex) {
        return report_error(err, "compare", ex, kExitDivergence);
    } catch (const std::exception& ex) {
        return report_error(err, "compare", ex, kExitConfigError);
    }
}

int cmd_variance_check(const std::string& config_path, const Overrides& overrides,
                       std::ostream& err) {
    try {
        const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
        Experiment exp = load_experiment(cfg, overrides);
        if (!exp.problem.has_true_operator())
            throw ConfigError("variance-check needs a problem with a known true operator");
        const int reps = exp.replications > 0 ? exp.replications : 200;
        if (reps < 200) throw ConfigError("variance-check needs replications >= 200");
        if (exp.checkpoints.empty()) throw ConfigError("variance-check needs checkpoints");

        const std::int64_t k_max =
            *std::max_element(exp.checkpoints.begin(), exp.checkpoints.end());
        if (k_max < 1) throw ConfigError("checkpoints must be >= 1");

        // Fixed replayed path with anchored-decay spacing: u_k = u0 / (k + 1).
        std::vector<Vec> path;
        path.reserve(static_cast<std::size_t>(k_max) + 1);
        for (std::int64_t k = 0; k <= k_max; ++k)
            path.push_back(exp.u0 / static_cast<double>(k + 1));

        const ProblemConstants& constants = exp.problem.constants();
        PageSettings settings;
        settings.eps = exp.eps;
        settings.sigma = constants.sigma;
        settings.lipschitz = exp.lipschitz.value_or(constants.lipschitz);
        settings.rule = PkRule::Anchored;
        settings.s2_cap = exp.s2_cap;
        settings.scale = exp.constant_scale;
        settings.s1_scale = exp.s1_scale;

        std::vector<std::vector<double>> sq_err(
            static_cast<std::size_t>(reps),
            std::vector<double>(exp.checkpoints.size(), 0.0));
        parallel_for(
            reps,
            [&](std::int64_t rep) {
                const StochasticOracle& oracle = exp.problem.oracle();
                const double init_raw = settings.scale * settings.s1_scale * 8.0 *
                                        settings.sigma * settings.sigma /
                                        (settings.eps * settings.eps);
                const std::int64_t s1_0 =
                    std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(init_raw)));
                PageState state =
                    page_init(path[0], s1_0, oracle,
                              RngStream(derive_seed(exp.master, static_cast<std::uint64_t>(rep)),
                                        /*stream=*/0x7ACEULL));
                for (std::int64_t k = 1; k <= k_max; ++k) {
                    page_step(state, path[static_cast<std::size_t>(k)], oracle, settings);
                    for (std::size_t c = 0; c < exp.checkpoints.size(); ++c)
                        if (exp.checkpoints[c] == k)
                            sq_err[static_cast<std::size_t>(rep)][c] =
                                (state.estimate -
                                 exp.problem.true_value(path[static_cast<std::size_t>(k)]))
                                    .squaredNorm();
                }
            },
            exp.workers);

        const double slack = 1.0 + 5.0 / std::sqrt(static_cast<double>(reps));
        bool all_pass = true;
        std::size_t worst = 0;
        double worst_ratio = 0.0;
        std::vector<double> measured(exp.checkpoints.size(), 0.0);
        for (std::size_t c = 0; c < exp.checkpoints.size(); ++c) {
            for (int r = 0; r < reps; ++r) measured[c] += sq_err[static_cast<std::size_t>(r)][c];
            measured[c] /= static_cast<double>(reps);
            const double bound =
                exp.eps * exp.eps / static_cast<double>(exp.checkpoints[c]) * slack;
            const double ratio = bound > 0.0 ? measured[c] / bound : 0.0;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                worst = c;
            }
            if (measured[c] > bound) all_pass = false;
        }

        fs::create_directories(exp.out_dir);
        if (exp.want_csv)
            write_file(fs::path(exp.out_dir) / "variance_check.csv", [&](std::ostream& out) {
                CsvWriter csv(out);
                csv.header({"k", "measured_sq_error", "bound", "pass"});
                for (std::size_t c = 0; c < exp.checkpoints.size(); ++c) {
                    const double bound =
                        exp.eps * exp.eps / static_cast<double>(exp.checkpoints[c]) * slack;
                    csv.row({CsvWriter::cell(exp.checkpoints[c]), CsvWriter::cell(measured[c]),
                             CsvWriter::cell(bound),
                             measured[c] <= bound ? std::string("1") : std::string("0")});
                }
            });

        if (!all_pass) {
            err << "anchor variance-check: bound violated, worst checkpoint k="
                << exp.checkpoints[worst] << " measured=" << measured[worst]
                << " bound=" << exp.eps * exp.eps / static_cast<double>(exp.checkpoints[worst]) *
                                     slack
                << "\n";
            return kExitBoundViolation;
        }
        return kExitOk;
    } catch (const std::exception& ex) {
        return report_error(err, "variance-check", ex, kExitConfigError);
    }
}

int cmd_sweep(const std::string& config_path, const Overrides& overrides, std::ostream& err) {
    try {
        const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
        Experiment exp = load_experiment(cfg, overrides);
        if (exp.method.empty()) throw ConfigError("sweep needs 'method' in [solver]");
        if (exp.eps_grid.empty()) throw ConfigError("sweep needs 'eps_grid' in [solver]");
        const int reps = exp.replications > 0 ? exp.replications : 5;

        const SolverRunner runner = [&](double eps, Seed seed) {
            return run_method(exp, exp.method, seed, eps).trace;
        };
        const ScalingReport report =
            measure_query_scaling(runner, exp.eps_grid, reps, exp.master, exp.workers);

        fs::create_directories(exp.out_dir);
        if (exp.want_csv)
            write_file(fs::path(exp.out_dir) / "sweep.csv", [&](std::ostream& out) {
                CsvWriter csv(out);
                csv.header({"eps", "replication", "queries", "failed"});
                for (const ScalingCell& cell : report.cells)
                    csv.row({CsvWriter::cell(cell.eps), CsvWriter::cell(
                                 static_cast<std::int64_t>(cell.replication)),
                             CsvWriter::cell(cell.queries),
                             cell.failed ? std::string("1") : std::string("0")});
            });
        if (exp.want_json)
            write_file(fs::path(exp.out_dir) / "sweep_summary.json", [&](std::ostream& out) {
                json j;
                j["fitted_exponent"] = report.fitted_exponent;
                j["r_squared"] = report.r_squared;
                j["eps_grid"] = report.eps_grid;
                j["mean_queries"] = report.mean_queries;
                j["failures"] = report.failures;
                out << j.dump(2) << "\n";
            });
        if (exp.want_svg)
            write_file(fs::path(exp.out_dir) / "sweep.svg", [&](std::ostream& out) {
                PlotSeries s;
                s.label = exp.method;
                for (std::size_t e = 0; e < report.eps_grid.size(); ++e) {
                    s.x.push_back(1.0 / report.eps_grid[e]);
                    s.y.push_back(report.mean_queries[e]);
                }
                PlotOptions options;
                options.title = "oracle queries vs 1/eps";
                options.x_label = "1/eps";
                options.y_label = "stochastic oracle queries";
                options.log_x = true;
                options.log_y = true;
                write_svg_plot(out, {s}, options);
            });

        if (!report.complete()) {
            err << "anchor sweep: " << report.failures.size() << " failed cell(s):\n";
            for (const std::string& f : report.failures) err << "  " << f << "\n";
            return kExitPartialFailure;
        }
        return kExitOk;
    } catch (const std::exception& ex) {
        return report_error(err, "sweep", ex, kExitConfigError);
    }
}

}  // namespace anchor::cli
