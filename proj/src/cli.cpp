#include "walkforge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "walkforge/backend.hpp"
#include "walkforge/cost_model.hpp"
#include "walkforge/experiment.hpp"
#include "walkforge/manifest.hpp"
#include "walkforge/solver.hpp"
#include "walkforge/theory.hpp"

namespace walkforge::cli {

namespace {

using nlohmann::json;

std::string default_data_file(const char* name) {
    return std::string(WALKFORGE_DATA_DIR) + "/" + name;
}

Rat parse_theta(const std::string& text, const Int& order) {
    if (text == "auto") return WalkParams::auto_for_order(order).theta;
    return parse_rational(text);
}

std::vector<Int> parse_factor_list(const std::string& text) {
    // "[1024, 4]" or a bare positive integer for a cyclic group
    std::vector<Int> factors;
    std::string body = text;
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw std::invalid_argument("unterminated factor list");
        body = body.substr(1, body.size() - 2);
        std::istringstream is(body);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            tok.erase(0, tok.find_first_not_of(" \t"));
            tok.erase(tok.find_last_not_of(" \t") + 1);
            if (!tok.empty()) factors.push_back(parse_integer_expr(tok));
        }
    } else {
        factors.push_back(parse_integer_expr(body));
    }
    if (factors.empty()) throw std::invalid_argument("empty factor list");
    return factors;
}

QuadForm parse_form(const std::string& text) {
    // "(a,b,c)"
    std::string body = text;
    if (body.size() < 2 || body.front() != '(' || body.back() != ')')
        throw std::invalid_argument("form must look like (a,b,c)");
    body = body.substr(1, body.size() - 2);
    std::istringstream is(body);
    std::string a, b, c;
    if (!std::getline(is, a, ',') || !std::getline(is, b, ',') || !std::getline(is, c))
        throw std::invalid_argument("form must have three coefficients");
    return QuadForm{std::stoll(a), std::stoll(b), std::stoll(c)};
}

struct Emitter {
    std::string subcommand;
    std::optional<std::string> out_path;
    std::optional<std::string> extra_path;  // second artifact (optimize summary)
    RunManifest manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void finish(const std::string& artifact, const std::optional<std::string>& extra = std::nullopt) {
        manifest.subcommand = subcommand;
        manifest.code_version = WALKFORGE_VERSION;
        manifest.finished_at = iso8601_utc_now();
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (out_path) {
            write_file_atomic(*out_path, artifact);
            if (extra && extra_path) write_file_atomic(*extra_path, *extra);
            write_file_atomic(*out_path + ".manifest.json", manifest.to_json().dump(2) + "\n");
        } else {
            std::cout << artifact;
            if (extra) std::cout << *extra;
        }
    }
};

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
    if (const char* env = std::getenv("WALKFORGE_SEED")) return std::strtoull(env, nullptr, 10);
    return flag_seed;
}

json stats_to_json(const SolveStats& s, double sqrt_n) {
    json j;
    j["alpha"] = s.alpha;
    j["L"] = static_cast<double>(s.alpha) / sqrt_n;
    j["walks"] = s.walks;
    j["stored_triples"] = s.stored_triples;
    j["collisions"] = s.collisions;
    j["good_collisions"] = s.good_collisions;
    j["abandoned"] = s.abandoned;
    j["verify_failures"] = s.verify_failures;
    return j;
}

int cmd_solve(const std::string& group_text, std::size_t r, const std::string& w_text,
              const std::string& theta_text, std::size_t walkers, std::uint64_t seed,
              std::uint64_t max_walks, const std::string& x0_text, const std::string& x1_text,
              Emitter& em) {
    seed = resolve_seed(seed);
    const Rat w = parse_rational(w_text);
    const PartitionPlan plan = build_partition_plan(r, w);
    json report;
    report["r"] = r;
    report["w"] = rational_to_string(w);
    report["walkers"] = walkers;
    report["seed"] = seed;
    em.manifest.seed = seed;

    Rng setup_rng(derive_seed(seed, ~std::uint64_t{0}));

    bool found = false;
    SolveStats stats;

    if (!group_text.empty() && group_text[0] == '-') {
        // negative decimal: ideal class group of that discriminant
        const std::int64_t disc = std::stoll(group_text);
        ClassGroupCtx ctx(disc);
        const std::uint64_t h = ctx.class_number();
        const auto primes = split_primes(ctx, r);
        std::vector<QuadForm> gens;
        json gens_json = json::array();
        for (const auto& [ell, f] : primes) {
            gens.push_back(f);
            gens_json.push_back({{"ell", ell}, {"form", to_string(f)}});
        }
        if (subgroup_order(gens, disc) != h)
            throw std::runtime_error("supporting set does not generate the class group");
        ClassWalkBackend backend(ctx, gens);

        const QuadForm x0 = x0_text.empty() ? ctx.one() : reduce(parse_form(x0_text));
        const QuadForm x1 = x1_text.empty() ? compose(ctx.random_class(setup_rng), x0)
                                            : reduce(parse_form(x1_text));
        const WalkParams params = theta_text == "auto" ? WalkParams::auto_for_order(Int(h))
                                                       : WalkParams::from_theta(parse_rational(theta_text));
        report["backend"] = "classgroup";
        report["discriminant"] = disc;
        report["class_number"] = h;
        report["generators"] = gens_json;
        report["theta"] = rational_to_string(params.theta);
        report["c_max"] = params.max_hops;
        report["x0"] = to_string(x0);
        report["x1"] = to_string(x1);

        const auto res = solve(backend, x0, x1, walkers, plan, params, seed, max_walks);
        found = res.found;
        stats = res.stats;
        report["found"] = res.found;
        if (res.found) {
            report["solution"] = to_string(res.solution);
            report["verified"] = true;
        }
        report["stats"] = stats_to_json(res.stats, std::sqrt(static_cast<double>(h)));
    } else {
        const GroupSpec spec = make_group(parse_factor_list(group_text));
        if (!fits_u64_backend(spec)) throw std::runtime_error("factors beyond the 63-bit fast path");
        SupportingSet gens;
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 1000) throw std::runtime_error("could not sample a generating set");
            gens.generators.clear();
            for (std::size_t i = 0; i < r; ++i)
                gens.generators.push_back(random_element(spec, setup_rng));
            if (generates(spec, gens)) break;
        }
        AbstractWalkBackend<std::uint64_t> backend(spec, gens);

        const auto parse_elem = [&](const std::string& t) {
            GroupElement g;
            for (const Int& v : parse_factor_list(t)) g.coords.push_back(v);
            if (!is_member(g, spec)) throw std::invalid_argument("element outside the group");
            return g;
        };
        const GroupElement x0g = x0_text.empty() ? random_element(spec, setup_rng) : parse_elem(x0_text);
        const GroupElement x1g = x1_text.empty()
                                     ? op(random_element(spec, setup_rng), x0g, spec)
                                     : parse_elem(x1_text);
        const WalkParams params = theta_text == "auto"
                                      ? WalkParams::auto_for_order(spec.order)
                                      : WalkParams::from_theta(parse_rational(theta_text));
        report["backend"] = "abstract";
        report["group"] = [&] {
            json a = json::array();
            for (const Int& f : spec.factors) a.push_back(f.str());
            return a;
        }();
        report["order"] = spec.order.str();
        json gens_json = json::array();
        for (const auto& g : gens.generators) gens_json.push_back(to_string(g));
        report["generators"] = gens_json;
        report["theta"] = rational_to_string(params.theta);
        report["c_max"] = params.max_hops;
        report["x0"] = to_string(x0g);
        report["x1"] = to_string(x1g);

        const auto res = solve(backend, backend.from_group(x0g), backend.from_group(x1g), walkers,
                               plan, params, seed, max_walks);
        found = res.found;
        stats = res.stats;
        report["found"] = res.found;
        if (res.found) {
            report["solution"] = backend.describe(res.solution);
            report["verified"] = true;
        }
        report["stats"] = stats_to_json(res.stats, std::sqrt(to_double(Rat(spec.order))));
    }

    em.manifest.parameters = {{"group", group_text}, {"r", r},      {"w", w_text},
                              {"theta", theta_text}, {"walkers", walkers},
                              {"seed", seed},        {"max_walks", max_walks}};
    em.finish(report.dump(2) + "\n");
    std::cerr << "solve: " << (found ? "solution found" : "no solution within budget") << ", alpha="
              << stats.alpha << ", wall=" << stats.wall_seconds << "s\n";
    return found ? kExitOk : kExitNotFound;
}

int cmd_predict(const std::string& n_text, std::size_t r, const std::string& w_text,
                const std::string& theta_text, double sigma, const std::string& timings,
                Emitter& em) {
    const Int n = parse_integer_expr(n_text);
    const Rat w = parse_rational(w_text);
    const PartitionPlan plan = build_partition_plan(r, w);
    const Rat theta = parse_theta(theta_text, n);
    theory::TheoryInput in{n, theta, plan.probabilities};
    const theory::Estimates est = theory::estimate_all(in);

    json j;
    j["n"] = n.str();
    j["m"] = in.m();
    j["r"] = r;
    j["w"] = rational_to_string(w);
    j["theta"] = rational_to_string(theta);
    j["d"] = est.d;
    j["E_alpha_pi"] = est.e_alpha_pi;
    j["E_L_pi"] = est.e_L_pi;
    j["Var_alpha_pi"] = est.var_alpha_pi;
    j["Stdev_L_pi"] = est.stdev_L_pi;
    j["classic"] = {{"E_rho", est.classic.e_rho},
                    {"vOW_lambda", est.classic.vow_lambda},
                    {"blackburn_rho", est.classic.blackburn_rho},
                    {"bailey_rho", est.classic.bailey_rho}};
    j["montenegro"] = {{"divergent", est.montenegro.divergent},
                       {"lambda", est.montenegro.lambda},
                       {"P1", est.montenegro.p1},
                       {"P2", est.montenegro.p2}};
    j["sample_size_k1"] = theory::sample_size(est.e_L_pi, est.stdev_L_pi, 0.001);
    j["sample_size_k2"] = theory::sample_size(est.e_L_pi, est.stdev_L_pi, 0.005);

    if (!timings.empty()) {
        const cost::TimingTable table = cost::load_timing_table(timings);
        em.manifest.input_digests[timings] = sha256_file(timings);
        const cost::SupportEnsemble ensemble(r);
        const auto tau = ensemble.position_average_times(table);
        const double secs = theory::predicted_runtime_seconds(in, tau, sigma);
        j["sigma"] = sigma;
        j["predicted_seconds"] = secs;
        j["predicted_years"] = secs / cost::kSecondsPerYear;
    }

    em.manifest.parameters = {{"n", n_text}, {"r", r},          {"w", w_text},
                              {"theta", theta_text}, {"sigma", sigma}, {"timings", timings}};
    em.finish(j.dump(2) + "\n");
    return kExitOk;
}

int cmd_table1(const std::string& n_text, const std::string& theta_text, bool full, Emitter& em) {
    const Int n = parse_integer_expr(n_text);
    const Rat theta = parse_theta(theta_text, n);
    std::vector<std::size_t> rs = full ? std::vector<std::size_t>{3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16}
                                       : std::vector<std::size_t>{3, 4, 5, 6, 10, 16};
    const std::vector<Rat> ws{Rat(1), Rat(1, 2), Rat(1, 4)};
    const auto rows = theory::theory_table(n, theta, rs, ws);
    std::ostringstream os;
    os << "r,w,d,E_L_pi,Stdev_L_pi\n";
    for (const auto& row : rows)
        os << row.r << ',' << rational_to_string(row.w) << ',' << row.d << ',' << row.e_L << ','
           << row.stdev_L << '\n';
    em.manifest.parameters = {{"n", n_text}, {"theta", theta_text}, {"full", full}};
    em.finish(os.str());
    return kExitOk;
}

int cmd_experiment(unsigned m, std::size_t r, const std::string& w_text, std::uint64_t k,
                   std::uint64_t seed, const std::string& backend, unsigned threads,
                   const std::string& theta_text, Emitter& em) {
    exp::ExperimentConfig config;
    config.m = m;
    config.r = r;
    config.w = parse_rational(w_text);
    config.k = k;
    config.seed = resolve_seed(seed);
    config.threads = threads;
    if (theta_text != "auto") config.theta = parse_rational(theta_text);
    if (backend == "abstract")
        config.backend = exp::BackendKind::abstract_group;
    else if (backend == "classgroup")
        config.backend = exp::BackendKind::class_group;
    else
        throw CLI::ValidationError("--backend must be abstract or classgroup");

    const exp::BatchStats stats = exp::run_batch(config);
    em.manifest.seed = config.seed;
    em.manifest.parameters = {{"m", m},       {"r", r},           {"w", w_text},
                              {"k", k},       {"seed", config.seed}, {"backend", backend},
                              {"threads", threads}, {"theta", theta_text}};
    em.finish(exp::export_table({stats}));
    std::cerr << "experiment: mean_L=" << stats.mean_L << " stdev=" << stats.stdev_L
              << " sigma=" << stats.sigma << " failed=" << stats.failed
              << " abandoned_frac=" << stats.abandoned_fraction << "\n";
    return kExitOk;
}

int cmd_optimize(unsigned n_bits, const std::string& r_range, const std::string& w_list,
                 const std::string& timings, const std::string& measurements,
                 const std::string& sigma_mode, Emitter& em) {
    const auto dots = r_range.find("..");
    std::size_t r_lo, r_hi;
    if (dots == std::string::npos) {
        r_lo = r_hi = std::stoul(r_range);
    } else {
        r_lo = std::stoul(r_range.substr(0, dots));
        r_hi = std::stoul(r_range.substr(dots + 2));
    }
    if (r_lo < 4 || r_hi > 16 || r_lo > r_hi) throw CLI::ValidationError("--r range must lie in 4..16");
    std::vector<std::size_t> rs;
    for (std::size_t r = r_lo; r <= r_hi; ++r) rs.push_back(r);

    std::vector<Rat> ws;
    std::istringstream is(w_list);
    std::string tok;
    while (std::getline(is, tok, ',')) ws.push_back(parse_rational(tok));
    if (ws.empty()) throw CLI::ValidationError("--w list is empty");

    const Int n = Int(1) << (n_bits / 2);
    const Rat theta = Rat(1, Int(1) << (n_bits / 8));  // theta = n^{-1/4}
    const cost::TimingTable table = cost::load_timing_table(timings);
    const cost::SigmaMode mode = sigma_mode == "linear" ? cost::SigmaMode::linear_in_m
                                                        : cost::SigmaMode::constant;
    const cost::SigmaProvider sigma(measurements, mode, n_bits / 2);
    const cost::SigmaProvider sigma_alt(
        measurements, mode == cost::SigmaMode::constant ? cost::SigmaMode::linear_in_m
                                                        : cost::SigmaMode::constant,
        n_bits / 2);

    const cost::RuntimeGrid grid = cost::runtime_grid(n, theta, rs, ws, sigma, table);

    std::ostringstream csv;
    csv << "r,w,avg_hop_seconds,E_L_pi,sigma,years\n";
    char buf[160];
    for (const auto& cell : grid.cells) {
        std::snprintf(buf, sizeof buf, "%zu,%s,%.9f,%.6f,%.6f,%.3f\n", cell.r,
                      rational_to_string(cell.w).c_str(), cell.avg_hop_seconds, cell.e_L_pi,
                      cell.sigma, cell.years);
        csv << buf;
    }

    const cost::RuntimeGrid grid_alt = cost::runtime_grid(n, theta, rs, ws, sigma_alt, table);
    json summary;
    summary["n_bits"] = n_bits;
    summary["sigma_mode"] = sigma_mode;
    summary["best"] = {{"r", grid.best.r},
                       {"w", rational_to_string(grid.best.w)},
                       {"years", grid.best.years}};
    summary["base_16_1"] = {{"r", grid.base.r},
                            {"w", rational_to_string(grid.base.w)},
                            {"years", grid.base.years}};
    summary["speedup_vs_16_1"] = grid.speedup;
    summary["alternate_sigma_mode"] = {{"best_years", grid_alt.best.years},
                                       {"base_years", grid_alt.base.years},
                                       {"speedup", grid_alt.speedup}};

    em.manifest.input_digests[timings] = sha256_file(timings);
    em.manifest.input_digests[measurements] = sha256_file(measurements);
    em.manifest.parameters = {{"n_bits", n_bits},   {"r", r_range},
                              {"w", w_list},        {"timings", timings},
                              {"measurements", measurements}, {"sigma_mode", sigma_mode}};
    em.finish(csv.str(), summary.dump(2) + "\n");
    return kExitOk;
}

int cmd_ratio(double ln_q, Emitter& em) {
    const cost::ImprovementRatio r = cost::improvement_ratio(ln_q);
    json j;
    j["ln_q"] = ln_q;
    j["uniform_tail"] = r.uniform_tail;        // 44.046...
    j["geometric_tail"] = r.geometric_tail;    // 3.682...
    j["prefactor"] = r.prefactor;              // 0.607...
    j["asymptote"] = r.asymptote;              // ~373
    j["ratio_at_q"] = r.ratio_at_q;
    em.manifest.parameters = {{"ln_q", ln_q}};
    em.finish(j.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"uneven-partition adding walks and parallel collision search "
                 "over finite abelian groups"};
    app.require_subcommand(1);

    std::string out_path;
    app.add_option("--out", out_path, "artifact file (manifest written alongside)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve one GAIP instance");
    std::string group_text, w_text = "1", theta_text = "auto", x0_text, x1_text;
    std::size_t r = 16, walkers = 1;
    std::uint64_t seed = 1, max_walks = 0;
    solve_cmd->add_option("--group", group_text,
                          "group: [n1,n2,...] invariant factors, or a negative discriminant")
        ->required();
    solve_cmd->add_option("--r", r, "number of partitions / supporting-set size");
    solve_cmd->add_option("--w", w_text, "geometric ratio of partition probabilities");
    solve_cmd->add_option("--theta", theta_text, "distinguished probability (rational or 'auto')");
    solve_cmd->add_option("--walkers", walkers, "logical walkers per side");
    solve_cmd->add_option("--seed", seed, "master seed (WALKFORGE_SEED overrides)");
    solve_cmd->add_option("--max-walks", max_walks, "walk budget, 0 = unbounded");
    solve_cmd->add_option("--x0", x0_text, "instance origin (defaults to a seeded random pick)");
    solve_cmd->add_option("--x1", x1_text, "instance target (defaults to g*x0, g random)");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "closed-form estimates");
    std::string n_text = "2^80", p_timings;
    double p_sigma = 1.0;
    predict_cmd->add_option("--n", n_text, "group order (e.g. 2^80)");
    predict_cmd->add_option("--r", r, "number of partitions");
    predict_cmd->add_option("--w", w_text, "geometric ratio");
    predict_cmd->add_option("--theta", theta_text, "distinguished probability or 'auto'");
    predict_cmd->add_option("--sigma", p_sigma, "practice-to-theory correction");
    predict_cmd->add_option("--timings", p_timings, "per-prime hop timing table (CSV)");

    // table1
    auto* table1_cmd = app.add_subcommand("table1", "theory grid (d, E(L_pi), Stdev)");
    bool full = false;
    table1_cmd->add_option("--n", n_text, "group order");
    table1_cmd->add_option("--theta", theta_text, "distinguished probability or 'auto'");
    table1_cmd->add_flag("--full", full, "all r in 3..16 instead of the printed rows");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "measure L over a batch of random instances");
    unsigned m = 28, threads = 0;
    std::uint64_t k = 100;
    std::string backend = "abstract";
    exp_cmd->add_option("--m", m, "bit-size class of the group order");
    exp_cmd->add_option("--r", r, "supporting-set size");
    exp_cmd->add_option("--w", w_text, "geometric ratio");
    exp_cmd->add_option("--k", k, "number of runs");
    exp_cmd->add_option("--seed", seed, "master seed (WALKFORGE_SEED overrides)");
    exp_cmd->add_option("--backend", backend, "abstract | classgroup");
    exp_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    exp_cmd->add_option("--theta", theta_text, "distinguished probability or 'auto'");

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "partition-parameter cost grid");
    unsigned n_bits = 160;
    std::string r_range = "4..16", w_list = "1,3/4,1/2,1/3,1/4";
    std::string timings = default_data_file("isogeny_hop_times_160bit.csv");
    std::string measurements = default_data_file("experiment1_mean_L.csv");
    std::string sigma_mode = "constant";
    opt_cmd->add_option("--n-bits", n_bits, "field size in bits (group order ~ 2^{bits/2})");
    opt_cmd->add_option("--r", r_range, "partition counts, e.g. 4..16");
    opt_cmd->add_option("--w", w_list, "comma-separated ratios");
    opt_cmd->add_option("--timings", timings, "hop timing table (CSV)");
    opt_cmd->add_option("--measurements", measurements, "measured mean-L table (CSV)");
    opt_cmd->add_option("--sigma-mode", sigma_mode, "constant | linear");

    // ratio
    auto* ratio_cmd = app.add_subcommand("ratio", "asymptotic improvement ratio");
    double ln_q = 160.0 * 0.6931471805599453;
    ratio_cmd->add_option("--ln-q", ln_q, "natural log of the field size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    Emitter em;
    if (!out_path.empty()) {
        em.out_path = out_path;
        em.extra_path = out_path + ".summary.json";
    }
    em.manifest.started_at = iso8601_utc_now();

    try {
        if (solve_cmd->parsed()) {
            em.subcommand = "solve";
            return cmd_solve(group_text, r, w_text, theta_text, walkers, seed, max_walks, x0_text,
                             x1_text, em);
        }
        if (predict_cmd->parsed()) {
            em.subcommand = "predict";
            return cmd_predict(n_text, r, w_text, theta_text, p_sigma, p_timings, em);
        }
        if (table1_cmd->parsed()) {
            em.subcommand = "table1";
            if (!table1_cmd->count("--n")) n_text = "2^80";
            if (!table1_cmd->count("--theta")) theta_text = "2^-20";
            return cmd_table1(n_text, theta_text, full, em);
        }
        if (exp_cmd->parsed()) {
            em.subcommand = "experiment";
            if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
            return cmd_experiment(m, r, w_text, k, seed, backend, threads, theta_text, em);
        }
        if (opt_cmd->parsed()) {
            em.subcommand = "optimize";
            return cmd_optimize(n_bits, r_range, w_list, timings, measurements, sigma_mode, em);
        }
        if (ratio_cmd->parsed()) {
            em.subcommand = "ratio";
            return cmd_ratio(ln_q, em);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}

}  // namespace walkforge::cli
