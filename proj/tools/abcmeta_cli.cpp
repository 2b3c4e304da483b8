// Command-line front end: single-study estimation (`estimate`), Monte Carlo
// studies (`simulate`), prior-sensitivity reports (`sensitivity`), and
// `replay` of a previously written run manifest.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abcmeta/abcmeta.hpp"

namespace fs = std::filesystem;
using namespace abcmeta;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240814;

std::string fmt6(double v) { return detail::fmt_g(v, 6); }

std::uint64_t parse_seed(const std::string& s) {
    if (s == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    return std::stoull(s);
}

std::vector<Family> parse_family_list(const std::string& csv) {
    std::vector<Family> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_family(tok));
    return out;
}

fs::path out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("ABCMETA_OUT_DIR")) return env;
    return ".";
}

void write_text(const fs::path& p, const std::string& content) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << content;
}

struct EstimateOptions {
    std::string method = "abc-bma";
    std::string scenario;
    std::int64_t n = 0;
    std::map<Stat, std::optional<double>> stat_flags;
    std::string stats_record;
    std::int64_t iterations = 100000;
    double acceptance = 0.001;
    std::string estimator = "simulation";
    std::string priors_file;
    std::string families_csv = "normal,lognormal,weibull,beta,exponential";
    std::vector<double> bounds;  // lo hi
    std::string accepted_csv;
    std::string seed_str = std::to_string(kDefaultSeed);
    int threads = 1;
    std::string out;
};

SummaryStats build_stats(const EstimateOptions& o) {
    if (!o.stats_record.empty()) return parse_stats_record(o.stats_record);
    std::map<Stat, double> values;
    for (const auto& [s, v] : o.stat_flags)
        if (v) values[s] = *v;
    SummaryScenario scenario = [&] {
        if (!o.scenario.empty() && o.scenario != "custom")
            return SummaryScenario::parse(o.scenario);
        std::vector<Stat> fields;
        for (const auto& [s, v] : values) fields.push_back(s);
        return SummaryScenario::custom(fields);
    }();
    SummaryStats stats{scenario, o.n, std::move(values)};
    stats.validate();
    return stats;
}

void write_accepted_csv(const fs::path& path,
                        const std::vector<AcceptedDraw>& accepted) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "family,param1,param2,pseudo_mean,pseudo_sd,distance,iteration\n";
    for (const auto& d : accepted) {
        os << family_name(d.family()) << ','
           << detail::fmt_g(d.params.param(0)) << ','
           << (param_count(d.family()) > 1
                   ? detail::fmt_g(d.params.param(1))
                   : std::string(""))
           << ',' << detail::fmt_g(d.pseudo_mean) << ','
           << detail::fmt_g(d.pseudo_sd) << ',' << detail::fmt_g(d.distance)
           << ',' << d.iteration << "\n";
    }
}

int cmd_estimate(const EstimateOptions& o,
                 const std::vector<std::string>& argv_tail) {
    SummaryStats stats = build_stats(o);
    const std::uint64_t seed = parse_seed(o.seed_str);
    const fs::path dir = out_dir(o.out);
    fs::create_directories(dir);

    RunManifest manifest;
    manifest.command = "estimate";
    manifest.resolved_args = argv_tail;
    manifest.seed = seed;
    manifest.wall_clock = current_wall_clock();
    manifest.inputs["stats"] = format_stats_record(stats);
    manifest.inputs["method"] = o.method;

    std::cout << "method: " << o.method << "\n";
    if (o.method == "wan") {
        const Moments m = wan_s3(stats);
        std::cout << "mean: " << fmt6(m.mean) << "\n";
        std::cout << "sd: " << fmt6(m.sd) << "\n";
        manifest.write((dir / "manifest_estimate.json").string());
        return 0;
    }

    // optional affine rescale for bounded outcome scales
    SummaryStats run_stats = stats;
    if (!o.bounds.empty())
        run_stats = rescale_stats_to_unit(stats, o.bounds[0], o.bounds[1]);

    AbcConfig cfg;
    cfg.total_iterations = o.iterations;
    cfg.acceptance_fraction = o.acceptance;
    cfg.seed = seed;
    cfg.threads = o.threads;
    cfg.estimator = o.estimator == "plug-in" ? EstimatorMode::PlugIn
                                             : EstimatorMode::Simulation;

    EstimateResult res;
    if (o.method.rfind("abc-sd:", 0) == 0) {
        const Family fam = parse_family(o.method.substr(7));
        PriorBank prior;
        if (!o.priors_file.empty()) {
            std::ifstream is(o.priors_file);
            if (!is)
                throw std::runtime_error("cannot read priors file: " +
                                         o.priors_file);
            prior = read_prior_bank(is);
        } else {
            prior = default_priors(run_stats, {fam});
        }
        if (!prior.has(fam))
            throw std::invalid_argument(
                std::string(family_name(fam)) +
                " is not usable for these statistics (support check)");
        res = run_abc_sd(fam, run_stats, prior, cfg);
    } else if (o.method == "abc-bma") {
        const std::vector<Family> bank = parse_family_list(o.families_csv);
        PriorBank prior;
        if (!o.priors_file.empty()) {
            std::ifstream is(o.priors_file);
            if (!is)
                throw std::runtime_error("cannot read priors file: " +
                                         o.priors_file);
            prior = read_prior_bank(is);
        } else {
            prior = default_priors(run_stats, bank);
        }
        for (const std::string& w : prior.warnings())
            std::cerr << "warning: " << w << "\n";
        res = run_abc_bma(prior.active_families(), run_stats, prior, cfg);
    } else {
        throw std::invalid_argument(
            "unknown method '" + o.method +
            "' (valid: wan, abc-bma, abc-sd:<family>)");
    }

    Moments est{res.mean_hat, res.sd_hat};
    if (!o.bounds.empty())
        est = rescale_moments_from_unit(est, o.bounds[0], o.bounds[1]);

    std::cout << "mean: " << fmt6(est.mean) << "\n";
    std::cout << "sd: " << fmt6(est.sd) << "\n";
    for (const auto& [f, p] : res.model_probs)
        std::cout << "model probability " << family_name(f) << ": " << fmt6(p)
                  << "\n";
    std::cout << "effective tolerance: " << fmt6(res.effective_tolerance)
              << "\n";
    std::cout << "accepted draws: " << res.accepted.size() << "\n";
    std::cout << "discarded iterations: " << res.discarded << "\n";
    std::cout << "seed: " << seed << "\n";

    if (!o.accepted_csv.empty())
        write_accepted_csv(dir / o.accepted_csv, res.accepted);

    {
        std::ostringstream prior_text;
        if (o.method == "abc-bma" || o.method.rfind("abc-sd:", 0) == 0) {
            PriorBank echo =
                o.priors_file.empty()
                    ? default_priors(run_stats,
                                     o.method == "abc-bma"
                                         ? parse_family_list(o.families_csv)
                                         : std::vector<Family>{parse_family(
                                               o.method.substr(7))})
                    : [&] {
                          std::ifstream is(o.priors_file);
                          return read_prior_bank(is);
                      }();
            write_prior_bank(prior_text, echo);
        }
        manifest.inputs["priors"] = prior_text.str();
        manifest.inputs["iterations"] = o.iterations;
        manifest.inputs["acceptance"] = o.acceptance;
        manifest.inputs["estimator"] = o.estimator;
    }
    manifest.write((dir / "manifest_estimate.json").string());
    return 0;
}

struct SimulateOptions {
    std::string family = "normal";
    std::optional<double> mu, sigma, shape, scale, alpha, beta, mean;
    std::string scenario = "S1";
    int reps = 50;
    bool full_scale = false;
    std::string sizes_csv;
    std::string methods_csv;
    std::int64_t iterations_sd = 20000;
    std::int64_t iterations_bma = 50000;
    std::string seed_str = std::to_string(kDefaultSeed);
    int threads = 1;
    std::string design;
    std::string out;
};

FamilyParams build_truth(const SimulateOptions& o) {
    const Family f = parse_family(o.family);
    auto need = [&](const std::optional<double>& v,
                    const char* flag) -> double {
        if (!v)
            throw std::invalid_argument(std::string("missing --") + flag +
                                        " for family " + o.family);
        return *v;
    };
    switch (f) {
        case Family::Normal:
            return FamilyParams::normal(need(o.mu, "mu"), need(o.sigma, "sigma"));
        case Family::LogNormal:
            return FamilyParams::lognormal(need(o.mu, "mu"),
                                           need(o.sigma, "sigma"));
        case Family::Weibull:
            return FamilyParams::weibull(need(o.shape, "shape"),
                                         need(o.scale, "scale"));
        case Family::Beta:
            return FamilyParams::beta(need(o.alpha, "alpha"),
                                      need(o.beta, "beta"));
        case Family::Exponential:
            return FamilyParams::exponential(need(o.mean, "mean"));
    }
    throw std::logic_error("unreachable");
}

void print_sensitivity(const std::vector<SensitivityRow>& rows) {
    std::printf("%-10s %-10s | %-8s %-8s | %-9s %-9s %-9s | %-9s %-9s %-9s\n",
                "beta", "normal-sig", "P(beta)", "P(norm)", "REm(beta)",
                "REm(norm)", "REm(bma)", "REsd(beta)", "REsd(norm)",
                "REsd(bma)");
    for (const auto& r : rows)
        std::printf(
            "U(0,%-5g) U(0,%-5g) | %-8s %-8s | %-9s %-9s %-9s | %-9s %-9s "
            "%-9s\n",
            r.combo.beta_shape_hi, r.combo.normal_sigma_hi,
            fmt6(r.prob_beta).c_str(), fmt6(r.prob_normal).c_str(),
            fmt6(r.re_mean_sd_beta).c_str(), fmt6(r.re_mean_sd_normal).c_str(),
            fmt6(r.re_mean_bma).c_str(), fmt6(r.re_sd_sd_beta).c_str(),
            fmt6(r.re_sd_sd_normal).c_str(), fmt6(r.re_sd_bma).c_str());
}

void write_sensitivity_csv(const fs::path& path,
                           const std::vector<SensitivityRow>& rows) {
    std::ofstream os(path);
    os << "beta_shape_hi,normal_sigma_hi,prob_beta,prob_normal,"
          "re_mean_sd_beta,re_mean_sd_normal,re_mean_bma,"
          "re_sd_sd_beta,re_sd_sd_normal,re_sd_bma\n";
    for (const auto& r : rows)
        os << detail::fmt_g(r.combo.beta_shape_hi) << ','
           << detail::fmt_g(r.combo.normal_sigma_hi) << ','
           << detail::fmt_g(r.prob_beta) << ','
           << detail::fmt_g(r.prob_normal) << ','
           << detail::fmt_g(r.re_mean_sd_beta) << ','
           << detail::fmt_g(r.re_mean_sd_normal) << ','
           << detail::fmt_g(r.re_mean_bma) << ','
           << detail::fmt_g(r.re_sd_sd_beta) << ','
           << detail::fmt_g(r.re_sd_sd_normal) << ','
           << detail::fmt_g(r.re_sd_bma) << "\n";
}

int cmd_simulate(const SimulateOptions& o,
                 const std::vector<std::string>& argv_tail) {
    const std::uint64_t seed = parse_seed(o.seed_str);
    const fs::path dir = out_dir(o.out);
    fs::create_directories(dir);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.resolved_args = argv_tail;
    manifest.seed = seed;
    manifest.wall_clock = current_wall_clock();

    if (o.design == "table2") {
        AbcConfig sd_cfg, bma_cfg;
        sd_cfg.total_iterations = o.iterations_sd;
        bma_cfg.total_iterations = o.iterations_bma;
        sd_cfg.threads = bma_cfg.threads = o.threads;
        auto rows = sensitivity_table2(seed, sd_cfg, bma_cfg);
        print_sensitivity(rows);
        write_sensitivity_csv(dir / "sensitivity.csv", rows);
        manifest.write((dir / "manifest_simulate.json").string());
        return 0;
    }
    if (!o.design.empty())
        throw std::invalid_argument("unknown design '" + o.design +
                                    "' (valid: table2)");

    ExperimentDesign design{build_truth(o), SummaryScenario::parse(o.scenario)};
    design.master_seed = seed;
    design.reps = o.full_scale ? 200 : o.reps;
    if (!o.sizes_csv.empty()) {
        design.sizes.clear();
        std::stringstream ss(o.sizes_csv);
        std::string tok;
        while (std::getline(ss, tok, ','))
            design.sizes.push_back(std::stoll(tok));
    }

    AbcConfig sd_cfg, bma_cfg;
    sd_cfg.total_iterations = o.iterations_sd;
    bma_cfg.total_iterations = o.iterations_bma;
    sd_cfg.threads = bma_cfg.threads = o.threads;

    const std::string methods_csv =
        o.methods_csv.empty() ? "abc-sd:" + o.family + ",abc-bma"
                              : o.methods_csv;
    std::stringstream ms(methods_csv);
    std::string mtok;
    while (std::getline(ms, mtok, ',')) {
        if (mtok.rfind("abc-sd:", 0) == 0)
            design.methods.push_back(
                MethodSpec::abc_sd(parse_family(mtok.substr(7)), sd_cfg));
        else if (mtok == "abc-bma")
            design.methods.push_back(MethodSpec::abc_bma(
                {Family::Normal, Family::LogNormal, Family::Weibull,
                 Family::Beta, Family::Exponential},
                bma_cfg));
        else
            throw std::invalid_argument(
                "unknown method '" + mtok +
                "' (valid: abc-sd:<family>, abc-bma)");
    }

    const DesignResult result = run_design(design);

    {
        std::ofstream os(dir / "trials.csv");
        write_trials_csv(os, result.trials);
    }
    {
        std::ofstream os(dir / "are.csv");
        write_are_csv(os, result.report);
    }
    {
        std::ofstream os(dir / "model_probs.csv");
        write_model_probs_csv(os, result.report);
    }
    write_text(dir / "are_mean.svg", are_chart(result.report, false));
    write_text(dir / "are_sd.svg", are_chart(result.report, true));
    for (const MethodSpec& m : design.methods)
        if (m.kind == MethodSpec::Kind::AbcBma)
            write_text(dir / "model_probs.svg",
                       model_prob_chart(result.report, m.label()));

    std::printf("%-22s %6s %6s %12s %12s\n", "method", "n", "reps",
                "ARE(mean)", "ARE(sd)");
    for (const AreRow& r : result.report)
        std::printf("%-22s %6lld %6d %12s %12s\n", r.method.c_str(),
                    static_cast<long long>(r.n), r.reps_used,
                    fmt6(r.are_mean).c_str(), fmt6(r.are_sd).c_str());
    if (result.failed_trials > 0)
        std::printf("failed method runs excluded from averages: %d\n",
                    result.failed_trials);
    std::printf("outputs written to %s\n", dir.string().c_str());

    manifest.inputs["reps"] = design.reps;
    manifest.inputs["scenario"] = o.scenario;
    manifest.write((dir / "manifest_simulate.json").string());
    return 0;
}

struct SensitivityOptions {
    std::string seed_str = std::to_string(kDefaultSeed);
    std::optional<double> beta_hi;
    std::optional<double> normal_sigma_hi;
    std::int64_t iterations_sd = 20000;
    std::int64_t iterations_bma = 50000;
    int threads = 1;
    std::string out;
};

int cmd_sensitivity(const SensitivityOptions& o,
                    const std::vector<std::string>& argv_tail) {
    if (o.beta_hi.has_value() != o.normal_sigma_hi.has_value())
        throw std::invalid_argument(
            "custom combo needs both --beta-hi and --normal-sigma-hi");
    const std::uint64_t seed = parse_seed(o.seed_str);
    const fs::path dir = out_dir(o.out);
    fs::create_directories(dir);

    AbcConfig sd_cfg, bma_cfg;
    sd_cfg.total_iterations = o.iterations_sd;
    bma_cfg.total_iterations = o.iterations_bma;
    sd_cfg.threads = bma_cfg.threads = o.threads;

    std::vector<PriorCombo> combos = default_prior_combos();
    if (o.beta_hi) combos = {{*o.beta_hi, *o.normal_sigma_hi}};

    auto rows = run_sensitivity(combos, seed, sd_cfg, bma_cfg);
    print_sensitivity(rows);
    write_sensitivity_csv(dir / "sensitivity.csv", rows);

    RunManifest manifest;
    manifest.command = "sensitivity";
    manifest.resolved_args = argv_tail;
    manifest.seed = seed;
    manifest.wall_clock = current_wall_clock();
    manifest.write((dir / "manifest_sensitivity.json").string());
    return 0;
}

int run_cli(std::vector<std::string> args);

int cmd_replay(const std::string& manifest_path) {
    const RunManifest manifest = RunManifest::read(manifest_path);
    return run_cli(manifest.resolved_args);
}

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Estimate a study's mean and SD from reported summary "
                 "statistics via rejection ABC"};
    app.require_subcommand(1);

    EstimateOptions eo;
    auto* est = app.add_subcommand(
        "estimate", "Estimate mean/SD for one study's summary statistics");
    est->add_option("--method", eo.method,
                    "wan | abc-bma | abc-sd:<family>");
    est->add_option("--scenario", eo.scenario, "S1 | S2 | S3 | custom");
    est->add_option("--n", eo.n, "reported sample size");
    for (Stat s : kStatOrder)
        est->add_option("--" + std::string(stat_name(s)), eo.stat_flags[s],
                        "reported " + std::string(stat_name(s)));
    est->add_option("--stats-record", eo.stats_record,
                    "one-record text form, e.g. 'scenario=S3 n=111 q1=1.2 "
                    "median=2.1 q3=4.6'");
    est->add_option("--iterations", eo.iterations, "total ABC iterations");
    est->add_option("--acceptance", eo.acceptance, "acceptance fraction");
    est->add_option("--estimator", eo.estimator, "plug-in | simulation");
    est->add_option("--priors", eo.priors_file, "prior bank config file");
    est->add_option("--families", eo.families_csv,
                    "comma-separated candidate families for abc-bma");
    est->add_option("--bounds", eo.bounds,
                    "known outcome bounds lo hi; statistics are rescaled "
                    "onto [0,1] for the run")
        ->expected(2);
    est->add_option("--accepted-csv", eo.accepted_csv,
                    "write accepted draws to this CSV in the output dir");
    est->add_option("--seed", eo.seed_str, "RNG seed (or 'random')");
    est->add_option("--threads", eo.threads, "engine threads");
    est->add_option("--out", eo.out, "output directory");

    SimulateOptions so;
    auto* sim = app.add_subcommand(
        "simulate", "Monte Carlo error study over a sample-size grid");
    sim->add_option("--family", so.family, "generating family");
    sim->add_option("--mu", so.mu, "normal/lognormal location");
    sim->add_option("--sigma", so.sigma, "normal/lognormal scale");
    sim->add_option("--shape", so.shape, "weibull shape");
    sim->add_option("--scale", so.scale, "weibull scale");
    sim->add_option("--alpha", so.alpha, "beta shape alpha");
    sim->add_option("--beta", so.beta, "beta shape beta");
    sim->add_option("--mean", so.mean, "exponential mean");
    sim->add_option("--scenario", so.scenario, "S1 | S2 | S3");
    sim->add_option("--reps", so.reps, "repetitions per sample size");
    sim->add_flag("--full-scale", so.full_scale,
                  "use 200 repetitions (overrides --reps)");
    sim->add_option("--sizes", so.sizes_csv,
                    "comma-separated sample sizes (default paper grid)");
    sim->add_option("--methods", so.methods_csv,
                    "comma-separated methods (default abc-sd:<family>,"
                    "abc-bma)");
    sim->add_option("--iterations-sd", so.iterations_sd, "");
    sim->add_option("--iterations-bma", so.iterations_bma, "");
    sim->add_option("--design", so.design, "named design (table2)");
    sim->add_option("--seed", so.seed_str, "RNG seed (or 'random')");
    sim->add_option("--threads", so.threads, "engine threads");
    sim->add_option("--out", so.out, "output directory");

    SensitivityOptions no;
    auto* sens = app.add_subcommand(
        "sensitivity", "Prior-sensitivity report (beta vs normal)");
    sens->add_option("--seed", no.seed_str, "RNG seed (or 'random')");
    sens->add_option("--beta-hi", no.beta_hi,
                     "custom combo: beta shapes ~ U(0, beta-hi)");
    sens->add_option("--normal-sigma-hi", no.normal_sigma_hi,
                     "custom combo: normal sigma ~ U(0, normal-sigma-hi)");
    sens->add_option("--iterations-sd", no.iterations_sd, "");
    sens->add_option("--iterations-bma", no.iterations_bma, "");
    sens->add_option("--threads", no.threads, "engine threads");
    sens->add_option("--out", no.out, "output directory");

    std::string replay_path;
    auto* rep = app.add_subcommand("replay", "Re-run a recorded manifest");
    rep->add_option("manifest", replay_path, "manifest JSON file")
        ->required();

    // CLI11 parses tokens back to front
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (est->parsed()) return cmd_estimate(eo, args);
    if (sim->parsed()) return cmd_simulate(so, args);
    if (sens->parsed()) return cmd_sensitivity(no, args);
    if (rep->parsed()) return cmd_replay(replay_path);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run_cli(std::move(args));
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
