// Acceptance suite: prints one pass/fail line per criterion and exits
// non-zero if any criterion fails. Takes the CLI binary path as argv[1]
// for the end-to-end criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "abcmeta/abcmeta.hpp"

#include "support/oracles.hpp"

using namespace abcmeta;
namespace fs = std::filesystem;

namespace {

struct Runner {
    int failures = 0;

    void criterion(int number, const std::string& name,
                   const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n",
                    ok ? "PASS" : "FAIL", number, name.c_str(), secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

SummaryStats los_stats() {
    SummaryStats s{SummaryScenario::s3(), 111,
                   {{Stat::Q1, 1.2}, {Stat::Median, 2.1}, {Stat::Q3, 4.6}}};
    s.validate();
    return s;
}

const std::vector<Family> kFive = {Family::Normal, Family::LogNormal,
                                   Family::Weibull, Family::Beta,
                                   Family::Exponential};

constexpr std::uint64_t kBaseSeed = 20240814;
constexpr int kSeedCount = 5;

std::string fmt(double v) { return detail::fmt_g(v, 4); }

// ---- criterion 1: CLI wan baseline --------------------------------------

bool run_cli_wan(const std::string& cli, std::string& detail) {
    const fs::path tmp = fs::temp_directory_path() / "abcmeta_acceptance";
    fs::create_directories(tmp);
    const std::string cmd =
        cli +
        " estimate --method wan --scenario S3 --n 111 --q1 1.2 --median 2.1 "
        "--q3 4.6 --out " +
        tmp.string();
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        detail = "popen failed";
        return false;
    }
    char buf[256];
    double mean = NAN, sd = NAN;
    while (fgets(buf, sizeof(buf), pipe)) {
        std::sscanf(buf, "mean: %lf", &mean);
        std::sscanf(buf, "sd: %lf", &sd);
    }
    const int rc = pclose(pipe);
    detail = "mean=" + fmt(mean) + " sd=" + fmt(sd);
    return rc == 0 && std::abs(mean - 2.6333) <= 0.0005 &&
           std::abs(sd - 2.554) <= 0.005;
}

// ---- criteria 2-3: real data example 1 ----------------------------------

struct SeedAverage {
    double mean = 0.0;
    double sd = 0.0;
    double ln_prob = 0.0;
};

SeedAverage average_sd_runs(Family family) {
    const SummaryStats stats = los_stats();
    const PriorBank prior = default_priors(stats, {family});
    SeedAverage avg;
    for (int s = 0; s < kSeedCount; ++s) {
        AbcConfig cfg;
        cfg.total_iterations = 100000;
        cfg.seed = kBaseSeed + static_cast<std::uint64_t>(s);
        const auto res = run_abc_sd(family, stats, prior, cfg);
        avg.mean += res.mean_hat;
        avg.sd += res.sd_hat;
    }
    avg.mean /= kSeedCount;
    avg.sd /= kSeedCount;
    return avg;
}

SeedAverage average_bma_runs() {
    const SummaryStats stats = los_stats();
    const PriorBank prior = default_priors(stats, kFive);
    SeedAverage avg;
    for (int s = 0; s < kSeedCount; ++s) {
        AbcConfig cfg;
        cfg.total_iterations = 100000;
        cfg.seed = kBaseSeed + 100 + static_cast<std::uint64_t>(s);
        const auto res =
            run_abc_bma(prior.active_families(), stats, prior, cfg);
        avg.mean += res.mean_hat;
        avg.sd += res.sd_hat;
        avg.ln_prob += res.model_probs.at(Family::LogNormal);
    }
    avg.mean /= kSeedCount;
    avg.sd /= kSeedCount;
    avg.ln_prob /= kSeedCount;
    return avg;
}

// ---- criteria 4-5: table 2 sensitivity ----------------------------------

struct ComboAggregate {
    int beta_votes = 0;
    double re_mean_bma = 0.0;
    double re_sd_bma = 0.0;
    double re_sd_normal = 0.0;
    double re_sd_beta = 0.0;
};

std::vector<ComboAggregate> sensitivity_over_seeds() {
    std::vector<ComboAggregate> agg(4);
    for (int s = 0; s < kSeedCount; ++s) {
        const auto rows =
            sensitivity_table2(kBaseSeed + 200 + static_cast<std::uint64_t>(s));
        for (std::size_t c = 0; c < 4; ++c) {
            if (rows[c].prob_beta > 0.5) ++agg[c].beta_votes;
            agg[c].re_mean_bma += rows[c].re_mean_bma / kSeedCount;
            agg[c].re_sd_bma += rows[c].re_sd_bma / kSeedCount;
            agg[c].re_sd_normal += rows[c].re_sd_sd_normal / kSeedCount;
            agg[c].re_sd_beta += rows[c].re_sd_sd_beta / kSeedCount;
        }
    }
    return agg;
}

// ---- criterion 6: discussion case ---------------------------------------

struct DiscussionAres {
    double are_sd_abc_sd = 0.0;
    double are_sd_abc_bma = 0.0;
};

DiscussionAres discussion_case() {
    ExperimentDesign d{FamilyParams::lognormal(4, 0.3),
                       SummaryScenario::s1()};
    d.sizes = {100};
    d.reps = 50;
    d.master_seed = kBaseSeed + 300;
    AbcConfig sd_cfg;
    sd_cfg.total_iterations = 20000;
    AbcConfig bma_cfg;
    bma_cfg.total_iterations = 50000;
    d.methods = {MethodSpec::abc_sd(Family::LogNormal, sd_cfg),
                 MethodSpec::abc_bma(kFive, bma_cfg)};
    const DesignResult res = run_design(d);
    DiscussionAres out;
    for (const AreRow& row : res.report) {
        if (row.method == "abc-sd:lognormal") out.are_sd_abc_sd = row.are_sd;
        if (row.method == "abc-bma") out.are_sd_abc_bma = row.are_sd;
    }
    return out;
}

// ---- criterion 7: model probability prose claims ------------------------

double true_family_avg_prob(const FamilyParams& truth,
                            const SummaryScenario& scenario,
                            std::uint64_t seed) {
    ExperimentDesign d{truth, scenario};
    d.sizes = {400};
    d.reps = 30;
    d.master_seed = seed;
    AbcConfig bma_cfg;
    bma_cfg.total_iterations = 50000;
    d.methods = {MethodSpec::abc_bma(kFive, bma_cfg)};
    const DesignResult res = run_design(d);
    for (const AreRow& row : res.report)
        if (row.method == "abc-bma")
            return row.avg_model_probs.count(truth.family())
                       ? row.avg_model_probs.at(truth.family())
                       : 0.0;
    return 0.0;
}

// ---- criterion 8: non-stochastic property suite -------------------------

bool property_suite(std::string& detail) {
    // reservoir equals the sort-all oracle at N=2000
    {
        const SummaryStats stats = los_stats();
        const PriorBank prior = default_priors(stats, {Family::Normal});
        AbcConfig cfg;
        cfg.total_iterations = 2000;
        cfg.acceptance_fraction = 0.01;
        cfg.seed = 987;
        const auto res = run_abc_sd(Family::Normal, stats, prior, cfg);
        const auto observed = summary_vector(stats);
        std::vector<std::pair<double, std::uint64_t>> all;
        for (std::uint64_t i = 0; i < 2000; ++i) {
            auto eng = rng::engine_for(cfg.seed, i);
            const FamilyParams p = draw_params(prior, Family::Normal, eng);
            const auto data = sample_n(p, 111, eng);
            const auto summary = compute_summary(data, stats.scenario);
            all.emplace_back(distance(observed, summary_vector(summary)), i);
        }
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < res.accepted.size(); ++i)
            if (res.accepted[i].iteration != all[i].second ||
                res.accepted[i].distance != all[i].first) {
                detail = "reservoir/oracle mismatch";
                return false;
            }
    }
    // distance metric axioms on 1e5 random tuples
    {
        std::mt19937_64 gen(555);
        std::uniform_real_distribution<double> u(-100.0, 100.0);
        for (int i = 0; i < 100000; ++i) {
            std::vector<double> a(3), b(3), c(3);
            for (int j = 0; j < 3; ++j) {
                a[j] = u(gen);
                b[j] = u(gen);
                c[j] = u(gen);
            }
            const double dab = distance(a, b);
            if (!(dab >= 0.0) || dab != distance(b, a) ||
                distance(a, a) != 0.0 ||
                distance(a, c) > dab + distance(b, c) + 1e-9) {
                detail = "distance axiom violated";
                return false;
            }
        }
    }
    // quantile hand-checks
    {
        const auto s = compute_summary({1, 2, 3, 4}, SummaryScenario::s3());
        if (std::abs(s.at(Stat::Q1) - 1.75) > 1e-12 ||
            std::abs(s.at(Stat::Median) - 2.5) > 1e-12 ||
            std::abs(s.at(Stat::Q3) - 3.25) > 1e-12) {
            detail = "quantile hand-check failed";
            return false;
        }
    }
    // relative error identities
    if (relative_error(10, 10) != 0.0 ||
        std::abs(relative_error(11, 10) - 0.1) > 1e-15 ||
        std::abs(relative_error(9, 10) + 0.1) > 1e-15) {
        detail = "relative error identity failed";
        return false;
    }
    // weight floor-and-renormalize hand-check on counts (30,20,0,0,0)
    {
        Reservoir r(50);
        for (std::uint64_t i = 0; i < 30; ++i)
            r.offer({FamilyParams::normal(0, 1), 0, 0, 0.1, i});
        for (std::uint64_t i = 30; i < 50; ++i)
            r.offer({FamilyParams::lognormal(0, 1), 0, 0, 0.1, i});
        const auto pi = adapt_model_weights(r, 0.01, kFive);
        const std::vector<double> expect = {0.97 * 0.6, 0.97 * 0.4, 0.01,
                                            0.01, 0.01};
        for (std::size_t i = 0; i < 5; ++i)
            if (std::abs(pi[i] - expect[i]) > 1e-12) {
                detail = "weight floor hand-check failed";
                return false;
            }
    }
    // determinism across 1/2/8 threads
    {
        const SummaryStats stats = los_stats();
        const PriorBank prior =
            default_priors(stats, {Family::Normal, Family::LogNormal});
        EstimateResult base;
        for (int threads : {1, 2, 8}) {
            AbcConfig cfg;
            cfg.total_iterations = 5000;
            cfg.seed = 246;
            cfg.threads = threads;
            const auto res = run_abc_bma(prior.active_families(), stats,
                                         prior, cfg);
            if (threads == 1) {
                base = res;
            } else if (res.mean_hat != base.mean_hat ||
                       res.sd_hat != base.sd_hat ||
                       res.model_probs != base.model_probs) {
                detail = "thread-count dependence detected";
                return false;
            }
        }
    }
    // analytic moments vs quadrature oracle
    {
        const std::vector<FamilyParams> points = {
            FamilyParams::normal(50, 17), FamilyParams::lognormal(4, 0.3),
            FamilyParams::weibull(2, 35), FamilyParams::beta(9, 4),
            FamilyParams::exponential(10)};
        for (const auto& p : points) {
            const Moments a = analytic_moments(p);
            const Moments q = oracles::moments_by_quadrature(p);
            if (std::abs(a.mean - q.mean) / std::abs(q.mean) > 1e-6 ||
                std::abs(a.sd - q.sd) / std::abs(q.sd) > 1e-6) {
                detail = std::string("moment oracle mismatch for ") +
                         std::string(family_name(p.family()));
                return false;
            }
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    Runner runner;

    runner.criterion(1, "Wan baseline exactness via CLI",
                     [&](std::string& detail) {
                         if (cli.empty()) {
                             detail = "CLI path not supplied";
                             return false;
                         }
                         return run_cli_wan(cli, detail);
                     });

    runner.criterion(2, "real data example 1, ABC-SD (normal, lognormal)",
                     [&](std::string& detail) {
                         const auto normal = average_sd_runs(Family::Normal);
                         const auto ln = average_sd_runs(Family::LogNormal);
                         detail = "normal mean=" + fmt(normal.mean) +
                                  " sd=" + fmt(normal.sd) +
                                  "; lognormal mean=" + fmt(ln.mean) +
                                  " sd=" + fmt(ln.sd);
                         return std::abs(normal.mean - 2.68) <= 0.15 &&
                                std::abs(normal.sd - 2.61) <= 0.30 &&
                                std::abs(ln.mean - 3.92) <= 0.40 &&
                                std::abs(ln.sd - 5.38) <= 0.90;
                     });

    runner.criterion(3, "real data example 1, ABC-BMA five-family bank",
                     [&](std::string& detail) {
                         const auto bma = average_bma_runs();
                         detail = "mean=" + fmt(bma.mean) +
                                  " sd=" + fmt(bma.sd) +
                                  " P(lognormal)=" + fmt(bma.ln_prob);
                         return std::abs(bma.mean - 3.80) <= 0.50 &&
                                std::abs(bma.sd - 5.21) <= 1.00 &&
                                std::abs(bma.ln_prob - 0.52) <= 0.15;
                     });

    const auto combos = sensitivity_over_seeds();

    runner.criterion(
        4, "table 2 sensitivity, directional model probabilities",
        [&](std::string& detail) {
            detail = "beta votes per combo: " +
                     std::to_string(combos[0].beta_votes) + "/" +
                     std::to_string(combos[1].beta_votes) + "/" +
                     std::to_string(combos[2].beta_votes) + "/" +
                     std::to_string(combos[3].beta_votes) + " of " +
                     std::to_string(kSeedCount);
            const int majority = kSeedCount / 2 + 1;
            return combos[0].beta_votes >= majority &&
                   kSeedCount - combos[1].beta_votes >= majority &&
                   combos[2].beta_votes >= majority &&
                   combos[3].beta_votes >= majority;
        });

    runner.criterion(
        5, "table 2 sensitivity, magnitudes and sign pattern",
        [&](std::string& detail) {
            bool ok = true;
            for (std::size_t c = 0; c < 4; ++c) {
                detail += (c ? "; " : "") + std::string("combo") +
                          std::to_string(c + 1) +
                          " REsd(bma)=" + fmt(combos[c].re_sd_bma) +
                          " REsd(norm)=" + fmt(combos[c].re_sd_normal) +
                          " REsd(beta)=" + fmt(combos[c].re_sd_beta);
                ok = ok && std::abs(combos[c].re_sd_bma) <= 0.03 &&
                     std::abs(combos[c].re_mean_bma) <= 0.02 &&
                     combos[c].re_sd_normal > 0.0 &&
                     combos[c].re_sd_beta < 0.0;
            }
            return ok;
        });

    runner.criterion(
        6, "discussion case: BMA reduces lognormal S1 sd bias",
        [&](std::string& detail) {
            const auto ares = discussion_case();
            detail = "ARE_sd(abc-sd)=" + fmt(ares.are_sd_abc_sd) +
                     " ARE_sd(abc-bma)=" + fmt(ares.are_sd_abc_bma);
            return ares.are_sd_abc_sd < 0.0 &&
                   std::abs(ares.are_sd_abc_sd - (-0.186)) <= 0.08 &&
                   std::abs(ares.are_sd_abc_bma - 0.031) <= 0.08 &&
                   std::abs(ares.are_sd_abc_bma) <
                       std::abs(ares.are_sd_abc_sd);
        });

    runner.criterion(
        7, "true family attains average model probability > 0.7 at n=400",
        [&](std::string& detail) {
            const std::vector<FamilyParams> truths = {
                FamilyParams::normal(50, 17), FamilyParams::beta(9, 4),
                FamilyParams::exponential(10)};
            const std::vector<SummaryScenario> scenarios = {
                SummaryScenario::s1(), SummaryScenario::s2(),
                SummaryScenario::s3()};
            bool ok = true;
            std::uint64_t seed = kBaseSeed + 400;
            for (const auto& truth : truths) {
                for (const auto& scenario : scenarios) {
                    const double p =
                        true_family_avg_prob(truth, scenario, seed++);
                    detail += std::string(family_name(truth.family())) + "/" +
                              scenario.name() + "=" + fmt(p) + " ";
                    ok = ok && p > 0.7;
                }
            }
            return ok;
        });

    runner.criterion(8, "non-stochastic property suite", property_suite);

    std::printf("%s: %d criterion(s) failed\n",
                runner.failures ? "FAIL" : "OK", runner.failures);
    return runner.failures ? 1 : 0;
}
