#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "abcmeta/engine.hpp"
#include "abcmeta/families.hpp"
#include "abcmeta/priors.hpp"
#include "abcmeta/rng.hpp"
#include "abcmeta/summaries.hpp"

namespace abcmeta {

/// Signed relative error (estimated - truth) / truth.
inline double relative_error(double estimated, double truth) {
    if (truth == 0.0)
        throw std::invalid_argument("relative_error: truth is zero");
    return (estimated - truth) / truth;
}

struct MethodSpec {
    enum class Kind { AbcSd, AbcBma };

    Kind kind = Kind::AbcSd;
    Family declared = Family::Normal;  // AbcSd only
    std::vector<Family> bank =         // AbcBma only
        {Family::Normal, Family::LogNormal, Family::Weibull, Family::Beta,
         Family::Exponential};
    AbcConfig config;

    static MethodSpec abc_sd(Family declared, AbcConfig cfg = {}) {
        MethodSpec m;
        m.kind = Kind::AbcSd;
        m.declared = declared;
        m.config = cfg;
        return m;
    }

    static MethodSpec abc_bma(std::vector<Family> bank, AbcConfig cfg = {}) {
        MethodSpec m;
        m.kind = Kind::AbcBma;
        m.bank = std::move(bank);
        m.config = cfg;
        m.config.total_iterations =
            cfg.total_iterations == 20000 ? 50000 : cfg.total_iterations;
        return m;
    }

    std::string label() const {
        if (kind == Kind::AbcSd)
            return std::string("abc-sd:") + std::string(family_name(declared));
        return "abc-bma";
    }
};

struct ExperimentDesign {
    FamilyParams truth;
    SummaryScenario scenario;
    std::vector<std::int64_t> sizes = {10,  40,  80,  100, 150,
                                       200, 300, 400, 500, 600};
    int reps = 200;
    std::vector<MethodSpec> methods;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (reps < 1) throw std::invalid_argument("reps must be >= 1");
        if (sizes.empty()) throw std::invalid_argument("no sample sizes");
        std::int64_t prev = 1;
        for (std::int64_t n : sizes) {
            if (n < 2) throw std::invalid_argument("sample sizes must be >= 2");
            if (n <= prev && prev != 1)
                throw std::invalid_argument(
                    "sample sizes must be strictly increasing");
            prev = n;
        }
        if (methods.empty()) throw std::invalid_argument("no methods");
    }
};

struct MethodOutcome {
    std::string method;
    double mean_hat = 0.0;
    double sd_hat = 0.0;
    std::map<Family, double> model_probs;
    double re_mean = 0.0;
    double re_sd = 0.0;
    bool failed = false;
    std::string error;
};

/// One repetition at one sample size: the generated sample's own mean/SD are
/// the truths the relative errors are measured against.
struct TrialRecord {
    int rep = 0;
    std::int64_t n = 0;
    double true_mean = 0.0;
    double true_sd = 0.0;
    std::vector<MethodOutcome> outcomes;
};

struct AreRow {
    std::string method;
    std::int64_t n = 0;
    int reps_used = 0;
    double are_mean = 0.0;
    double are_sd = 0.0;
    std::map<Family, double> avg_model_probs;
};

struct DesignResult {
    std::vector<TrialRecord> trials;
    std::vector<AreRow> report;
    int failed_trials = 0;
};

namespace detail {

// Stream ids for seed derivation; arbitrary fixed tags.
inline constexpr std::uint64_t kDataStream = 0xD47Aull;
inline constexpr std::uint64_t kMethodStream = 0xABCull;

}  // namespace detail

/// The sample a trial estimates against, regenerable from its derived seed.
inline std::vector<double> trial_sample(const ExperimentDesign& design,
                                        int rep, std::int64_t n) {
    auto eng = rng::engine_for(
        rng::mix(design.master_seed, detail::kDataStream,
                 static_cast<std::uint64_t>(rep)),
        static_cast<std::uint64_t>(n));
    return sample_n(design.truth, static_cast<std::size_t>(n), eng);
}

inline TrialRecord run_trial(const ExperimentDesign& design, int rep,
                             std::int64_t n) {
    design.validate();
    const std::vector<double> sample = trial_sample(design, rep, n);
    TrialRecord trial;
    trial.rep = rep;
    trial.n = n;
    trial.true_mean = detail::mean_of(sample);
    trial.true_sd = detail::sd_of(sample, trial.true_mean);

    const SummaryStats stats = compute_summary(sample, design.scenario);

    for (std::size_t j = 0; j < design.methods.size(); ++j) {
        const MethodSpec& m = design.methods[j];
        MethodOutcome out;
        out.method = m.label();
        try {
            if (trial.true_mean == 0.0 || trial.true_sd == 0.0)
                throw std::runtime_error(
                    "trial truth is zero; relative error undefined");
            AbcConfig cfg = m.config;
            cfg.seed = rng::mix(design.master_seed, detail::kMethodStream,
                                static_cast<std::uint64_t>(rep),
                                rng::mix(static_cast<std::uint64_t>(n),
                                         static_cast<std::uint64_t>(j)));
            EstimateResult res;
            if (m.kind == MethodSpec::Kind::AbcSd) {
                PriorBank prior = default_priors(stats, {m.declared});
                if (!prior.has(m.declared))
                    throw std::runtime_error(
                        std::string(family_name(m.declared)) +
                        " dropped by support checks");
                res = run_abc_sd(m.declared, stats, prior, cfg);
            } else {
                PriorBank prior = default_priors(stats, m.bank);
                res = run_abc_bma(prior.active_families(), stats, prior, cfg);
            }
            out.mean_hat = res.mean_hat;
            out.sd_hat = res.sd_hat;
            out.model_probs = res.model_probs;
            out.re_mean = relative_error(res.mean_hat, trial.true_mean);
            out.re_sd = relative_error(res.sd_hat, trial.true_sd);
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
        }
        trial.outcomes.push_back(std::move(out));
    }
    return trial;
}

/// Full grid: reps x sizes trials, AREs and average model probabilities
/// aggregated per (method, n). Failed method runs are excluded from the
/// averages and counted.
inline DesignResult run_design(const ExperimentDesign& design) {
    design.validate();
    DesignResult result;
    for (std::int64_t n : design.sizes)
        for (int rep = 0; rep < design.reps; ++rep)
            result.trials.push_back(run_trial(design, rep, n));

    for (const MethodSpec& m : design.methods) {
        const std::string label = m.label();
        for (std::int64_t n : design.sizes) {
            AreRow row;
            row.method = label;
            row.n = n;
            for (const TrialRecord& t : result.trials) {
                if (t.n != n) continue;
                for (const MethodOutcome& out : t.outcomes) {
                    if (out.method != label) continue;
                    if (out.failed) {
                        ++result.failed_trials;
                        continue;
                    }
                    ++row.reps_used;
                    row.are_mean += out.re_mean;
                    row.are_sd += out.re_sd;
                    for (auto& [f, p] : out.model_probs)
                        row.avg_model_probs[f] += p;
                }
            }
            if (row.reps_used > 0) {
                row.are_mean /= row.reps_used;
                row.are_sd /= row.reps_used;
                for (auto& [f, p] : row.avg_model_probs) p /= row.reps_used;
            }
            result.report.push_back(std::move(row));
        }
    }
    return result;
}

struct PriorCombo {
    double beta_shape_hi;    // beta shapes ~ U(0+, beta_shape_hi), both
    double normal_sigma_hi;  // normal sigma ~ U(0+, normal_sigma_hi)
};

struct SensitivityRow {
    PriorCombo combo;
    double prob_beta = 0.0;
    double prob_normal = 0.0;
    double re_mean_sd_beta = 0.0;
    double re_mean_sd_normal = 0.0;
    double re_mean_bma = 0.0;
    double re_sd_sd_beta = 0.0;
    double re_sd_sd_normal = 0.0;
    double re_sd_bma = 0.0;
};

inline const SummaryStats& sensitivity_stats() {
    static const SummaryStats stats = [] {
        SummaryStats s{SummaryScenario::s3(), 400,
                       {{Stat::Q1, 0.5993},
                        {Stat::Median, 0.6853},
                        {Stat::Q3, 0.7735}}};
        s.validate();
        return s;
    }();
    return stats;
}

inline constexpr double kSensitivityTrueMean = 0.6814;
inline constexpr double kSensitivityTrueSd = 0.1247;

inline const std::vector<PriorCombo>& default_prior_combos() {
    static const std::vector<PriorCombo> combos = {
        {40.0, 1.0}, {40.0, 0.5}, {20.0, 1.0}, {20.0, 0.5}};
    return combos;
}

/// Beta-vs-normal model selection under the four prior combinations, on the
/// fixed quartile summary with known sample truths.
inline std::vector<SensitivityRow> run_sensitivity(
    const std::vector<PriorCombo>& combos, std::uint64_t seed,
    AbcConfig sd_cfg = {}, AbcConfig bma_cfg = {}) {
    if (bma_cfg.total_iterations == 20000) bma_cfg.total_iterations = 50000;
    const SummaryStats& stats = sensitivity_stats();

    std::vector<SensitivityRow> rows;
    for (std::size_t c = 0; c < combos.size(); ++c) {
        const PriorCombo& combo = combos[c];
        PriorBank prior;
        prior.set(Family::Beta, {{kPositivityFloor, combo.beta_shape_hi},
                                 {kPositivityFloor, combo.beta_shape_hi}});
        prior.set(Family::Normal,
                  {detail::location_window(stats),
                   {kPositivityFloor, combo.normal_sigma_hi}});

        SensitivityRow row;
        row.combo = combo;
        AbcConfig cfg = sd_cfg;
        cfg.seed = rng::mix(seed, 0x5Eull, c, 0);
        EstimateResult beta_res =
            run_abc_sd(Family::Beta, stats, prior, cfg);
        cfg.seed = rng::mix(seed, 0x5Eull, c, 1);
        EstimateResult normal_res =
            run_abc_sd(Family::Normal, stats, prior, cfg);
        AbcConfig bcfg = bma_cfg;
        bcfg.seed = rng::mix(seed, 0x5Eull, c, 2);
        EstimateResult bma_res = run_abc_bma(
            {Family::Normal, Family::Beta}, stats, prior, bcfg);

        row.prob_beta = bma_res.model_probs.at(Family::Beta);
        row.prob_normal = bma_res.model_probs.at(Family::Normal);
        row.re_mean_sd_beta =
            relative_error(beta_res.mean_hat, kSensitivityTrueMean);
        row.re_mean_sd_normal =
            relative_error(normal_res.mean_hat, kSensitivityTrueMean);
        row.re_mean_bma =
            relative_error(bma_res.mean_hat, kSensitivityTrueMean);
        row.re_sd_sd_beta =
            relative_error(beta_res.sd_hat, kSensitivityTrueSd);
        row.re_sd_sd_normal =
            relative_error(normal_res.sd_hat, kSensitivityTrueSd);
        row.re_sd_bma = relative_error(bma_res.sd_hat, kSensitivityTrueSd);
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<SensitivityRow> sensitivity_table2(std::uint64_t seed,
                                                      AbcConfig sd_cfg = {},
                                                      AbcConfig bma_cfg = {}) {
    return run_sensitivity(default_prior_combos(), seed, sd_cfg, bma_cfg);
}

}  // namespace abcmeta
