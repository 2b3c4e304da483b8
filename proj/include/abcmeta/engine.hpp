#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "abcmeta/families.hpp"
#include "abcmeta/priors.hpp"
#include "abcmeta/rng.hpp"
#include "abcmeta/summaries.hpp"

namespace abcmeta {

enum class EstimatorMode { PlugIn, Simulation };

struct AbcConfig {
    std::int64_t total_iterations = 20000;
    double acceptance_fraction = 0.001;
    std::int64_t adaptation_interval = 1000;
    double weight_floor = 0.01;
    std::uint64_t seed = 0;
    EstimatorMode estimator = EstimatorMode::Simulation;
    // When set, accept every draw with distance < epsilon instead of
    // keeping the best acceptance_fraction of all draws.
    std::optional<double> epsilon;
    bool normalize_distance = false;
    int threads = 1;

    std::size_t reservoir_capacity() const {
        return static_cast<std::size_t>(std::ceil(
            static_cast<double>(total_iterations) * acceptance_fraction));
    }

    void validate(std::size_t active_families) const {
        if (total_iterations < 1)
            throw std::invalid_argument("total_iterations must be >= 1");
        if (!(acceptance_fraction > 0.0 && acceptance_fraction < 1.0))
            throw std::invalid_argument(
                "acceptance_fraction must be in (0,1)");
        if (reservoir_capacity() < 1)
            throw std::invalid_argument("acceptance fraction too small: "
                                        "reservoir would be empty");
        if (adaptation_interval < 1)
            throw std::invalid_argument("adaptation_interval must be >= 1");
        if (active_families > 1 &&
            !(weight_floor > 0.0 &&
              weight_floor < 1.0 / static_cast<double>(active_families)))
            throw std::invalid_argument(
                "weight_floor must be in (0, 1/K) for K active families");
        if (epsilon && !(*epsilon > 0.0))
            throw std::invalid_argument("epsilon must be > 0");
        if (threads < 1)
            throw std::invalid_argument("threads must be >= 1");
    }
};

/// One retained draw: the generating family and parameters plus the sample
/// statistics of its pseudo-dataset.
struct AcceptedDraw {
    FamilyParams params;
    double pseudo_mean;
    double pseudo_sd;
    double distance;
    std::uint64_t iteration;

    Family family() const { return params.family(); }
};

/// Keeps the capacity draws with smallest distance seen so far. Ties are
/// broken by iteration index, earlier wins, so the retained set equals the
/// exact bottom-M of all offered draws under (distance, iteration) order.
class Reservoir {
  public:
    explicit Reservoir(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0)
            throw std::invalid_argument("reservoir capacity must be >= 1");
        heap_.reserve(capacity);
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return heap_.size(); }
    bool full() const { return heap_.size() == capacity_; }

    // Worst retained distance; the effective tolerance once full.
    double worst_distance() const {
        if (heap_.empty()) return std::numeric_limits<double>::infinity();
        return heap_.front().distance;
    }

    void offer(AcceptedDraw draw) {
        if (heap_.size() < capacity_) {
            heap_.push_back(std::move(draw));
            std::push_heap(heap_.begin(), heap_.end(), better_);
            return;
        }
        if (better_(draw, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), better_);
            heap_.back() = std::move(draw);
            std::push_heap(heap_.begin(), heap_.end(), better_);
        }
    }

    const std::vector<AcceptedDraw>& entries() const { return heap_; }

    // Retained draws ordered by (distance, iteration).
    std::vector<AcceptedDraw> sorted_entries() const {
        std::vector<AcceptedDraw> out = heap_;
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.distance != b.distance) return a.distance < b.distance;
            return a.iteration < b.iteration;
        });
        return out;
    }

    std::map<Family, std::size_t> family_counts() const {
        std::map<Family, std::size_t> counts;
        for (const auto& d : heap_) ++counts[d.family()];
        return counts;
    }

  private:
    // Max-heap comparator: a "better" draw sorts after the heap front.
    static bool is_better(const AcceptedDraw& a, const AcceptedDraw& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.iteration < b.iteration;
    }
    static constexpr auto better_ = is_better;

    std::size_t capacity_;
    std::vector<AcceptedDraw> heap_;
};

struct EstimateResult {
    double mean_hat = 0.0;
    double sd_hat = 0.0;
    std::map<Family, double> model_probs;
    std::vector<AcceptedDraw> accepted;
    double effective_tolerance = 0.0;
    AbcConfig config;
    std::int64_t discarded = 0;
};

/// Proportion of accepted draws generated under each family.
inline std::map<Family, double> posterior_model_probabilities(
    const std::vector<AcceptedDraw>& accepted) {
    if (accepted.empty())
        throw std::invalid_argument(
            "posterior_model_probabilities: empty list");
    std::map<Family, double> probs;
    for (const auto& d : accepted) probs[d.family()] += 1.0;
    for (auto& [f, p] : probs) p /= static_cast<double>(accepted.size());
    return probs;
}

/// New model weights from reservoir composition: proportional to retained
/// counts, with every family floored at `floor` so none becomes unreachable.
/// Entries align with `active`.
inline std::vector<double> adapt_model_weights(
    const Reservoir& reservoir, double floor,
    const std::vector<Family>& active) {
    if (reservoir.size() == 0)
        throw std::invalid_argument("adapt_model_weights: empty reservoir");
    const std::size_t k = active.size();
    const auto counts_by_family = reservoir.family_counts();
    std::vector<double> counts(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        auto it = counts_by_family.find(active[i]);
        if (it != counts_by_family.end())
            counts[i] = static_cast<double>(it->second);
    }
    // Pin below-floor entries to exactly the floor, share the remaining
    // mass proportionally among the rest; repeat until stable.
    std::vector<bool> pinned(k, false);
    std::vector<double> pi(k, 0.0);
    for (;;) {
        std::size_t npinned = 0;
        double unpinned_counts = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (pinned[i]) ++npinned;
            else unpinned_counts += counts[i];
        }
        const double free_mass = 1.0 - floor * static_cast<double>(npinned);
        bool changed = false;
        for (std::size_t i = 0; i < k; ++i) {
            if (pinned[i]) {
                pi[i] = floor;
                continue;
            }
            pi[i] = unpinned_counts > 0.0
                        ? free_mass * counts[i] / unpinned_counts
                        : free_mass / static_cast<double>(k - npinned);
            if (pi[i] < floor) {
                pinned[i] = true;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return pi;
}

namespace detail {

struct IterOutcome {
    bool valid = false;
    std::size_t family_index = 0;
    double params[2] = {0.0, 0.0};
    double pseudo_mean = 0.0;
    double pseudo_sd = 0.0;
    double distance = 0.0;
};

// Summary vector of already-sampled pseudo data, in canonical field order.
// Sorts `data` in place when order statistics are needed.
inline void pseudo_summary_vector(std::vector<double>& data,
                                  const SummaryScenario& scenario,
                                  double mean, double sd,
                                  std::vector<double>& out) {
    out.clear();
    bool needs_order = false;
    for (Stat s : scenario.fields())
        if (s != Stat::Mean && s != Stat::Sd) needs_order = true;
    if (needs_order) std::sort(data.begin(), data.end());
    for (Stat s : scenario.fields()) {
        switch (s) {
            case Stat::Min: out.push_back(data.front()); break;
            case Stat::Q1: out.push_back(quantile_sorted(data, 0.25)); break;
            case Stat::Median: out.push_back(quantile_sorted(data, 0.5)); break;
            case Stat::Q3: out.push_back(quantile_sorted(data, 0.75)); break;
            case Stat::Max: out.push_back(data.back()); break;
            case Stat::Mean: out.push_back(mean); break;
            case Stat::Sd: out.push_back(sd); break;
        }
    }
}

inline double scaled_distance(const std::vector<double>& a,
                              const std::vector<double>& b,
                              const std::vector<double>& scale) {
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = (a[i] - b[i]) / scale[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

// The rejection-ABC core shared by the SD and BMA entry points. `adaptive`
// turns on multinomial family selection plus weight adaptation.
inline EstimateResult run_core(const std::vector<Family>& families,
                               const SummaryStats& stats,
                               const PriorBank& prior, const AbcConfig& cfg,
                               bool adaptive) {
    stats.validate();
    cfg.validate(families.size());
    if (families.empty())
        throw std::invalid_argument("no active families");
    for (Family f : families) (void)prior.intervals(f);

    const std::size_t k = families.size();
    const auto n = static_cast<std::size_t>(stats.n);
    const std::vector<double> observed = summary_vector(stats);
    std::vector<double> scale(observed.size(), 1.0);
    if (cfg.normalize_distance)
        for (std::size_t i = 0; i < observed.size(); ++i)
            scale[i] = std::max(std::abs(observed[i]), 1e-12);

    std::vector<double> pi(k, 1.0 / static_cast<double>(k));
    if (adaptive && k > 1) {
        // honor explicit initial weights when the bank carries them for
        // exactly this family set
        auto active = prior.active_families();
        if (active == families) pi = prior.initial_weights();
    }

    const std::int64_t total = cfg.total_iterations;
    Reservoir reservoir(cfg.reservoir_capacity());
    std::vector<AcceptedDraw> epsilon_accepted;
    std::int64_t discarded = 0;

    const std::int64_t chunk_size = cfg.adaptation_interval;
    std::vector<IterOutcome> outcomes(
        static_cast<std::size_t>(std::min<std::int64_t>(chunk_size, total)));

    auto evaluate_range = [&](std::int64_t begin, std::int64_t end,
                              std::int64_t chunk_begin,
                              const std::vector<double>& pi_snapshot) {
        std::vector<double> data;
        std::vector<double> pseudo;
        data.reserve(n);
        for (std::int64_t i = begin; i < end; ++i) {
            IterOutcome& out = outcomes[static_cast<std::size_t>(i - chunk_begin)];
            out.valid = false;
            auto eng = rng::engine_for(cfg.seed, static_cast<std::uint64_t>(i));
            std::size_t fi = 0;
            if (k > 1) {
                std::uniform_real_distribution<double> u01(0.0, 1.0);
                const double u = u01(eng);
                double cum = 0.0;
                for (fi = 0; fi + 1 < k; ++fi) {
                    cum += pi_snapshot[fi];
                    if (u < cum) break;
                }
            }
            const Family fam = families[fi];
            const FamilyParams params = draw_params(prior, fam, eng);
            sample_n(params, n, eng, data);
            const double mean = mean_of(data);
            const double sd = sd_of(data, mean);
            if (!std::isfinite(mean) || !std::isfinite(sd)) continue;
            pseudo_summary_vector(data, stats.scenario, mean, sd, pseudo);
            const double dist = scaled_distance(observed, pseudo, scale);
            if (!std::isfinite(dist)) continue;
            out.valid = true;
            out.family_index = fi;
            auto ps = params.params();
            out.params[0] = ps[0];
            if (ps.size() > 1) out.params[1] = ps[1];
            out.pseudo_mean = mean;
            out.pseudo_sd = sd;
            out.distance = dist;
        }
    };

    for (std::int64_t chunk_begin = 0; chunk_begin < total;
         chunk_begin += chunk_size) {
        const std::int64_t chunk_end =
            std::min<std::int64_t>(chunk_begin + chunk_size, total);
        const std::vector<double> pi_snapshot = pi;

        if (cfg.threads == 1) {
            evaluate_range(chunk_begin, chunk_end, chunk_begin, pi_snapshot);
        } else {
            const std::int64_t span = chunk_end - chunk_begin;
            const std::int64_t per =
                (span + cfg.threads - 1) / cfg.threads;
            std::vector<std::thread> workers;
            for (int t = 0; t < cfg.threads; ++t) {
                const std::int64_t b = chunk_begin + t * per;
                const std::int64_t e = std::min(b + per, chunk_end);
                if (b >= e) break;
                workers.emplace_back(evaluate_range, b, e, chunk_begin,
                                     std::cref(pi_snapshot));
            }
            for (auto& w : workers) w.join();
        }

        // serial merge in iteration order keeps results independent of the
        // parallelism degree
        for (std::int64_t i = chunk_begin; i < chunk_end; ++i) {
            const IterOutcome& out =
                outcomes[static_cast<std::size_t>(i - chunk_begin)];
            if (!out.valid) {
                ++discarded;
                continue;
            }
            const Family fam = families[out.family_index];
            std::vector<double> ps(out.params,
                                   out.params + param_count(fam));
            AcceptedDraw draw{FamilyParams(fam, std::move(ps)),
                              out.pseudo_mean, out.pseudo_sd, out.distance,
                              static_cast<std::uint64_t>(i)};
            if (cfg.epsilon) {
                if (out.distance < *cfg.epsilon)
                    epsilon_accepted.push_back(std::move(draw));
            } else {
                reservoir.offer(std::move(draw));
            }
        }

        if (adaptive && k > 1 && chunk_end < total && reservoir.size() > 0)
            pi = adapt_model_weights(reservoir, cfg.weight_floor, families);
    }

    EstimateResult result;
    result.config = cfg;
    result.discarded = discarded;
    if (cfg.epsilon) {
        if (epsilon_accepted.empty())
            throw std::runtime_error(
                "fixed-epsilon run accepted no draws; increase epsilon");
        result.accepted = std::move(epsilon_accepted);
        result.effective_tolerance = *cfg.epsilon;
    } else {
        result.accepted = reservoir.sorted_entries();
        result.effective_tolerance = reservoir.worst_distance();
    }

    result.model_probs = posterior_model_probabilities(result.accepted);
    for (Family f : families)
        if (!result.model_probs.count(f)) result.model_probs[f] = 0.0;

    const bool plug_in = !adaptive && cfg.estimator == EstimatorMode::PlugIn;
    if (plug_in) {
        // mean of accepted parameter values plugged into the closed-form
        // moments (single-family runs only)
        const Family fam = families.front();
        std::vector<double> avg(param_count(fam), 0.0);
        for (const auto& d : result.accepted)
            for (std::size_t j = 0; j < avg.size(); ++j)
                avg[j] += d.params.param(j);
        for (double& v : avg) v /= static_cast<double>(result.accepted.size());
        const Moments m = analytic_moments(FamilyParams(fam, std::move(avg)));
        result.mean_hat = m.mean;
        result.sd_hat = m.sd;
    } else {
        double sm = 0.0, ss = 0.0;
        for (const auto& d : result.accepted) {
            sm += d.pseudo_mean;
            ss += d.pseudo_sd;
        }
        result.mean_hat = sm / static_cast<double>(result.accepted.size());
        result.sd_hat = ss / static_cast<double>(result.accepted.size());
    }
    return result;
}

}  // namespace detail

/// Rejection ABC against a single assumed family.
inline EstimateResult run_abc_sd(Family family, const SummaryStats& stats,
                                 const PriorBank& prior,
                                 const AbcConfig& cfg) {
    return detail::run_core({family}, stats, prior, cfg, /*adaptive=*/false);
}

/// Rejection ABC averaged over a bank of candidate families, with model
/// weights adapted from the reservoir composition during the run.
inline EstimateResult run_abc_bma(const std::vector<Family>& families,
                                  const SummaryStats& stats,
                                  const PriorBank& prior,
                                  const AbcConfig& cfg) {
    if (families.empty())
        throw std::invalid_argument("run_abc_bma: no candidate families "
                                    "(all may have been dropped by support "
                                    "checks)");
    return detail::run_core(families, stats, prior, cfg, /*adaptive=*/true);
}

}  // namespace abcmeta
