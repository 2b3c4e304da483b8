#pragma once

#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "abcmeta/experiments.hpp"

namespace abcmeta {

namespace detail {

inline std::string fmt_g(double v, int digits = 9) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

}  // namespace detail

inline constexpr const char* kTrialsCsvHeader =
    "method,rep,n,true_mean,true_sd,mean_hat,sd_hat,re_mean,re_sd,"
    "mp_normal,mp_lognormal,mp_weibull,mp_beta,mp_exponential,failed";

inline constexpr const char* kAreCsvHeader =
    "method,n,reps,are_mean,are_sd,"
    "amp_normal,amp_lognormal,amp_weibull,amp_beta,amp_exponential";

inline constexpr const char* kModelProbsCsvHeader =
    "method,n,family,avg_prob";

inline void write_trials_csv(std::ostream& os,
                             const std::vector<TrialRecord>& trials) {
    os << kTrialsCsvHeader << "\n";
    for (const TrialRecord& t : trials) {
        for (const MethodOutcome& out : t.outcomes) {
            os << out.method << ',' << t.rep << ',' << t.n << ','
               << detail::fmt_g(t.true_mean) << ','
               << detail::fmt_g(t.true_sd) << ','
               << detail::fmt_g(out.mean_hat) << ','
               << detail::fmt_g(out.sd_hat) << ','
               << detail::fmt_g(out.re_mean) << ','
               << detail::fmt_g(out.re_sd);
            for (Family f : kAllFamilies) {
                auto it = out.model_probs.find(f);
                os << ','
                   << detail::fmt_g(it == out.model_probs.end() ? 0.0
                                                                : it->second);
            }
            os << ',' << (out.failed ? 1 : 0) << "\n";
        }
    }
}

inline void write_are_csv(std::ostream& os,
                          const std::vector<AreRow>& report) {
    os << kAreCsvHeader << "\n";
    for (const AreRow& r : report) {
        os << r.method << ',' << r.n << ',' << r.reps_used << ','
           << detail::fmt_g(r.are_mean) << ',' << detail::fmt_g(r.are_sd);
        for (Family f : kAllFamilies) {
            auto it = r.avg_model_probs.find(f);
            os << ','
               << detail::fmt_g(it == r.avg_model_probs.end() ? 0.0
                                                              : it->second);
        }
        os << "\n";
    }
}

inline void write_model_probs_csv(std::ostream& os,
                                  const std::vector<AreRow>& report) {
    os << kModelProbsCsvHeader << "\n";
    for (const AreRow& r : report)
        for (const auto& [f, p] : r.avg_model_probs)
            os << r.method << ',' << r.n << ',' << family_name(f) << ','
               << detail::fmt_g(p) << "\n";
}

struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Deterministic SVG line chart; text output, stable under diff.
inline std::string svg_line_chart(const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<ChartSeries>& series) {
    const double width = 720, height = 480;
    const double ml = 70, mr = 160, mt = 50, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    // pad the y range a little
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * pw;
    };
    auto py = [&](double y) {
        return mt + ph - (y - ymin) / (ymax - ymin) * ph;
    };
    auto g = [](double v) { return detail::fmt_g(v, 6); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#17becf", "#7f7f7f"};
    const int npal = 8;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + g(width) +
           "\" height=\"" + g(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + g(width / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title +
           "</text>\n";
    // axes
    out += "<line x1=\"" + g(ml) + "\" y1=\"" + g(mt + ph) + "\" x2=\"" +
           g(ml + pw) + "\" y2=\"" + g(mt + ph) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + g(ml) + "\" y1=\"" + g(mt) + "\" x2=\"" + g(ml) +
           "\" y2=\"" + g(mt + ph) + "\" stroke=\"black\"/>\n";
    // zero line when the y range crosses zero
    if (ymin < 0.0 && ymax > 0.0)
        out += "<line x1=\"" + g(ml) + "\" y1=\"" + g(py(0.0)) + "\" x2=\"" +
               g(ml + pw) + "\" y2=\"" + g(py(0.0)) +
               "\" stroke=\"#cccccc\" stroke-dasharray=\"4,3\"/>\n";
    // tick labels at range ends
    out += "<text x=\"" + g(ml) + "\" y=\"" + g(mt + ph + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + g(xmin) +
           "</text>\n";
    out += "<text x=\"" + g(ml + pw) + "\" y=\"" + g(mt + ph + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + g(xmax) +
           "</text>\n";
    out += "<text x=\"" + g(ml - 6) + "\" y=\"" + g(py(ymin)) +
           "\" font-size=\"11\" text-anchor=\"end\">" + g(ymin) +
           "</text>\n";
    out += "<text x=\"" + g(ml - 6) + "\" y=\"" + g(py(ymax) + 10) +
           "\" font-size=\"11\" text-anchor=\"end\">" + g(ymax) +
           "</text>\n";
    out += "<text x=\"" + g(ml + pw / 2) + "\" y=\"" + g(height - 10) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + x_label +
           "</text>\n";
    out += "<text x=\"16\" y=\"" + g(mt + ph / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 "
           "16 " +
           g(mt + ph / 2) + ")\">" + y_label + "</text>\n";

    int idx = 0;
    for (const auto& s : series) {
        const char* color = palette[idx % npal];
        std::string pts;
        for (auto [x, y] : s.points) {
            if (!pts.empty()) pts += " ";
            pts += g(px(x)) + "," + g(py(y));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        for (auto [x, y] : s.points)
            out += "<circle cx=\"" + g(px(x)) + "\" cy=\"" + g(py(y)) +
                   "\" r=\"2.5\" fill=\"" + std::string(color) + "\"/>\n";
        // legend
        const double ly = mt + 16 + 18 * idx;
        out += "<line x1=\"" + g(ml + pw + 12) + "\" y1=\"" + g(ly) +
               "\" x2=\"" + g(ml + pw + 34) + "\" y2=\"" + g(ly) +
               "\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + g(ml + pw + 40) + "\" y=\"" + g(ly + 4) +
               "\" font-size=\"11\">" + s.name + "</text>\n";
        ++idx;
    }
    out += "</svg>\n";
    return out;
}

/// ARE-vs-n chart for one metric ("mean" or "sd"), one series per method.
inline std::string are_chart(const std::vector<AreRow>& report,
                             bool sd_metric) {
    std::map<std::string, ChartSeries> by_method;
    for (const AreRow& r : report) {
        if (r.reps_used == 0) continue;
        auto& s = by_method[r.method];
        s.name = r.method;
        s.points.emplace_back(static_cast<double>(r.n),
                              sd_metric ? r.are_sd : r.are_mean);
    }
    std::vector<ChartSeries> series;
    for (auto& [name, s] : by_method) series.push_back(std::move(s));
    return svg_line_chart(
        sd_metric ? "ARE of SD vs sample size" : "ARE of mean vs sample size",
        "n", sd_metric ? "ARE of SD" : "ARE of mean", series);
}

/// Average model probability vs n for one method, one series per family.
inline std::string model_prob_chart(const std::vector<AreRow>& report,
                                    const std::string& method) {
    std::map<Family, ChartSeries> by_family;
    for (const AreRow& r : report) {
        if (r.method != method || r.reps_used == 0) continue;
        for (const auto& [f, p] : r.avg_model_probs) {
            auto& s = by_family[f];
            s.name = std::string(family_name(f));
            s.points.emplace_back(static_cast<double>(r.n), p);
        }
    }
    std::vector<ChartSeries> series;
    for (auto& [f, s] : by_family) series.push_back(std::move(s));
    return svg_line_chart("Average model probability (" + method + ")", "n",
                          "average model probability", series);
}

}  // namespace abcmeta
