// Runs one plan over consecutive seed pairs and prints a summary row per run:
// the per-user criterion counts and the four slopes of the cosine-minus-binary
// difference series. Used to judge how seed-sensitive a plan is.

#include <cstdio>
#include <limits>
#include <optional>
#include <vector>

#include <CLI11.hpp>

#include "feedrank/errors.hpp"
#include "feedrank/metrics.hpp"
#include "feedrank/simulation.hpp"

using namespace feedrank;

namespace {

std::optional<double> slope(const std::vector<std::optional<double>>& row) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i]) points.emplace_back(static_cast<double>(i + 1), *row[i]);
    if (points.size() < 2) return std::nullopt;
    return trend_slope(points);
}

std::optional<double> mean(const std::vector<std::optional<double>>& row) {
    double total = 0;
    std::size_t n = 0;
    for (const auto& v : row)
        if (v) total += *v, ++n;
    if (n == 0) return std::nullopt;
    return total / static_cast<double>(n);
}

bool above(const std::optional<double>& a, const std::optional<double>& b) { return a && (!b || *a > *b); }

double or_nan(const std::optional<double>& v) { return v.value_or(std::numeric_limits<double>::quiet_NaN()); }

std::optional<double> diff_slope(const UserSeries& a, const UserSeries& b, bool stddev) {
    std::vector<std::optional<double>> row;
    for (const auto& p : difference_series(a, b)) row.push_back(stddev ? p.stddev : p.mean_diff);
    return slope(row);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Run a plan over several seed pairs"};
    std::string plan_path;
    unsigned seeds = 10;
    app.add_option("--plan", plan_path)->required()->check(CLI::ExistingFile);
    app.add_option("--seeds", seeds, "Number of consecutive seed pairs");
    CLI11_PARSE(app, argc, argv);

    ExperimentPlan base;
    try {
        base = load_plan(plan_path);
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    std::printf("offset\tfinal_cd_vs_random\trp_trend_up\tcd_avg_vs_binary\trp_avg_vs_binary\t"
                "cd_diff_mean_slope\tcd_diff_sd_slope\trp_diff_mean_slope\trp_diff_sd_slope\n");
    for (unsigned k = 0; k < seeds; ++k) {
        ExperimentPlan plan = base;
        plan.corpus_seed += k;
        plan.users.seed += k;
        const EvalReport report = run_experiment(plan);
        const auto cd_c = report.series(RankingKind::Cosine, false), cd_b = report.series(RankingKind::Binary, false);
        const auto cd_r = report.series(RankingKind::Random, false);
        const auto rp_c = report.series(RankingKind::Cosine, true), rp_b = report.series(RankingKind::Binary, true);
        int f1 = 0, f2 = 0, f3 = 0, f4 = 0;
        for (std::size_t u = 0; u < cd_c.size(); ++u) {
            f1 += above(cd_c[u].back(), cd_r[u].back());
            const auto s = slope(rp_c[u]);
            f2 += s && *s > 0;
            f3 += above(mean(cd_c[u]), mean(cd_b[u]));
            f4 += above(mean(rp_c[u]), mean(rp_b[u]));
        }
        std::printf("%u\t%d\t%d\t%d\t%d\t%.6f\t%.6f\t%.6f\t%.6f\n", k, f1, f2, f3, f4,
                    or_nan(diff_slope(cd_c, cd_b, false)), or_nan(diff_slope(cd_c, cd_b, true)),
                    or_nan(diff_slope(rp_c, rp_b, false)), or_nan(diff_slope(rp_c, rp_b, true)));
    }
}
