#ifndef NEWSLENS_STATS_HPP
#define NEWSLENS_STATS_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "newslens/core.hpp"
#include "newslens/corpus.hpp"

namespace newslens::stats {

// One clustered binary observation: outcome regressed on a single binary
// covariate with a logit link. Clusters share an exchangeable working
// correlation.
struct GeeObservation {
    std::string cluster_id;
    int outcome = 0;    // 1 = individualized, 0 = grouped
    int covariate = 0;  // 1 = Palestinian, 0 = Israeli
};

struct GeeDesign {
    std::vector<GeeObservation> observations;
    int max_iterations = 100;
    double tolerance = 1e-8;  // max absolute coefficient change
};

struct GeeFit {
    double intercept = 0.0;
    double beta_side = 0.0;
    double robust_se = 0.0;  // sandwich SE of beta_side
    double odds_ratio = 1.0;
    double wald_z = 0.0;
    double p_value = 1.0;
    double rho_hat = 0.0;
    int iterations_used = 0;
    bool converged = false;
    std::string diagnostic;  // set when not converged (e.g. separation)
};

/// Solves the GEE estimating equations sum_i D_i' V_i^-1 (y_i - mu_i) = 0
/// with logit link and exchangeable working correlation; variance by the
/// Huber-White sandwich B^-1 M B^-1. Throws InputError on an invalid design
/// and std::runtime_error when the scaling matrix B is singular.
GeeFit fit_gee_logistic(const GeeDesign& design);

std::string serialize_fit(const std::string& label, const GeeFit& fit);

// 100 * (exp(beta) - 1): percent change in the odds per unit covariate.
double odds_percent_change(double beta);

// Cohen's h = 2*asin(sqrt(p1)) - 2*asin(sqrt(p2)). Throws on inputs
// outside [0, 1].
double cohens_h(double p1, double p2);

// Sample Pearson correlation; empty when either side has zero variance.
// Throws InputError when the series lengths differ or are shorter than 2.
std::optional<double> pearson_r(const std::vector<double>& x, const std::vector<double>& y);

// Pairs deaths(d) with stories(d) + stories(d + lag) on days where deaths(d)
// >= day_threshold, then correlates. Days whose lagged partner falls outside
// the series are skipped. Empty when fewer than 2 qualifying days remain or a
// side is constant.
std::optional<double> lagged_story_correlation(const std::vector<double>& daily_deaths,
                                               const std::vector<double>& daily_story_counts,
                                               int lag_days, double day_threshold);

struct MeanCount {
    double mean = 0.0;
    int count = 0;
};

// Arithmetic mean per 7-day bucket anchored at the window start. Weeks with
// no values are absent from the map. Throws InputError on out-of-window dates.
std::map<int, MeanCount> weekly_mean_series(const std::vector<std::pair<Date, double>>& values,
                                            const corpus::StudyWindow& window);

}  // namespace newslens::stats

#endif  // NEWSLENS_STATS_HPP
