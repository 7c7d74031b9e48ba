#include "newslens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace newslens::stats {

namespace {

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

struct Cluster {
    std::vector<int> y;
    std::vector<int> x;
};

// Groups observations by cluster id, preserving first-appearance order so the
// fit is deterministic regardless of id spelling.
std::vector<Cluster> group_clusters(const GeeDesign& design) {
    std::vector<Cluster> clusters;
    std::map<std::string, size_t> index;
    for (const auto& obs : design.observations) {
        if (obs.outcome != 0 && obs.outcome != 1)
            throw InputError("GEE outcome must be binary, got " + std::to_string(obs.outcome));
        if (obs.covariate != 0 && obs.covariate != 1)
            throw InputError("GEE covariate must be binary, got " +
                             std::to_string(obs.covariate));
        auto [it, inserted] = index.try_emplace(obs.cluster_id, clusters.size());
        if (inserted) clusters.emplace_back();
        Cluster& c = clusters[it->second];
        c.y.push_back(obs.outcome);
        c.x.push_back(obs.covariate);
    }
    return clusters;
}

struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;  // [[a, b], [c, d]]

    Mat2 inverse() const {
        double det = a * d - b * c;
        if (std::abs(det) < 1e-300)
            throw std::runtime_error("GEE scaling matrix is singular");
        return {d / det, -b / det, -c / det, a / det};
    }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

// Accumulates B = sum D'V^-1 D and U = sum D'V^-1 (y - mu) for the current
// coefficients; optionally also the meat M for the sandwich.
void accumulate(const std::vector<Cluster>& clusters, double b0, double b1, double rho,
                Mat2& B, double U[2], Mat2* M) {
    B = Mat2{};
    U[0] = U[1] = 0.0;
    if (M) *M = Mat2{};
    for (const auto& cl : clusters) {
        const size_t n = cl.y.size();
        const double c1 = 1.0 / (1.0 - rho);
        const double c2 = rho / (1.0 + (static_cast<double>(n) - 1.0) * rho);
        // D rows scaled by A^-1/2 (for the R^-1 pass), variances, residuals.
        std::vector<double> w0(n), w1(n), resid(n), var(n), inv_sa(n);
        double sum0 = 0, sum1 = 0;
        for (size_t j = 0; j < n; ++j) {
            double mu = logistic(b0 + b1 * cl.x[j]);
            double a = mu * (1.0 - mu);
            var[j] = a;
            inv_sa[j] = 1.0 / std::sqrt(a);
            // D row = a * (1, x)
            w0[j] = a * inv_sa[j];
            w1[j] = a * static_cast<double>(cl.x[j]) * inv_sa[j];
            resid[j] = static_cast<double>(cl.y[j]) - mu;
            sum0 += w0[j];
            sum1 += w1[j];
        }
        double g0 = 0, g1 = 0;  // D' V^-1 (y - mu) for this cluster
        for (size_t j = 0; j < n; ++j) {
            // rows of D' V^-1, using R^-1 v = c1 (v - c2 * sum(v))
            double r0 = c1 * (w0[j] - c2 * sum0) * inv_sa[j];
            double r1 = c1 * (w1[j] - c2 * sum1) * inv_sa[j];
            double d0 = var[j];                                   // D entries
            double d1 = var[j] * static_cast<double>(cl.x[j]);
            B.a += r0 * d0;
            B.b += r0 * d1;
            B.c += r1 * d0;
            B.d += r1 * d1;
            g0 += r0 * resid[j];
            g1 += r1 * resid[j];
        }
        U[0] += g0;
        U[1] += g1;
        if (M) {
            M->a += g0 * g0;
            M->b += g0 * g1;
            M->c += g1 * g0;
            M->d += g1 * g1;
        }
    }
}

// Moment estimator for the exchangeable correlation: cross-products of
// Pearson residuals over within-cluster pairs, normalized by the dispersion
// and the pair count less the number of coefficients.
double estimate_rho(const std::vector<Cluster>& clusters, double b0, double b1, size_t n_obs) {
    const int p = 2;
    double pair_sum = 0.0;
    double sq_sum = 0.0;
    long long pair_count = 0;
    for (const auto& cl : clusters) {
        const size_t n = cl.y.size();
        std::vector<double> r(n);
        for (size_t j = 0; j < n; ++j) {
            double mu = logistic(b0 + b1 * cl.x[j]);
            double a = mu * (1.0 - mu);
            r[j] = (static_cast<double>(cl.y[j]) - mu) / std::sqrt(a);
            sq_sum += r[j] * r[j];
        }
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) pair_sum += r[i] * r[j];
        pair_count += static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
    }
    if (pair_count <= p) return 0.0;  // no within-cluster pairs to learn from
    double phi = sq_sum / (static_cast<double>(n_obs) - p);
    double rho = pair_sum / (phi * (static_cast<double>(pair_count) - p));
    // keep the working correlation matrix invertible
    size_t n_max = 0;
    for (const auto& cl : clusters) n_max = std::max(n_max, cl.y.size());
    double lo = (n_max > 1) ? -1.0 / (static_cast<double>(n_max) - 1.0) + 1e-6 : -0.999;
    return std::clamp(rho, lo, 0.999);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace

GeeFit fit_gee_logistic(const GeeDesign& design) {
    if (design.observations.empty()) throw InputError("GEE design has no observations");
    auto clusters = group_clusters(design);
    const size_t n_obs = design.observations.size();

    GeeFit fit;
    double b0 = 0.0, b1 = 0.0, rho = 0.0;
    bool separated = false;
    int it = 0;
    for (; it < design.max_iterations; ++it) {
        // independence working correlation on the first pass, then re-estimate
        rho = (it == 0) ? 0.0 : estimate_rho(clusters, b0, b1, n_obs);
        Mat2 B;
        double U[2];
        accumulate(clusters, b0, b1, rho, B, U, nullptr);
        Mat2 Binv = B.inverse();
        double s0 = Binv.a * U[0] + Binv.b * U[1];
        double s1 = Binv.c * U[0] + Binv.d * U[1];
        b0 += s0;
        b1 += s1;
        if (std::abs(b0) > 30.0 || std::abs(b1) > 30.0) {
            separated = true;
            ++it;
            break;
        }
        if (std::max(std::abs(s0), std::abs(s1)) < design.tolerance) {
            ++it;
            fit.converged = true;
            break;
        }
    }
    fit.iterations_used = it;
    if (separated) {
        fit.converged = false;
        fit.diagnostic = "separation suspected: fitted probabilities pinned at 0/1";
    } else if (!fit.converged) {
        fit.diagnostic = "no convergence within max_iterations";
    }

    rho = estimate_rho(clusters, b0, b1, n_obs);
    Mat2 B, M;
    double U[2];
    accumulate(clusters, b0, b1, rho, B, U, &M);
    Mat2 Binv = B.inverse();
    Mat2 cov = Binv * M * Binv;

    fit.intercept = b0;
    fit.beta_side = b1;
    fit.robust_se = std::sqrt(std::max(0.0, cov.d));
    fit.odds_ratio = std::exp(b1);
    fit.rho_hat = rho;
    fit.wald_z = (fit.robust_se > 0.0) ? b1 / fit.robust_se : 0.0;
    fit.p_value = (fit.robust_se > 0.0) ? normal_two_sided_p(fit.wald_z) : 1.0;
    return fit;
}

std::string serialize_fit(const std::string& label, const GeeFit& fit) {
    std::ostringstream out;
    out.precision(12);
    out << "model=" << label << '\n'
        << "intercept=" << fit.intercept << '\n'
        << "beta_side=" << fit.beta_side << '\n'
        << "robust_se=" << fit.robust_se << '\n'
        << "odds_ratio=" << fit.odds_ratio << '\n'
        << "wald_z=" << fit.wald_z << '\n'
        << "p_value=" << fit.p_value << '\n'
        << "rho_hat=" << fit.rho_hat << '\n'
        << "iterations_used=" << fit.iterations_used << '\n'
        << "converged=" << (fit.converged ? "true" : "false") << '\n';
    if (!fit.diagnostic.empty()) out << "diagnostic=" << fit.diagnostic << '\n';
    return out.str();
}

double odds_percent_change(double beta) { return 100.0 * (std::exp(beta) - 1.0); }

double cohens_h(double p1, double p2) {
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0))
        throw std::invalid_argument("cohens_h: proportions must lie in [0, 1]");
    return 2.0 * std::asin(std::sqrt(p1)) - 2.0 * std::asin(std::sqrt(p2));
}

std::optional<double> pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InputError("pearson_r: series lengths differ");
    if (x.size() < 2) throw InputError("pearson_r: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::optional<double> lagged_story_correlation(const std::vector<double>& daily_deaths,
                                               const std::vector<double>& daily_story_counts,
                                               int lag_days, double day_threshold) {
    if (daily_deaths.size() != daily_story_counts.size())
        throw InputError("lagged_story_correlation: series lengths differ");
    std::vector<double> xs, ys;
    for (size_t d = 0; d < daily_deaths.size(); ++d) {
        if (daily_deaths[d] < day_threshold) continue;
        size_t last = d + static_cast<size_t>(lag_days);
        if (last >= daily_story_counts.size()) continue;  // lagged partner missing
        double stories = 0.0;
        for (size_t j = d; j <= last; ++j) stories += daily_story_counts[j];
        xs.push_back(daily_deaths[d]);
        ys.push_back(stories);
    }
    if (xs.size() < 2) return std::nullopt;
    return pearson_r(xs, ys);
}

std::map<int, MeanCount> weekly_mean_series(const std::vector<std::pair<Date, double>>& values,
                                            const corpus::StudyWindow& window) {
    std::map<int, double> sums;
    std::map<int, int> counts;
    for (const auto& [date, v] : values) {
        if (!window.contains(date))
            throw InputError("weekly_mean_series: date outside study window: " +
                             date.to_string());
        int w = window.week_index(date);
        sums[w] += v;
        counts[w] += 1;
    }
    std::map<int, MeanCount> out;
    for (const auto& [w, s] : sums) out[w] = MeanCount{s / counts[w], counts[w]};
    return out;
}

}  // namespace newslens::stats
