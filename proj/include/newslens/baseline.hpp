#ifndef NEWSLENS_BASELINE_HPP
#define NEWSLENS_BASELINE_HPP

#include <optional>
#include <vector>

#include "newslens/core.hpp"

namespace newslens::baseline {

struct BaselineParams {
    double delta_p = 0.6;  // Palestinian-side weekly decay
    double delta_i = 0.8;  // Israeli-side weekly decay
    double spike_multiplier = 2.0;
    double spike_threshold_ratio = 2.0;
    // Week 0 has no prior week; by default its spike factor is 1. The
    // alternative convention (factor 2 at t=0) is exposed for the
    // sensitivity check.
    bool spike_at_origin = false;
    // Sensitivity variant only: G = r * C_s * S_s instead of the published
    // G = r * M_s * S_s.
    bool g_uses_casualties = false;
};

// One outlet's aligned weekly series. mentions_* are the outlet's actual
// casualty-related CVN mention counts; casualties_* are the ground-truth
// casualty counts shared by all outlets.
struct BaselineInputs {
    std::vector<double> mentions_p;
    std::vector<double> mentions_i;
    std::vector<double> casualties_p;
    std::vector<double> casualties_i;
};

struct BaselineOutputs {
    std::vector<std::optional<double>> r;  // absent when C_p + C_i == 0
    std::vector<double> spike_p, spike_i;
    std::vector<double> g_p, g_i;
    std::vector<double> pre_norm_p, pre_norm_i;  // decayed sums before normalization
    std::vector<std::optional<double>> w_p, w_i;
    std::vector<double> m_prime_p, m_prime_i;
    std::vector<std::optional<double>> gap_p, gap_i;  // percentage points
};

// (M_p + M_i) / (C_p + C_i); absent when the denominator is zero.
std::optional<double> reporting_ratio(double m_p, double m_i, double c_p, double c_i);

// 2 when C_t >= 2 * C_prev (both weeks' casualties for one side), else 1.
// With no previous week the result follows params.spike_at_origin.
double spike_factor(double c_t, std::optional<double> c_prev, const BaselineParams& params);

// G = r * M_s * S_s; zero when r is absent.
double initial_mentions(std::optional<double> r, double m_s, double s_s);

// Full model: per week, decayed cumulative expected mentions, the normalized
// weekly split w_s, renormalized expected mentions M', and the gap series
// gap_p = 100*w_p - 100*actual_share_p (gap_i = -gap_p).
BaselineOutputs expected_series(const BaselineInputs& inputs, const BaselineParams& params);

// Mean of gap_p over weeks where it is defined.
std::optional<double> gap_summary(const BaselineOutputs& outputs);

}  // namespace newslens::baseline

#endif  // NEWSLENS_BASELINE_HPP
