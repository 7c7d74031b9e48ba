#include "newslens/baseline.hpp"

#include "newslens/core.hpp"

namespace newslens::baseline {

std::optional<double> reporting_ratio(double m_p, double m_i, double c_p, double c_i) {
    double denom = c_p + c_i;
    if (denom <= 0.0) return std::nullopt;
    return (m_p + m_i) / denom;
}

double spike_factor(double c_t, std::optional<double> c_prev, const BaselineParams& params) {
    if (!c_prev) return params.spike_at_origin ? params.spike_multiplier : 1.0;
    // Note: C_prev == 0 satisfies C_t >= 2*C_prev for any C_t >= 0.
    if (c_t >= params.spike_threshold_ratio * (*c_prev)) return params.spike_multiplier;
    return 1.0;
}

double initial_mentions(std::optional<double> r, double m_s, double s_s) {
    if (!r) return 0.0;
    return *r * m_s * s_s;
}

BaselineOutputs expected_series(const BaselineInputs& in, const BaselineParams& params) {
    const size_t T = in.mentions_p.size();
    if (in.mentions_i.size() != T || in.casualties_p.size() != T || in.casualties_i.size() != T)
        throw InputError("baseline inputs must be aligned, equal-length series");

    BaselineOutputs out;
    out.r.resize(T);
    out.spike_p.resize(T);
    out.spike_i.resize(T);
    out.g_p.resize(T);
    out.g_i.resize(T);
    out.pre_norm_p.resize(T);
    out.pre_norm_i.resize(T);
    out.w_p.resize(T);
    out.w_i.resize(T);
    out.m_prime_p.assign(T, 0.0);
    out.m_prime_i.assign(T, 0.0);
    out.gap_p.resize(T);
    out.gap_i.resize(T);

    double acc_p = 0.0, acc_i = 0.0;  // decayed history sum_{k<t} G(k) * delta^(t-k)
    for (size_t t = 0; t < T; ++t) {
        out.r[t] = reporting_ratio(in.mentions_p[t], in.mentions_i[t], in.casualties_p[t],
                                   in.casualties_i[t]);
        std::optional<double> prev_p, prev_i;
        if (t > 0) {
            prev_p = in.casualties_p[t - 1];
            prev_i = in.casualties_i[t - 1];
        }
        out.spike_p[t] = spike_factor(in.casualties_p[t], prev_p, params);
        out.spike_i[t] = spike_factor(in.casualties_i[t], prev_i, params);
        double base_p = params.g_uses_casualties ? in.casualties_p[t] : in.mentions_p[t];
        double base_i = params.g_uses_casualties ? in.casualties_i[t] : in.mentions_i[t];
        out.g_p[t] = initial_mentions(out.r[t], base_p, out.spike_p[t]);
        out.g_i[t] = initial_mentions(out.r[t], base_i, out.spike_i[t]);

        acc_p *= params.delta_p;
        acc_i *= params.delta_i;
        out.pre_norm_p[t] = acc_p + out.g_p[t];
        out.pre_norm_i[t] = acc_i + out.g_i[t];
        acc_p += out.g_p[t];
        acc_i += out.g_i[t];

        double pre_sum = out.pre_norm_p[t] + out.pre_norm_i[t];
        double actual_total = in.mentions_p[t] + in.mentions_i[t];
        if (pre_sum > 0.0) {
            out.w_p[t] = out.pre_norm_p[t] / pre_sum;
            out.w_i[t] = out.pre_norm_i[t] / pre_sum;
            out.m_prime_p[t] = actual_total * (*out.w_p[t]);
            out.m_prime_i[t] = actual_total * (*out.w_i[t]);
            if (actual_total > 0.0) {
                double share_p = in.mentions_p[t] / actual_total;
                out.gap_p[t] = 100.0 * (*out.w_p[t]) - 100.0 * share_p;
                out.gap_i[t] = -*out.gap_p[t];
            }
        }
    }
    return out;
}

std::optional<double> gap_summary(const BaselineOutputs& outputs) {
    double sum = 0.0;
    int n = 0;
    for (const auto& g : outputs.gap_p) {
        if (g) {
            sum += *g;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

}  // namespace newslens::baseline
