// waterfill.cpp
#include "mvv/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mvv {

double water_power(double lambda, double gain, const SystemParams& params) {
    return std::max(0.0, lambda * params.B / std::numbers::ln2 - params.n0 / gain);
}

double water_rate(double lambda, double gain, const SystemParams& params) {
    const double p = water_power(lambda, gain, params);
    return p > 0 ? params.B * std::log2(1.0 + p * gain / params.n0) : 0.0;
}

namespace {

double total_rate(double lambda, const std::vector<double>& gains, const SystemParams& params) {
    double r = 0;
    for (double g : gains) r += water_rate(lambda, g, params);
    return r;
}

// Bisection fallback for the rare case the closed form fails verification.
double bisect_level(const std::vector<double>& gains, double rate_target,
                    const SystemParams& params) {
    const double gmax = *std::max_element(gains.begin(), gains.end());
    double lo = params.n0 * std::numbers::ln2 / (params.B * gmax);
    double hi = lo;
    for (int i = 0; i < 200 && total_rate(hi, gains, params) < rate_target; ++i) hi *= 2;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (total_rate(mid, gains, params) < rate_target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return hi;
}

}  // namespace

WaterFill meet_rate_on_subcarriers(const std::vector<double>& gains, double rate_target,
                                   const SystemParams& params) {
    if (gains.empty()) throw std::invalid_argument("meet_rate: no subcarriers");
    for (double g : gains)
        if (!(g > 0)) throw std::invalid_argument("meet_rate: gains must be positive");
    if (rate_target < 0) throw std::invalid_argument("meet_rate: negative rate target");

    WaterFill wf;
    wf.powers.assign(gains.size(), 0.0);
    if (rate_target == 0) return wf;

    // On the active set {i : lambda > t_i}, with thresholds t_i = n0*ln2/(B*g_i),
    // the achieved rate is B * sum_i log2(lambda / t_i). Solving for lambda with
    // the m best gains active gives log2(lambda) = (R/B + sum_i log2 t_i) / m;
    // the correct m is the one whose lambda lands between t_m and t_{m+1}.
    const size_t L = gains.size();
    std::vector<double> log2_t(L);
    const double log2_n0ln2_over_B = std::log2(params.n0 * std::numbers::ln2 / params.B);
    for (size_t i = 0; i < L; ++i) log2_t[i] = log2_n0ln2_over_B - std::log2(gains[i]);
    std::sort(log2_t.begin(), log2_t.end());

    double lambda = 0;
    double prefix = 0;
    for (size_t m = 1; m <= L; ++m) {
        prefix += log2_t[m - 1];
        const double log2_lambda = (rate_target / params.B + prefix) / static_cast<double>(m);
        if (log2_lambda >= log2_t[m - 1] && (m == L || log2_lambda <= log2_t[m])) {
            lambda = std::exp2(log2_lambda);
            break;
        }
    }
    if (lambda == 0 ||
        std::abs(total_rate(lambda, gains, params) - rate_target) > 1e-10 * rate_target) {
        lambda = bisect_level(gains, rate_target, params);
    }

    wf.lambda = lambda;
    for (size_t i = 0; i < L; ++i) wf.powers[i] = water_power(lambda, gains[i], params);
    return wf;
}

std::vector<double> min_group_channel(const ChannelState& h, const std::vector<uint8_t>& y_col) {
    if (static_cast<int>(y_col.size()) != h.users())
        throw std::invalid_argument("min_group_channel: group size mismatch");
    bool any = false;
    for (uint8_t b : y_col) any = any || b;
    if (!any) throw std::invalid_argument("min_group_channel: empty multicast group");

    std::vector<double> gains(h.subcarriers());
    for (int n = 0; n < h.subcarriers(); ++n) {
        double m = 0;
        bool first = true;
        for (int k = 0; k < h.users(); ++k) {
            if (!y_col[k]) continue;
            const double g = h.h(n, k);
            m = first ? g : std::min(m, g);
            first = false;
        }
        gains[n] = m;
    }
    return gains;
}

}  // namespace mvv
