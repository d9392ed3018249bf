#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "flexmimo/rng.hpp"

namespace flexmimo {

struct HardeningConfig {
    int flexible_antennas = 1;  // k
    int positions = 1;          // N, k <= N
    std::int64_t trials = 100000;
    RngStream seed{0, rng_tag::hardening};

    void validate() const;
};

// Hardening metric: Var(||h||^2 / E[||h||^2]). Smaller = stronger hardening.
struct HardeningResult {
    double mean_gain = 0.0;
    double variance = 0.0;
    double stderr_variance = 0.0;  // Monte Carlo only; 0 for closed forms
};

// Fixed array of M antennas: Var(S/E[S]) = 1/M for S a sum of M unit-mean
// exponential gains.
double fip_variance(int antennas);

// Mean and variance of the sum of the k largest of N i.i.d. unit-mean
// exponentials, via the spacing representation:
//   mean = k + k*(H_N - H_k),  var = k + k^2*(H2_N - H2_k).
std::pair<double, double> topk_sum_stats(int k, int n);

// Normalized variance var/mean^2 of the top-k sum; equals 1/N when k = N.
double flp_variance_analytic(int k, int n);

// Monte Carlo estimate of the same quantity, with a delta-method standard
// error for the variance estimate. Deterministic per seed.
HardeningResult flp_variance_mc(const HardeningConfig& cfg);

// Smallest N >= k with flp_variance_analytic(k, N) <= 1/M_target.
int equivalent_positions(int k, int target_antennas);

// One Fig.-2-style table row; empty cells where a column is not defined
// (FIP beyond M_max, FLP below its k or beyond N_max).
struct HardeningCurveRow {
    int index = 0;  // antenna count and position count, shared axis
    std::optional<double> fip;
    std::vector<std::optional<double>> flp;  // one per k in k_list
};

std::vector<HardeningCurveRow> hardening_curve(const std::vector<int>& k_list, int n_max,
                                               int m_max);

}  // namespace flexmimo
