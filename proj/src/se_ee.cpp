#include "flexmimo/se_ee.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "flexmimo/rng.hpp"

namespace flexmimo {

void SystemKind::validate() const {
    if (antennas < 1) throw std::invalid_argument("system: antenna count must be >= 1");
    if (layout == Layout::flexible) {
        if (positions < antennas)
            throw std::invalid_argument("system: require k <= N for flexible layout");
        if (!(spacing > 0.0)) throw std::invalid_argument("system: spacing must be > 0");
    }
}

std::string SystemKind::label() const {
    if (layout == Layout::fixed) return "fip_M" + std::to_string(antennas);
    return "flp_k" + std::to_string(antennas) + "_N" + std::to_string(positions);
}

namespace {

// Beamformed gain of one trial: full sum for fixed arrays, top-k of N for
// flexible ones. Counters depend only on the trial, never on p.
double gain_sum(const SystemKind& kind, const RngStream& rng, std::int64_t trial,
                std::vector<double>& buf) {
    const int n = kind.layout == SystemKind::Layout::fixed ? kind.antennas : kind.positions;
    buf.clear();
    for (int i = 0; i < n; ++i)
        buf.push_back(rng.exponential(static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(i)));
    double sum = 0.0;
    if (kind.layout == SystemKind::Layout::fixed || kind.antennas == kind.positions) {
        for (double g : buf) sum += g;
    } else {
        auto mid = buf.begin() + (n - kind.antennas);
        std::nth_element(buf.begin(), mid, buf.end());
        for (auto it = mid; it != buf.end(); ++it) sum += *it;
    }
    return sum;
}

}  // namespace

SeStats expected_se_stats(const SystemKind& kind, double p, double noise_power,
                          std::int64_t trials, std::uint64_t seed) {
    kind.validate();
    if (p < 0.0) throw std::invalid_argument("expected_se: negative power");
    if (!(noise_power > 0.0)) throw std::invalid_argument("expected_se: noise must be > 0");
    if (trials < 1) throw std::invalid_argument("expected_se: trials must be >= 1");

    const RngStream rng{seed, rng_tag::se_ee};
    std::vector<double> buf;
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const double se = std::log2(1.0 + p * gain_sum(kind, rng, t, buf) / noise_power);
        sum += se;
        sum_sq += se * se;
    }
    const double mean = sum / static_cast<double>(trials);
    double stderr_mean = 0.0;
    if (trials > 1) {
        const double var =
            std::max(0.0, (sum_sq - static_cast<double>(trials) * mean * mean) /
                              static_cast<double>(trials - 1));
        stderr_mean = std::sqrt(var / static_cast<double>(trials));
    }
    return {mean, stderr_mean};
}

double expected_se(const SystemKind& kind, double p, double noise_power, std::int64_t trials,
                   std::uint64_t seed) {
    return expected_se_stats(kind, p, noise_power, trials, seed).mean;
}

std::vector<SeEePoint> se_ee_curve(const SystemKind& kind, const std::vector<double>& p_sweep,
                                   const PowerModel& pm, double noise_power,
                                   std::int64_t trials, std::uint64_t seed) {
    if (p_sweep.empty()) throw std::invalid_argument("se_ee_curve: empty power sweep");
    for (std::size_t i = 1; i < p_sweep.size(); ++i)
        if (!(p_sweep[i] > p_sweep[i - 1]))
            throw std::invalid_argument("se_ee_curve: power sweep must be strictly ascending");
    pm.validate();

    std::vector<SeEePoint> curve;
    curve.reserve(p_sweep.size());
    for (double p : p_sweep) {
        const double se = expected_se(kind, p, noise_power, trials, seed);
        const double power = total_power(pm, 1, p, kind.chains(), kind.travel_length());
        curve.push_back({p, se, energy_efficiency(se, power, pm.bandwidth)});
    }
    return curve;
}

SeEePoint max_ee_point(const std::vector<SeEePoint>& curve) {
    if (curve.empty()) throw std::invalid_argument("max_ee_point: empty curve");
    const SeEePoint* best = &curve.front();
    for (const SeEePoint& pt : curve) {
        if (pt.ee > best->ee || (pt.ee == best->ee && pt.tx_power < best->tx_power)) best = &pt;
    }
    return *best;
}

std::vector<SystemComparison> compare_systems(const std::vector<SystemKind>& kinds,
                                              const PowerModel& pm, double noise_power,
                                              const std::vector<double>& p_sweep,
                                              std::int64_t trials, std::uint64_t seed) {
    if (kinds.size() < 2) throw std::invalid_argument("compare_systems: need at least 2 kinds");
    std::vector<SystemComparison> table;
    table.reserve(kinds.size());
    for (const SystemKind& kind : kinds) {
        const auto curve = se_ee_curve(kind, p_sweep, pm, noise_power, trials, seed);
        table.push_back({kind, max_ee_point(curve), curve.back().se});
    }
    return table;
}

}  // namespace flexmimo
