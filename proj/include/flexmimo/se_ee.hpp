#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flexmimo/power.hpp"

namespace flexmimo {

// A single normalized link served either by M fixed antennas or by k flexible
// antennas choosing the k best of N candidate positions spaced `spacing`
// meters apart.
struct SystemKind {
    enum class Layout { fixed, flexible };

    Layout layout = Layout::fixed;
    int antennas = 1;       // M (fixed) or k (flexible)
    int positions = 1;      // N, flexible only
    double spacing = 0.05;  // m, flexible only

    static SystemKind Fixed(int m) { return {Layout::fixed, m, m, 0.05}; }
    static SystemKind Flexible(int k, int n, double spacing = 0.05) {
        return {Layout::flexible, k, n, spacing};
    }

    // Worst-case full-array traversal charged to the movement power term.
    double travel_length() const {
        return layout == Layout::flexible ? antennas * static_cast<double>(positions) * spacing
                                          : 0.0;
    }
    int chains() const { return antennas; }
    std::string label() const;
    void validate() const;
};

struct SeEePoint {
    double tx_power = 0.0;  // W
    double se = 0.0;        // bit/s/Hz
    double ee = 0.0;        // bit/Joule
};

struct SeStats {
    double mean = 0.0;
    double stderr_mean = 0.0;
};

// E[log2(1 + p*S/sigma^2)] by Monte Carlo, S the (top-k or full) gain sum.
// The gain draws depend only on (seed, trial, index), not on p, so sweeps over
// p share common random numbers and inherit exact monotonicity.
SeStats expected_se_stats(const SystemKind& kind, double p, double noise_power,
                          std::int64_t trials, std::uint64_t seed);
double expected_se(const SystemKind& kind, double p, double noise_power, std::int64_t trials,
                   std::uint64_t seed);

// One SeEePoint per sweep power; ee * total_power == B * se on every row.
std::vector<SeEePoint> se_ee_curve(const SystemKind& kind, const std::vector<double>& p_sweep,
                                   const PowerModel& pm, double noise_power,
                                   std::int64_t trials, std::uint64_t seed);

// Row with the largest ee; ties break toward smaller tx_power.
SeEePoint max_ee_point(const std::vector<SeEePoint>& curve);

struct SystemComparison {
    SystemKind kind;
    SeEePoint max_ee;     // the maximum-EE row
    double se_at_max_p = 0.0;
};

std::vector<SystemComparison> compare_systems(const std::vector<SystemKind>& kinds,
                                              const PowerModel& pm, double noise_power,
                                              const std::vector<double>& p_sweep,
                                              std::int64_t trials, std::uint64_t seed);

}  // namespace flexmimo
