#include "flexmimo/hardening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace flexmimo {

namespace {

// Running central moments up to order 4 (Welford/Pebay update), mergeable so
// trial blocks can be reduced in a fixed order regardless of worker count.
struct MomentAccumulator {
    std::int64_t n = 0;
    double mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;

    void add(double x) {
        const double n1 = static_cast<double>(n);
        n += 1;
        const double nd = static_cast<double>(n);
        const double delta = x - mean;
        const double delta_n = delta / nd;
        const double delta_n2 = delta_n * delta_n;
        const double term1 = delta * delta_n * n1;
        mean += delta_n;
        m4 += term1 * delta_n2 * (nd * nd - 3.0 * nd + 3.0) + 6.0 * delta_n2 * m2 -
              4.0 * delta_n * m3;
        m3 += term1 * delta_n * (nd - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
    }

    void combine(const MomentAccumulator& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double nt = na + nb;
        const double delta = o.mean - mean;
        const double d2 = delta * delta, d3 = d2 * delta, d4 = d3 * delta;
        const double m4_new = m4 + o.m4 + d4 * na * nb * (na * na - na * nb + nb * nb) / (nt * nt * nt) +
                              6.0 * d2 * (na * na * o.m2 + nb * nb * m2) / (nt * nt) +
                              4.0 * delta * (na * o.m3 - nb * m3) / nt;
        const double m3_new = m3 + o.m3 + d3 * na * nb * (na - nb) / (nt * nt) +
                              3.0 * delta * (na * o.m2 - nb * m2) / nt;
        const double m2_new = m2 + o.m2 + d2 * na * nb / nt;
        mean = (na * mean + nb * o.mean) / nt;
        m2 = m2_new;
        m3 = m3_new;
        m4 = m4_new;
        n += o.n;
    }
};

double topk_trial(const RngStream& rng, std::int64_t trial, int k, int n,
                  std::vector<double>& buf) {
    buf.clear();
    for (int i = 0; i < n; ++i)
        buf.push_back(rng.exponential(static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(i)));
    double sum = 0.0;
    if (k == n) {
        for (double g : buf) sum += g;
    } else {
        auto mid = buf.begin() + (n - k);
        std::nth_element(buf.begin(), mid, buf.end());
        for (auto it = mid; it != buf.end(); ++it) sum += *it;
    }
    return sum;
}

}  // namespace

void HardeningConfig::validate() const {
    if (flexible_antennas < 1 || positions < flexible_antennas)
        throw std::invalid_argument("hardening: require 1 <= k <= N");
    if (trials < 1) throw std::invalid_argument("hardening: trials must be >= 1");
}

double fip_variance(int antennas) {
    if (antennas < 1) throw std::invalid_argument("fip_variance: antennas must be >= 1");
    return 1.0 / antennas;
}

std::pair<double, double> topk_sum_stats(int k, int n) {
    if (k < 1 || k > n) throw std::invalid_argument("topk_sum_stats: require 1 <= k <= N");
    // Spacing representation: S = sum_m min(m,k)/m * E_m over m = 1..N.
    double h_tail = 0.0, h2_tail = 0.0;  // sums of 1/m, 1/m^2 over m = k+1..N
    for (int m = k + 1; m <= n; ++m) {
        h_tail += 1.0 / m;
        h2_tail += 1.0 / (static_cast<double>(m) * m);
    }
    const double kd = k;
    return {kd + kd * h_tail, kd + kd * kd * h2_tail};
}

double flp_variance_analytic(int k, int n) {
    const auto [mean, var] = topk_sum_stats(k, n);
    return var / (mean * mean);
}

HardeningResult flp_variance_mc(const HardeningConfig& cfg) {
    cfg.validate();
    const int k = cfg.flexible_antennas;
    const int n = cfg.positions;

    constexpr std::int64_t kBlock = 1 << 16;
    const std::int64_t blocks = (cfg.trials + kBlock - 1) / kBlock;
    std::vector<MomentAccumulator> per_block(static_cast<std::size_t>(blocks));

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(std::min<std::int64_t>(hw, blocks));
    auto run_blocks = [&](unsigned worker) {
        std::vector<double> buf;
        buf.reserve(static_cast<std::size_t>(n));
        for (std::int64_t b = worker; b < blocks; b += workers) {
            MomentAccumulator acc;
            const std::int64_t lo = b * kBlock;
            const std::int64_t hi = std::min(cfg.trials, lo + kBlock);
            for (std::int64_t t = lo; t < hi; ++t)
                acc.add(topk_trial(cfg.seed, t, k, n, buf));
            per_block[static_cast<std::size_t>(b)] = acc;
        }
    };
    if (workers <= 1) {
        run_blocks(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_blocks, w);
        for (auto& th : pool) th.join();
    }

    MomentAccumulator acc;
    for (const auto& blk : per_block) acc.combine(blk);  // fixed merge order

    HardeningResult res;
    res.mean_gain = acc.mean;
    if (acc.n < 2) return res;

    const double nd = static_cast<double>(acc.n);
    const double s2 = acc.m2 / (nd - 1.0);
    const double mu3 = acc.m3 / nd;
    const double mu4 = acc.m4 / nd;
    const double m = acc.mean;
    res.variance = s2 / (m * m);

    // Delta method for v = s^2 / mean^2.
    const double var_mean = s2 / nd;
    const double var_s2 = std::max(0.0, mu4 - s2 * s2) / nd;
    const double cov = mu3 / nd;
    const double dv_dm = -2.0 * s2 / (m * m * m);
    const double dv_ds2 = 1.0 / (m * m);
    const double var_v =
        dv_dm * dv_dm * var_mean + dv_ds2 * dv_ds2 * var_s2 + 2.0 * dv_dm * dv_ds2 * cov;
    res.stderr_variance = std::sqrt(std::max(0.0, var_v));
    return res;
}

int equivalent_positions(int k, int target_antennas) {
    if (k < 1) throw std::invalid_argument("equivalent_positions: k must be >= 1");
    if (target_antennas < 1)
        throw std::invalid_argument("equivalent_positions: target must be >= 1");
    const double threshold = 1.0 / target_antennas;
    constexpr int kMaxPositions = 10'000'000;

    double h_tail = 0.0, h2_tail = 0.0;
    const double kd = k;
    for (int n = k; n <= kMaxPositions; ++n) {
        if (n > k) {
            h_tail += 1.0 / n;
            h2_tail += 1.0 / (static_cast<double>(n) * n);
        }
        const double mean = kd + kd * h_tail;
        const double var = kd + kd * kd * h2_tail;
        if (var / (mean * mean) <= threshold) return n;
    }
    throw std::invalid_argument("equivalent_positions: target unreachable within N <= 1e7");
}

std::vector<HardeningCurveRow> hardening_curve(const std::vector<int>& k_list, int n_max,
                                               int m_max) {
    if (k_list.empty()) throw std::invalid_argument("hardening_curve: empty k_list");
    if (m_max < 1) throw std::invalid_argument("hardening_curve: m_max must be >= 1");
    int k_top = 0;
    for (int k : k_list) {
        if (k < 1) throw std::invalid_argument("hardening_curve: k must be >= 1");
        k_top = std::max(k_top, k);
    }
    if (n_max < k_top) throw std::invalid_argument("hardening_curve: n_max below largest k");

    // Prefix harmonic sums H_i, H2_i for i = 0..rows.
    const int rows = std::max(n_max, m_max);
    std::vector<double> h(static_cast<std::size_t>(rows) + 1, 0.0);
    std::vector<double> h2(static_cast<std::size_t>(rows) + 1, 0.0);
    for (int i = 1; i <= rows; ++i) {
        h[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(i) - 1] + 1.0 / i;
        h2[static_cast<std::size_t>(i)] =
            h2[static_cast<std::size_t>(i) - 1] + 1.0 / (static_cast<double>(i) * i);
    }

    std::vector<HardeningCurveRow> table;
    table.reserve(static_cast<std::size_t>(rows));
    for (int i = 1; i <= rows; ++i) {
        HardeningCurveRow row;
        row.index = i;
        if (i <= m_max) row.fip = 1.0 / i;
        for (int k : k_list) {
            if (i >= k && i <= n_max) {
                const double kd = k;
                const double mean = kd + kd * (h[static_cast<std::size_t>(i)] - h[static_cast<std::size_t>(k)]);
                const double var =
                    kd + kd * kd * (h2[static_cast<std::size_t>(i)] - h2[static_cast<std::size_t>(k)]);
                row.flp.push_back(var / (mean * mean));
            } else {
                row.flp.push_back(std::nullopt);
            }
        }
        table.push_back(std::move(row));
    }
    return table;
}

}  // namespace flexmimo
