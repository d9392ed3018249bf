#pragma once

namespace flexmimo {

// Three-part consumption model: amplifier dissipation, circuit power (fixed +
// per transceiver chain), and movement power proportional to travelled path.
struct PowerModel {
    double amp_efficiency = 0.4;       // eta in (0,1]
    double fixed_circuit = 10.0;       // P_fix, W
    double per_antenna_circuit = 1.0;  // P_ant per chain, W
    double move_cost = 1.0;            // c_move, W per meter of antenna travel
    double bandwidth = 1.0e6;          // B, Hz

    void validate() const;
};

// K*p/eta + P_fix + M*P_ant + c_move*path_len, W.
double total_power(const PowerModel& pm, int users, double tx_power, int antennas,
                   double path_len);

// B * SE / P, bit/Joule.
double energy_efficiency(double se, double power, double bandwidth);

}  // namespace flexmimo
