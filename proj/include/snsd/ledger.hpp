#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "snsd/noise.hpp"
#include "snsd/operators.hpp"

namespace snsd {

/// One per-step record of every energy functional the estimates track.
struct EnergyLedgerRow {
    double t = 0.0;
    double h_norm_sq = 0.0;            // |u|_H^2
    double v_norm_sq = 0.0;            // ||u||^2
    double lp_beta_norm = 0.0;         // integral |u|^{beta+1}
    double grad_h_norm_sq = 0.0;       // |grad u|_2^2 (quadrature route)
    double grad_v_norm_sq = 0.0;       // ||grad u||^2 = |Lap u|_2^2
    double mixed_dissipation = 0.0;    // integral |u|^{beta-1} |grad u|^2
    double sqrtpow_dissipation = 0.0;  // |grad |u|^{(beta+1)/2}|_2^2
    double hs_norm_sq = 0.0;           // |G(t,u)|^2_{L_Q}
    double stoch_integral_accum = 0.0; // running sum of (u, G dW)_H
};

using EnergyLedger = std::vector<EnergyLedgerRow>;

/// All field-derived entries of one row (13 transforms); the stochastic
/// accumulator is owned by the caller.
inline EnergyLedgerRow make_ledger_row(double t, const SpectralVelocity& u, double beta,
                                       const NoiseModel& model, double stoch_accum) {
    const Grid& g = u.grid();
    EnergyLedgerRow r;
    r.t = t;
    r.h_norm_sq = h_norm_sq(u);
    r.v_norm_sq = v_norm_sq(u);
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const double k2 = g.kappa2(m);
        for (int c = 0; c < 3; ++c) r.grad_v_norm_sq += k2 * k2 * std::norm(u.at(m, c));
    }
    r.grad_v_norm_sq *= g.volume();

    const PhysicalVelocity p = inverse_transform(u);
    std::array<std::vector<double>, 9> du;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) du[3 * i + a] = detail::gradient_samples(g, u, i, a);

    const std::size_t np = g.n_points();
    double lp = 0.0, gh = 0.0, mixed = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
        const double m2 = p.at(0, j) * p.at(0, j) + p.at(1, j) * p.at(1, j) +
                          p.at(2, j) * p.at(2, j);
        double grad2 = 0.0;
        for (int q = 0; q < 9; ++q) grad2 += du[q][j] * du[q][j];
        lp += std::pow(m2, (beta + 1.0) / 2.0);
        gh += grad2;
        mixed += (m2 == 0.0 ? 0.0 : std::pow(m2, (beta - 1.0) / 2.0)) * grad2;
    }
    r.lp_beta_norm = lp * g.cell_volume();
    r.grad_h_norm_sq = gh * g.cell_volume();
    r.mixed_dissipation = mixed * g.cell_volume();
    r.sqrtpow_dissipation = grad_magnitude_power_field(p, beta);
    r.hs_norm_sq = hs_norm_sq(model, t, u);
    r.stoch_integral_accum = stoch_accum;
    return r;
}

inline const char* ledger_csv_header() {
    return "t,h2,v2,lp,g_h2,g_v2,mixed,sqrtpow,hs2,stoch_acc";
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_ledger_csv(std::ostream& os, const EnergyLedger& rows) {
    os << ledger_csv_header() << "\n";
    for (const auto& r : rows) {
        os << format_g17(r.t) << ',' << format_g17(r.h_norm_sq) << ',' << format_g17(r.v_norm_sq)
           << ',' << format_g17(r.lp_beta_norm) << ',' << format_g17(r.grad_h_norm_sq) << ','
           << format_g17(r.grad_v_norm_sq) << ',' << format_g17(r.mixed_dissipation) << ','
           << format_g17(r.sqrtpow_dissipation) << ',' << format_g17(r.hs_norm_sq) << ','
           << format_g17(r.stoch_integral_accum) << "\n";
    }
}

inline EnergyLedger read_ledger_csv(std::istream& is) {
    EnergyLedger rows;
    std::string line;
    if (!std::getline(is, line) || line != ledger_csv_header())
        throw std::runtime_error("ledger csv: bad header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        EnergyLedgerRow r;
        double* fields[10] = {&r.t,
                              &r.h_norm_sq,
                              &r.v_norm_sq,
                              &r.lp_beta_norm,
                              &r.grad_h_norm_sq,
                              &r.grad_v_norm_sq,
                              &r.mixed_dissipation,
                              &r.sqrtpow_dissipation,
                              &r.hs_norm_sq,
                              &r.stoch_integral_accum};
        std::stringstream ss(line);
        std::string cell;
        for (int i = 0; i < 10; ++i) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("ledger csv: short row");
            *fields[i] = std::stod(cell);
        }
        rows.push_back(r);
    }
    return rows;
}

/// Trapezoidal time integral of one column over the whole ledger.
template <class Getter>
double ledger_time_integral(const EnergyLedger& rows, Getter get) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        s += 0.5 * (get(rows[i]) + get(rows[i + 1])) * (rows[i + 1].t - rows[i].t);
    return s;
}

} // namespace snsd
