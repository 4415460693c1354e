#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "snsd/ledger.hpp"
#include "snsd/noise.hpp"
#include "snsd/operators.hpp"

namespace snsd {

enum class Scheme { semi_implicit, tamed_semi_implicit };
enum class InitialKind { zero, shear, random_smooth };
enum class ForcingKind { none, shear };

struct ForcingSpec {
    ForcingKind kind = ForcingKind::none;
    double amplitude = 0.0;
};

/// Everything one trajectory needs. epsilon switches the rescaled /
/// diffusion-only steppers on; it is ignored by the plain step.
struct SimConfig {
    GridSpec grid;
    DampingParams damping;
    double mu = 1.0;
    NoiseModel noise;
    ForcingSpec forcing;
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::semi_implicit;
    std::optional<double> epsilon;
    std::uint64_t seed = 0;
    InitialKind initial = InitialKind::zero;
    double initial_amplitude = 1.0;

    void validate() const {
        damping.validate();
        if (!(mu > 0.0)) throw std::invalid_argument("sim: mu must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be > 0");
        if (t_end < 0.0) throw std::invalid_argument("sim: t_end must be >= 0");
        if (t_end > 0.0 && dt > t_end + 1e-12) throw std::invalid_argument("sim: dt must be <= t_end");
        if (epsilon && (!(*epsilon > 0.0) || *epsilon > 1.0))
            throw std::invalid_argument("sim: epsilon must be in (0,1]");
    }

    /// dt * mu * max kappa^2, the stiffness the implicit Stokes factor absorbs.
    double stability_ratio() const {
        const Grid g(grid);
        return dt * mu * g.kappa() * g.kappa() * g.kmax() * g.kmax();
    }

    std::size_t n_steps() const { return std::size_t(std::llround(t_end / dt)); }
};

struct SimState {
    double t = 0.0;
    SpectralVelocity u;
    std::int64_t step_index = 0;
};

/// Two trajectories driven by the same increments, plus the accumulated
/// weight exponent r(t) = a * int ||u2||^4 ds.
struct TwinState {
    double t = 0.0;
    SpectralVelocity u1;
    SpectralVelocity u2;
    double r_accum = 0.0;
    double a_coeff = 1.0;
    std::int64_t step_index = 0;

    double weighted_difference_h2() const {
        return std::exp(-r_accum) * h_norm_sq(u1 - u2);
    }
};

/// Raised when a step produces non-finite values; carries the last finite
/// state so callers can inspect where the trajectory died.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, SpectralVelocity last)
        : std::runtime_error("blow-up at t = " + std::to_string(t)),
          t_(t),
          last_finite_(std::move(last)) {}
    double t() const { return t_; }
    const SpectralVelocity& last_finite_state() const { return last_finite_; }

private:
    double t_;
    SpectralVelocity last_finite_;
};

inline SpectralVelocity make_initial_field(const SimConfig& cfg, const GridPtr& grid) {
    switch (cfg.initial) {
        case InitialKind::zero: return SpectralVelocity(grid);
        case InitialKind::shear: return make_shear_field(grid, cfg.initial_amplitude);
        case InitialKind::random_smooth:
            return make_random_smooth_field(grid, cfg.initial_amplitude,
                                            cfg.seed ^ 0xC001D00DULL);
    }
    throw std::logic_error("make_initial_field: unknown kind");
}

inline SpectralVelocity make_forcing_field(const SimConfig& cfg, const GridPtr& grid, double t) {
    (void)t; // shipped forcings are steady
    switch (cfg.forcing.kind) {
        case ForcingKind::none: return SpectralVelocity(grid);
        case ForcingKind::shear: return make_shear_field(grid, cfg.forcing.amplitude);
    }
    throw std::logic_error("make_forcing_field: unknown kind");
}

namespace detail {

/// Shared update kernel:
///   u+ = (I + drift_scale*dt*mu*kappa^2)^-1 Leray[ u - drift_scale*dt*(B(u)+g(u)-f)
///                                                   + noise_scale*G(t_noise,u)dW ]
/// The tamed variant divides the damping pointwise by
/// (1 + drift_scale*dt*alpha*|u|^{beta-1}) before analysis.
struct StepResult {
    SpectralVelocity u;
    SpectralVelocity noise_field; // noise_scale * G dW, as added
};

inline StepResult step_core(const SpectralVelocity& u, const SimConfig& cfg,
                            const WienerIncrement& dW, double drift_scale, double noise_scale,
                            double t_now, double t_noise, bool with_drift) {
    const Grid& g = u.grid();
    const GridPtr& gp = u.grid_ptr();
    const double dts = drift_scale * cfg.dt;

    SpectralVelocity bracket = u;

    if (with_drift) {
        const auto pg = physical_with_gradient(u);
        const std::size_t np = g.n_points();
        PhysicalVelocity drift_phys(gp);
        const double alpha = cfg.damping.alpha;
        const double beta = cfg.damping.beta;
        const bool tamed = cfg.scheme == Scheme::tamed_semi_implicit;
        for (std::size_t j = 0; j < np; ++j) {
            const double ux = pg.u.at(0, j), uy = pg.u.at(1, j), uz = pg.u.at(2, j);
            const double m2 = ux * ux + uy * uy + uz * uz;
            const double mag_pow = m2 == 0.0 ? 0.0 : std::pow(m2, (beta - 1.0) / 2.0);
            double damp_factor = alpha * mag_pow;
            if (tamed) damp_factor /= 1.0 + dts * alpha * mag_pow;
            for (int i = 0; i < 3; ++i) {
                const double adv = ux * pg.du[3 * i + 0][j] + uy * pg.du[3 * i + 1][j] +
                                   uz * pg.du[3 * i + 2][j];
                drift_phys.at(i, j) = adv + damp_factor * pg.u.at(i, j);
            }
        }
        SpectralVelocity drift = forward_transform(drift_phys); // gather = dealias
        if (cfg.forcing.kind != ForcingKind::none) drift -= make_forcing_field(cfg, gp, t_now);
        drift *= dts;
        bracket -= drift;
    }

    StepResult res{SpectralVelocity(gp), SpectralVelocity(gp)};
    if (noise_scale != 0.0) {
        res.noise_field = diffusion_apply(cfg.noise, t_noise, u, dW);
        res.noise_field *= noise_scale;
        bracket += res.noise_field;
    }

    bracket = leray_project(bracket);
    if (with_drift) {
        const double c = dts * cfg.mu * g.kappa() * g.kappa();
        for (std::size_t m = 0; m < g.n_modes(); ++m) {
            const double f = 1.0 / (1.0 + c * norm2(g.mode(m)));
            for (int comp = 0; comp < 3; ++comp) bracket.at(m, comp) *= f;
        }
    }
    enforce_hermitian(bracket);
    if (!all_finite(bracket)) throw BlowUpError(t_now, u);
    res.u = std::move(bracket);
    return res;
}

} // namespace detail

/// One semi-implicit Euler-Maruyama step of the full dynamics.
inline SimState step(const SimState& state, const SimConfig& cfg, const WienerIncrement& dW) {
    auto r = detail::step_core(state.u, cfg, dW, 1.0, 1.0, state.t, state.t, true);
    return SimState{state.t + cfg.dt, std::move(r.u), state.step_index + 1};
}

/// Small-time rescaled dynamics: drift scaled by epsilon, noise by
/// sqrt(epsilon), diffusion evaluated at time epsilon * s.
inline SimState step_rescaled(const SimState& state, const SimConfig& cfg,
                              const WienerIncrement& dW) {
    if (!cfg.epsilon) throw std::invalid_argument("step_rescaled: epsilon not set");
    const double eps = *cfg.epsilon;
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("step_rescaled: epsilon must be in (0,1]");
    auto r = detail::step_core(state.u, cfg, dW, eps, std::sqrt(eps), state.t,
                               eps * state.t, true);
    return SimState{state.t + cfg.dt, std::move(r.u), state.step_index + 1};
}

/// Pure-noise comparison process: no drift, Leray projection retained.
inline SimState step_diffusion_only(const SimState& state, const SimConfig& cfg,
                                    const WienerIncrement& dW) {
    if (!cfg.epsilon) throw std::invalid_argument("step_diffusion_only: epsilon not set");
    const double eps = *cfg.epsilon;
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("step_diffusion_only: epsilon must be in (0,1]");
    auto r = detail::step_core(state.u, cfg, dW, 0.0, std::sqrt(eps), state.t,
                               eps * state.t, false);
    return SimState{state.t + cfg.dt, std::move(r.u), state.step_index + 1};
}

/// Advance both twins with the same increment; r accumulates
/// a * ||u2||^4 * dt with the left endpoint (the Ito convention).
inline TwinState twin_step(const TwinState& tw, const SimConfig& cfg, const WienerIncrement& dW) {
    const double v2 = v_norm_sq(tw.u2);
    auto r1 = detail::step_core(tw.u1, cfg, dW, 1.0, 1.0, tw.t, tw.t, true);
    auto r2 = detail::step_core(tw.u2, cfg, dW, 1.0, 1.0, tw.t, tw.t, true);
    return TwinState{tw.t + cfg.dt,       std::move(r1.u), std::move(r2.u),
                     tw.r_accum + tw.a_coeff * v2 * v2 * cfg.dt, tw.a_coeff,
                     tw.step_index + 1};
}

struct TrajectorySummary {
    SimState final_state;
    bool blew_up = false;
    double blow_up_time = 0.0;
};

/// Runs the full dynamics from t = 0 to t_end, emitting one ledger row per
/// state (including the initial one; t_end = 0 yields exactly that row).
/// Blow-up is reported in the summary, with rows up to the last finite state.
inline TrajectorySummary integrate(const SimConfig& cfg, RngStream& stream,
                                   const std::function<void(const EnergyLedgerRow&)>& sink) {
    cfg.validate();
    GridPtr grid = make_grid(cfg.grid);
    SimState state{0.0, make_initial_field(cfg, grid), 0};
    double stoch_acc = 0.0;
    if (sink) sink(make_ledger_row(0.0, state.u, cfg.damping.beta, cfg.noise, stoch_acc));
    const std::size_t n = cfg.n_steps();
    for (std::size_t i = 0; i < n; ++i) {
        stream.begin_block(std::uint64_t(i));
        const WienerIncrement dW = sample_increment(cfg.noise, cfg.dt, stream);
        try {
            auto r = detail::step_core(state.u, cfg, dW, 1.0, 1.0, state.t, state.t, true);
            stoch_acc += h_inner(state.u, r.noise_field);
            state = SimState{state.t + cfg.dt, std::move(r.u), state.step_index + 1};
        } catch (const BlowUpError& e) {
            return TrajectorySummary{std::move(state), true, e.t()};
        }
        if (sink) sink(make_ledger_row(state.t, state.u, cfg.damping.beta, cfg.noise, stoch_acc));
    }
    return TrajectorySummary{std::move(state), false, 0.0};
}

} // namespace snsd
