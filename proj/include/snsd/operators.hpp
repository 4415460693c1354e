#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "snsd/field.hpp"

namespace snsd {

/// Damping law parameters for g(u) = alpha |u|^{beta-1} u.
struct DampingParams {
    double alpha = 1.0;
    double beta = 3.0;

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("damping: alpha must be > 0");
        if (!(beta >= 1.0)) throw std::invalid_argument("damping: beta must be >= 1");
    }

    /// Strong-solution admissibility: beta > 3 with any alpha > 0, and
    /// alpha >= 1/2 as beta = 3.
    bool strong_mode_ok() const { return beta > 3.0 || (beta == 3.0 && alpha >= 0.5); }
};

/// Pointwise 3x3 Jacobians of the damping law, row-major per grid point.
struct JacobianField {
    GridPtr grid;
    std::vector<std::array<double, 9>> m;
};

// ---------------------------------------------------------------------------
// Stokes operator

/// mu * (-Laplacian) acting mode-by-mode; preserves divergence-freeness
/// because the symbol is scalar.
inline SpectralVelocity stokes_apply(const SpectralVelocity& u, double mu) {
    if (mu < 0.0) throw std::invalid_argument("stokes_apply: mu must be >= 0");
    const Grid& g = u.grid();
    SpectralVelocity out(u.grid_ptr());
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const double s = mu * g.kappa2(m);
        for (int c = 0; c < 3; ++c) out.at(m, c) = s * u.at(m, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// convective term and trilinear form

namespace detail {

struct PhysicalGradient {
    PhysicalVelocity u;
    std::array<std::vector<double>, 9> du; // du[3*i + a] = d u_i / d x_a
};

inline PhysicalGradient physical_with_gradient(const SpectralVelocity& s) {
    PhysicalGradient r{inverse_transform(s), {}};
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) r.du[3 * i + a] = gradient_samples(s.grid(), s, i, a);
    return r;
}

} // namespace detail

/// Dealiased, Leray-projected (u . grad) u, computed pseudo-spectrally in
/// advective form. Truncation back onto the retained sphere is the 2/3-rule
/// dealiasing; with kmax < n/3 quadratic products are alias-free.
inline SpectralVelocity convective_term(const SpectralVelocity& u) {
    const Grid& g = u.grid();
    const auto pg = detail::physical_with_gradient(u);
    const std::size_t np = g.n_points();
    PhysicalVelocity adv(u.grid_ptr());
    for (int i = 0; i < 3; ++i) {
        double* out = adv.component(i);
        for (std::size_t j = 0; j < np; ++j) {
            out[j] = pg.u.at(0, j) * pg.du[3 * i + 0][j] + pg.u.at(1, j) * pg.du[3 * i + 1][j] +
                     pg.u.at(2, j) * pg.du[3 * i + 2][j];
        }
    }
    return leray_project(forward_transform(adv));
}

/// b(u,v,w) = integral (u . grad v) . w dx by collocation quadrature.
inline double trilinear_form(const SpectralVelocity& u, const SpectralVelocity& v,
                             const SpectralVelocity& w) {
    const Grid& g = u.grid();
    const PhysicalVelocity up = inverse_transform(u);
    const PhysicalVelocity wp = inverse_transform(w);
    std::array<std::vector<double>, 9> dv;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) dv[3 * i + a] = detail::gradient_samples(g, v, i, a);
    const std::size_t np = g.n_points();
    double sum = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
        for (int i = 0; i < 3; ++i) {
            const double adv = up.at(0, j) * dv[3 * i + 0][j] + up.at(1, j) * dv[3 * i + 1][j] +
                               up.at(2, j) * dv[3 * i + 2][j];
            sum += adv * wp.at(i, j);
        }
    }
    return sum * g.cell_volume();
}

// ---------------------------------------------------------------------------
// damping nonlinearity

/// g on a single vector value.
inline std::array<double, 3> damping_value(const std::array<double, 3>& u,
                                           const DampingParams& d) {
    const double m2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    if (m2 == 0.0) return {0.0, 0.0, 0.0};
    const double f = d.alpha * std::pow(m2, (d.beta - 1.0) / 2.0);
    return {f * u[0], f * u[1], f * u[2]};
}

inline PhysicalVelocity damping_apply(const PhysicalVelocity& p, const DampingParams& d) {
    d.validate();
    const Grid& g = p.grid();
    PhysicalVelocity out(p.grid_ptr());
    const std::size_t np = g.n_points();
    for (std::size_t j = 0; j < np; ++j) {
        const std::array<double, 3> u{p.at(0, j), p.at(1, j), p.at(2, j)};
        const auto v = damping_value(u, d);
        for (int c = 0; c < 3; ++c) out.at(c, j) = v[c];
    }
    return out;
}

/// Closed-form Jacobian alpha |u|^{beta-3} ((beta-1) u u^T + |u|^2 I),
/// extended by 0 at u = 0.
inline std::array<double, 9> damping_jacobian_value(const std::array<double, 3>& u,
                                                    const DampingParams& d) {
    const double m2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    std::array<double, 9> J{};
    if (m2 == 0.0) return J;
    const double f = d.alpha * std::pow(m2, (d.beta - 3.0) / 2.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = (d.beta - 1.0) * u[i] * u[j];
            if (i == j) v += m2;
            J[3 * i + j] = f * v;
        }
    return J;
}

inline JacobianField damping_jacobian(const PhysicalVelocity& p, const DampingParams& d) {
    d.validate();
    JacobianField out{p.grid_ptr(), {}};
    const std::size_t np = p.grid().n_points();
    out.m.resize(np);
    for (std::size_t j = 0; j < np; ++j)
        out.m[j] = damping_jacobian_value({p.at(0, j), p.at(1, j), p.at(2, j)}, d);
    return out;
}

/// (g(u) - g(v)) . (u - v); nonnegative up to rounding by monotonicity.
inline double damping_monotonicity_check(const std::array<double, 3>& u,
                                         const std::array<double, 3>& v,
                                         const DampingParams& d) {
    const auto gu = damping_value(u, d);
    const auto gv = damping_value(v, d);
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += (gu[c] - gv[c]) * (u[c] - v[c]);
    return s;
}

/// Local Lipschitz split |g(u)-g(v)| <= alpha|u|^{beta-1}|u-v|
///   + C alpha |v| (|u|^{beta-2} + |v|^{beta-2}) |u-v|  with C = beta.
/// Returns (lhs, rhs). Requires beta >= 2 for the |.|^{beta-2} factors.
inline std::pair<double, double> damping_local_lipschitz_check(const std::array<double, 3>& u,
                                                               const std::array<double, 3>& v,
                                                               const DampingParams& d) {
    if (d.beta < 2.0)
        throw std::invalid_argument("damping_local_lipschitz_check: requires beta >= 2");
    const auto gu = damping_value(u, d);
    const auto gv = damping_value(v, d);
    double lhs = 0.0, diff = 0.0, nu = 0.0, nv = 0.0;
    for (int c = 0; c < 3; ++c) {
        lhs += (gu[c] - gv[c]) * (gu[c] - gv[c]);
        diff += (u[c] - v[c]) * (u[c] - v[c]);
        nu += u[c] * u[c];
        nv += v[c] * v[c];
    }
    lhs = std::sqrt(lhs);
    diff = std::sqrt(diff);
    nu = std::sqrt(nu);
    nv = std::sqrt(nv);
    const double C = d.beta;
    auto powz = [](double x, double e) { return x == 0.0 ? 0.0 : std::pow(x, e); };
    const double rhs = d.alpha * powz(nu, d.beta - 1.0) * diff +
                       C * d.alpha * nv * (powz(nu, d.beta - 2.0) + powz(nv, d.beta - 2.0)) * diff;
    return {lhs, rhs};
}

} // namespace snsd
