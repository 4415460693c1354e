#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "snsd/grid.hpp"
#include "snsd/rng.hpp"

namespace snsd {

using Complex = std::complex<double>;

/// Velocity field as coefficients on the retained wavevector set.
/// Storage is mode-major: coefficient of component c at mode m is
/// coeff()[3*m + c]. Valid fields are Hermitian-symmetric, divergence-free
/// and zero-mean; "raw" fields (e.g. fresh transforms of arbitrary data)
/// may violate the latter two until projected.
class SpectralVelocity {
public:
    explicit SpectralVelocity(GridPtr grid)
        : grid_(std::move(grid)), coeff_(3 * grid_->n_modes(), Complex{0.0, 0.0}) {}

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    Complex& at(std::size_t mode, int comp) { return coeff_[3 * mode + comp]; }
    const Complex& at(std::size_t mode, int comp) const { return coeff_[3 * mode + comp]; }

    std::vector<Complex>& coeff() { return coeff_; }
    const std::vector<Complex>& coeff() const { return coeff_; }

    SpectralVelocity& operator+=(const SpectralVelocity& o) {
        for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
        return *this;
    }
    SpectralVelocity& operator-=(const SpectralVelocity& o) {
        for (std::size_t i = 0; i < coeff_.size(); ++i) coeff_[i] -= o.coeff_[i];
        return *this;
    }
    SpectralVelocity& operator*=(double s) {
        for (auto& c : coeff_) c *= s;
        return *this;
    }

    friend SpectralVelocity operator+(SpectralVelocity a, const SpectralVelocity& b) { return a += b; }
    friend SpectralVelocity operator-(SpectralVelocity a, const SpectralVelocity& b) { return a -= b; }
    friend SpectralVelocity operator*(double s, SpectralVelocity a) { return a *= s; }

private:
    GridPtr grid_;
    std::vector<Complex> coeff_;
};

/// Velocity samples on the n^3 collocation grid, component-major:
/// component c at point j is samples()[c*n_points + j].
class PhysicalVelocity {
public:
    explicit PhysicalVelocity(GridPtr grid)
        : grid_(std::move(grid)), samples_(3 * grid_->n_points(), 0.0) {}

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    double& at(int comp, std::size_t point) { return samples_[comp * grid_->n_points() + point]; }
    const double& at(int comp, std::size_t point) const {
        return samples_[comp * grid_->n_points() + point];
    }
    const double* component(int comp) const { return samples_.data() + comp * grid_->n_points(); }
    double* component(int comp) { return samples_.data() + comp * grid_->n_points(); }

    std::vector<double>& samples() { return samples_; }
    const std::vector<double>& samples() const { return samples_; }

    bool all_finite() const {
        for (double v : samples_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    GridPtr grid_;
    std::vector<double> samples_;
};

/// Norms and seminorms of one field. h/v entries come from Parseval sums,
/// lp from collocation quadrature; grad_v_norm_sq is the next spectral rung
/// (the Laplacian's L2 norm squared on the periodic box).
struct NormReport {
    double h_norm_sq = 0.0;      // |u|_H^2
    double v_norm_sq = 0.0;      // ||u||^2 = |grad u|_2^2 (spectral route)
    double lp_norm = 0.0;        // integral of |u|^{beta+1}
    double grad_h_norm_sq = 0.0; // |grad u|_2^2 (quadrature route)
    double grad_v_norm_sq = 0.0; // ||grad u||^2 = |Lap u|_2^2
};

// ---------------------------------------------------------------------------
// scalar transforms (shared by field ops and diagnostics)

namespace detail {

/// Unnormalized physical samples of one spectral scalar: out_j = sum_k c_k e^{i kappa k.x_j}.
inline std::vector<Complex> scatter_full(const Grid& g, const SpectralVelocity& s, int comp) {
    std::vector<Complex> buf(g.n_points(), Complex{0.0, 0.0});
    for (std::size_t m = 0; m < g.n_modes(); ++m) buf[g.wrap_index(g.mode(m))] = s.at(m, comp);
    return buf;
}

inline void backward_to_real(const Grid& g, std::vector<Complex>& buf, double* out) {
    g.fft().backward(buf.data());
    const std::size_t np = g.n_points();
    for (std::size_t j = 0; j < np; ++j) out[j] = buf[j].real();
}

/// Forward transform of real samples, normalized so coefficients are
/// amplitudes of e^{i kappa k.x}; gathered onto the retained modes only.
inline void forward_gather(const Grid& g, const double* in, SpectralVelocity& s, int comp) {
    std::vector<Complex> buf(g.n_points());
    const std::size_t np = g.n_points();
    for (std::size_t j = 0; j < np; ++j) buf[j] = Complex{in[j], 0.0};
    g.fft().forward(buf.data());
    const double scale = 1.0 / double(np);
    for (std::size_t m = 0; m < g.n_modes(); ++m)
        s.at(m, comp) = buf[g.wrap_index(g.mode(m))] * scale;
}

/// Spectrally differentiate component comp of s along axis and return the
/// real physical samples.
inline std::vector<double> gradient_samples(const Grid& g, const SpectralVelocity& s, int comp,
                                            int axis) {
    std::vector<Complex> buf(g.n_points(), Complex{0.0, 0.0});
    const double kap = g.kappa();
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const Complex ik{0.0, kap * g.mode(m)[axis]};
        buf[g.wrap_index(g.mode(m))] = ik * s.at(m, comp);
    }
    std::vector<double> out(g.n_points());
    backward_to_real(g, buf, out.data());
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// transforms

/// Collocation analysis onto the retained modes (truncation acts as the
/// dealiasing filter). Rejects non-finite samples.
inline SpectralVelocity forward_transform(const PhysicalVelocity& p) {
    if (!p.all_finite()) throw std::invalid_argument("forward_transform: non-finite samples");
    SpectralVelocity s(p.grid_ptr());
    for (int c = 0; c < 3; ++c) detail::forward_gather(p.grid(), p.component(c), s, c);
    return s;
}

inline PhysicalVelocity inverse_transform(const SpectralVelocity& s) {
    PhysicalVelocity p(s.grid_ptr());
    for (int c = 0; c < 3; ++c) {
        auto buf = detail::scatter_full(s.grid(), s, c);
        detail::backward_to_real(s.grid(), buf, p.component(c));
    }
    return p;
}

// ---------------------------------------------------------------------------
// projection and structure checks

/// Per-mode orthogonal projection onto divergence-free fields; the k = 0
/// mode is forced to zero (zero-mean gauge).
inline SpectralVelocity leray_project(const SpectralVelocity& raw) {
    const Grid& g = raw.grid();
    SpectralVelocity out(raw.grid_ptr());
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const Wavevector& k = g.mode(m);
        const int k2 = norm2(k);
        if (k2 == 0) {
            for (int c = 0; c < 3; ++c) out.at(m, c) = Complex{0.0, 0.0};
            continue;
        }
        const Complex kdotc = double(k[0]) * raw.at(m, 0) + double(k[1]) * raw.at(m, 1) +
                              double(k[2]) * raw.at(m, 2);
        const Complex f = kdotc / double(k2);
        for (int c = 0; c < 3; ++c) out.at(m, c) = raw.at(m, c) - double(k[c]) * f;
    }
    return out;
}

/// max_k |k . coeff(k)| / (kmax * max_k |coeff(k)|); 0 for the zero field.
inline double divergence_residual(const SpectralVelocity& s) {
    const Grid& g = s.grid();
    double worst = 0.0, scale = 0.0;
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const Wavevector& k = g.mode(m);
        const Complex kdotc = double(k[0]) * s.at(m, 0) + double(k[1]) * s.at(m, 1) +
                              double(k[2]) * s.at(m, 2);
        worst = std::max(worst, std::abs(kdotc));
        double mag = 0.0;
        for (int c = 0; c < 3; ++c) mag = std::max(mag, std::abs(s.at(m, c)));
        scale = std::max(scale, mag);
    }
    if (scale == 0.0) return 0.0;
    return worst / (scale * std::max(1, g.kmax()));
}

inline double hermitian_residual(const SpectralVelocity& s) {
    const Grid& g = s.grid();
    double worst = 0.0, scale = 0.0;
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const int mc = g.conj_mode(m);
        for (int c = 0; c < 3; ++c) {
            worst = std::max(worst, std::abs(s.at(m, c) - std::conj(s.at(std::size_t(mc), c))));
            scale = std::max(scale, std::abs(s.at(m, c)));
        }
    }
    return scale == 0.0 ? 0.0 : worst / scale;
}

/// Overwrite each non-canonical coefficient with the conjugate of its pair,
/// removing rounding-level symmetry drift.
inline void enforce_hermitian(SpectralVelocity& s) {
    const Grid& g = s.grid();
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        if (is_canonical(g.mode(m))) continue;
        const int mc = g.conj_mode(m);
        for (int c = 0; c < 3; ++c) s.at(m, c) = std::conj(s.at(std::size_t(mc), c));
    }
}

inline bool all_finite(const SpectralVelocity& s) {
    for (const Complex& c : s.coeff())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// ---------------------------------------------------------------------------
// norms

inline double h_norm_sq(const SpectralVelocity& s) {
    const Grid& g = s.grid();
    double sum = 0.0;
    for (std::size_t m = 0; m < g.n_modes(); ++m)
        for (int c = 0; c < 3; ++c) sum += std::norm(s.at(m, c));
    return g.volume() * sum;
}

inline double v_norm_sq(const SpectralVelocity& s) {
    const Grid& g = s.grid();
    double sum = 0.0;
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const double k2 = g.kappa2(m);
        for (int c = 0; c < 3; ++c) sum += k2 * std::norm(s.at(m, c));
    }
    return g.volume() * sum;
}

inline double h_inner(const SpectralVelocity& a, const SpectralVelocity& b) {
    const Grid& g = a.grid();
    double sum = 0.0;
    for (std::size_t m = 0; m < g.n_modes(); ++m)
        for (int c = 0; c < 3; ++c) {
            const Complex p = a.at(m, c) * std::conj(b.at(m, c));
            sum += p.real();
        }
    return g.volume() * sum;
}

/// All NormReport entries. The gradient quadrature route costs 9 transforms;
/// beta < 1 is rejected because |u|^{beta+1} quadrature would not match any
/// admissible damping exponent.
inline NormReport compute_norms(const SpectralVelocity& s, double beta) {
    if (beta < 1.0) throw std::invalid_argument("compute_norms: beta must be >= 1");
    const Grid& g = s.grid();
    NormReport r;
    r.h_norm_sq = h_norm_sq(s);
    r.v_norm_sq = v_norm_sq(s);
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const double k2 = g.kappa2(m);
        for (int c = 0; c < 3; ++c) r.grad_v_norm_sq += k2 * k2 * std::norm(s.at(m, c));
    }
    r.grad_v_norm_sq *= g.volume();

    const PhysicalVelocity p = inverse_transform(s);
    const std::size_t np = g.n_points();
    double lp = 0.0;
    const double expo = (beta + 1.0) / 2.0;
    for (std::size_t j = 0; j < np; ++j) {
        const double m2 = p.at(0, j) * p.at(0, j) + p.at(1, j) * p.at(1, j) +
                          p.at(2, j) * p.at(2, j);
        lp += std::pow(m2, expo);
    }
    r.lp_norm = lp * g.cell_volume();

    double gh = 0.0;
    for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a) {
            const auto d = detail::gradient_samples(g, s, c, a);
            for (std::size_t j = 0; j < np; ++j) gh += d[j] * d[j];
        }
    r.grad_h_norm_sq = gh * g.cell_volume();
    return r;
}

/// |grad |u|^{(beta+1)/2}|_2^2: form w = |u|^{(beta+1)/2} pointwise, analyze,
/// and sum kappa^2 |w_k|^2.
inline double grad_magnitude_power_field(const PhysicalVelocity& p, double beta) {
    if (beta < 1.0) throw std::invalid_argument("grad_magnitude_power_field: beta must be >= 1");
    const Grid& g = p.grid();
    const std::size_t np = g.n_points();
    std::vector<Complex> buf(np);
    const double expo = (beta + 1.0) / 4.0; // applied to |u|^2
    for (std::size_t j = 0; j < np; ++j) {
        const double m2 = p.at(0, j) * p.at(0, j) + p.at(1, j) * p.at(1, j) +
                          p.at(2, j) * p.at(2, j);
        buf[j] = Complex{std::pow(m2, expo), 0.0};
    }
    g.fft().forward(buf.data());
    const double scale = 1.0 / double(np);
    double sum = 0.0;
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const Complex w = buf[g.wrap_index(g.mode(m))] * scale;
        sum += g.kappa2(m) * std::norm(w);
    }
    return g.volume() * sum;
}

// ---------------------------------------------------------------------------
// named initial data

/// u = (amp * sin(kappa y), 0, 0): a single shear mode pair.
inline SpectralVelocity make_shear_field(const GridPtr& grid, double amp) {
    SpectralVelocity s(grid);
    const int mp = grid->mode_index({0, 1, 0});
    const int mn = grid->mode_index({0, -1, 0});
    if (mp < 0 || mn < 0) throw std::invalid_argument("make_shear_field: mode (0,1,0) not retained");
    s.at(std::size_t(mp), 0) = Complex{0.0, -0.5 * amp};
    s.at(std::size_t(mn), 0) = Complex{0.0, 0.5 * amp};
    return s;
}

namespace detail {
inline std::uint64_t mode_stream_id(const Wavevector& k) {
    return (std::uint64_t(k[0] + 512) << 40) | (std::uint64_t(k[1] + 512) << 20) |
           std::uint64_t(k[2] + 512);
}
} // namespace detail

/// Divergence-free random field with |k|^{-decay} spectrum. Coefficients are
/// a pure function of (seed, k), so coarser grids see exactly the truncation
/// of the same underlying field; the amplitude is normalized against a fixed
/// reference cutoff (not the grid) for the same reason.
inline SpectralVelocity make_random_smooth_field(const GridPtr& grid, double amp,
                                                 std::uint64_t seed, double decay = 3.0) {
    SpectralVelocity s(grid);
    const Grid& g = *grid;
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        const Wavevector& k = g.mode(m);
        if (norm2(k) == 0 || !is_canonical(k)) continue;
        RngStream rs(seed, detail::mode_stream_id(k));
        rs.begin_block(0);
        const double mag = std::pow(double(norm2(k)), -decay / 2.0);
        for (int c = 0; c < 3; ++c)
            s.at(m, c) = mag * Complex{rs.next_gaussian(), rs.next_gaussian()};
    }
    enforce_hermitian(s);
    s = leray_project(s);

    // Reference V-norm over |k| <= 8 of the un-truncated coefficient law;
    // depends only on (seed, decay), not on this grid.
    double ref = 0.0;
    for (int kx = -8; kx <= 8; ++kx)
        for (int ky = -8; ky <= 8; ++ky)
            for (int kz = -8; kz <= 8; ++kz) {
                Wavevector k{kx, ky, kz};
                const int k2 = norm2(k);
                if (k2 == 0 || k2 > 64 || !is_canonical(k)) continue;
                RngStream rs(seed, detail::mode_stream_id(k));
                rs.begin_block(0);
                const double mag = std::pow(double(k2), -decay / 2.0);
                Complex c3[3];
                for (int c = 0; c < 3; ++c)
                    c3[c] = mag * Complex{rs.next_gaussian(), rs.next_gaussian()};
                // Leray-projected magnitude of this pair, weighted by kappa^2.
                Complex kd = double(k[0]) * c3[0] + double(k[1]) * c3[1] + double(k[2]) * c3[2];
                double mag2 = 0.0;
                for (int c = 0; c < 3; ++c) mag2 += std::norm(c3[c] - double(k[c]) * kd / double(k2));
                const double kap2 = g.kappa() * g.kappa() * k2;
                ref += 2.0 * kap2 * mag2; // both members of the pair
            }
    ref *= g.volume();
    if (ref > 0.0) s *= amp / std::sqrt(ref);
    return s;
}

} // namespace snsd
