#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "snsd/fft.hpp"

namespace snsd {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Periodic cube discretization parameters.
struct GridSpec {
    int n_per_axis = 8;
    double box_length = kTwoPi;
    double dealias_fraction = 2.0 / 3.0;

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.n_per_axis == b.n_per_axis && a.box_length == b.box_length &&
               a.dealias_fraction == b.dealias_fraction;
    }
};

using Wavevector = std::array<int, 3>;

inline int dot(const Wavevector& a, const Wavevector& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline int norm2(const Wavevector& k) { return dot(k, k); }
inline Wavevector negate(const Wavevector& k) { return {-k[0], -k[1], -k[2]}; }

/// A wavevector is canonical if it is the lexicographically positive member
/// of its {k, -k} pair (k = 0 counts as canonical).
inline bool is_canonical(const Wavevector& k) {
    if (k[0] != 0) return k[0] > 0;
    if (k[1] != 0) return k[1] > 0;
    return k[2] >= 0;
}

/// Immutable mode table and transform plans for one GridSpec.
///
/// The retained wavevector set is the dealiased sphere |k| <= kmax with
/// kmax = min(floor(dealias_fraction * n/2), n/2 - 1); the Nyquist plane is
/// always excluded so the set is symmetric under k -> -k. Modes are ordered
/// by |k|^2, ties broken lexicographically, which fixes truncation,
/// snapshot layout and reduction order once and for all.
class Grid {
public:
    explicit Grid(const GridSpec& spec) : spec_(spec), fft_(spec.n_per_axis) {
        if (spec.n_per_axis < 4 || spec.n_per_axis % 2 != 0)
            throw std::invalid_argument("grid: n_per_axis must be even and >= 4");
        if (!(spec.box_length > 0.0))
            throw std::invalid_argument("grid: box_length must be > 0");
        if (!(spec.dealias_fraction > 0.0) || spec.dealias_fraction > 1.0)
            throw std::invalid_argument("grid: dealias_fraction must be in (0,1]");

        const int n = spec.n_per_axis;
        const int half = n / 2;
        kmax_ = std::min(int(std::floor(spec.dealias_fraction * half + 1e-12)), half - 1);
        if (kmax_ < 0) kmax_ = 0;

        for (int kx = -kmax_; kx <= kmax_; ++kx)
            for (int ky = -kmax_; ky <= kmax_; ++ky)
                for (int kz = -kmax_; kz <= kmax_; ++kz) {
                    Wavevector k{kx, ky, kz};
                    if (norm2(k) <= kmax_ * kmax_) modes_.push_back(k);
                }
        std::sort(modes_.begin(), modes_.end(), [](const Wavevector& a, const Wavevector& b) {
            if (norm2(a) != norm2(b)) return norm2(a) < norm2(b);
            return a < b;
        });

        grid_index_.assign(std::size_t(n) * n * n, -1);
        for (std::size_t m = 0; m < modes_.size(); ++m)
            grid_index_[wrap_index(modes_[m])] = int(m);

        conj_index_.resize(modes_.size());
        for (std::size_t m = 0; m < modes_.size(); ++m)
            conj_index_[m] = grid_index_[wrap_index(negate(modes_[m]))];
    }

    const GridSpec& spec() const { return spec_; }
    int n() const { return spec_.n_per_axis; }
    std::size_t n_points() const {
        return std::size_t(spec_.n_per_axis) * spec_.n_per_axis * spec_.n_per_axis;
    }
    int kmax() const { return kmax_; }
    std::size_t n_modes() const { return modes_.size(); }
    const std::vector<Wavevector>& modes() const { return modes_; }
    const Wavevector& mode(std::size_t m) const { return modes_[m]; }
    int conj_mode(std::size_t m) const { return conj_index_[m]; }

    /// Mode index for k, or -1 if k is outside the retained set.
    int mode_index(const Wavevector& k) const {
        for (int c = 0; c < 3; ++c)
            if (k[c] < -spec_.n_per_axis / 2 || k[c] > spec_.n_per_axis / 2) return -1;
        return grid_index_[wrap_index(k)];
    }

    /// Physical angular wavenumber 2*pi*k / L per axis.
    double kappa() const { return kTwoPi / spec_.box_length; }
    double kappa2(std::size_t m) const { return kappa() * kappa() * norm2(modes_[m]); }

    double cell_volume() const {
        const double h = spec_.box_length / spec_.n_per_axis;
        return h * h * h;
    }
    double volume() const {
        return spec_.box_length * spec_.box_length * spec_.box_length;
    }

    /// Linear index into the n^3 c2c array for (possibly negative) k.
    std::size_t wrap_index(const Wavevector& k) const {
        const int n = spec_.n_per_axis;
        const int x = (k[0] % n + n) % n;
        const int y = (k[1] % n + n) % n;
        const int z = (k[2] % n + n) % n;
        return (std::size_t(x) * n + y) * n + z;
    }

    const Fft3d& fft() const { return fft_; }

private:
    GridSpec spec_;
    int kmax_;
    std::vector<Wavevector> modes_;
    std::vector<int> grid_index_;
    std::vector<int> conj_index_;
    Fft3d fft_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(const GridSpec& spec) {
    return std::make_shared<const Grid>(spec);
}

} // namespace snsd
