#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "snsd/field.hpp"

namespace snsd {

// Binary snapshot layout (little-endian throughout):
//   bytes 0..3   magic "SNSD"
//   u32          version (currently 1)
//   u32          n_per_axis
//   f64          box_length
//   u64          mode count
// then per mode, in the grid's canonical mode order:
//   3 x i32      wavevector k
//   6 x f64      coefficient (re0, im0, re1, im1, re2, im2)

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {
template <class T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
void read_raw(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
} // namespace detail

inline void save_snapshot(std::ostream& os, const SpectralVelocity& s) {
    const Grid& g = s.grid();
    os.write("SNSD", 4);
    detail::write_raw(os, kSnapshotVersion);
    detail::write_raw(os, std::uint32_t(g.n()));
    detail::write_raw(os, g.spec().box_length);
    detail::write_raw(os, std::uint64_t(g.n_modes()));
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        for (int c = 0; c < 3; ++c) detail::write_raw(os, std::int32_t(g.mode(m)[c]));
        for (int c = 0; c < 3; ++c) {
            detail::write_raw(os, s.at(m, c).real());
            detail::write_raw(os, s.at(m, c).imag());
        }
    }
    if (!os) throw std::runtime_error("save_snapshot: write failed");
}

inline void save_snapshot(const std::string& path, const SpectralVelocity& s) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_snapshot: cannot open " + path);
    save_snapshot(f, s);
}

/// Loads a snapshot onto a grid built from the stored header and the given
/// dealias fraction; the stored mode list must match that grid's mode table.
inline SpectralVelocity load_snapshot(std::istream& is, double dealias_fraction = 2.0 / 3.0) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SNSD", 4) != 0)
        throw std::runtime_error("load_snapshot: bad magic");
    std::uint32_t version = 0, n = 0;
    double box = 0.0;
    std::uint64_t count = 0;
    detail::read_raw(is, version);
    detail::read_raw(is, n);
    detail::read_raw(is, box);
    detail::read_raw(is, count);
    if (version != kSnapshotVersion)
        throw std::runtime_error("load_snapshot: unsupported version");

    GridPtr grid = make_grid(GridSpec{int(n), box, dealias_fraction});
    if (count != grid->n_modes())
        throw std::runtime_error("load_snapshot: mode count does not match grid");
    SpectralVelocity s(grid);
    for (std::uint64_t m = 0; m < count; ++m) {
        std::int32_t k[3];
        for (int c = 0; c < 3; ++c) detail::read_raw(is, k[c]);
        if (Wavevector{k[0], k[1], k[2]} != grid->mode(std::size_t(m)))
            throw std::runtime_error("load_snapshot: mode ordering mismatch");
        for (int c = 0; c < 3; ++c) {
            double re = 0.0, im = 0.0;
            detail::read_raw(is, re);
            detail::read_raw(is, im);
            s.at(std::size_t(m), c) = Complex{re, im};
        }
    }
    if (!is) throw std::runtime_error("load_snapshot: truncated file");
    return s;
}

inline SpectralVelocity load_snapshot(const std::string& path,
                                      double dealias_fraction = 2.0 / 3.0) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_snapshot: cannot open " + path);
    return load_snapshot(f, dealias_fraction);
}

} // namespace snsd
