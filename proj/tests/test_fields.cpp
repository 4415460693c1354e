#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "snsd/field.hpp"
#include "snsd/snapshot.hpp"

using namespace snsd;
using Catch::Approx;

namespace {

GridPtr grid8() {
    static GridPtr g = make_grid(GridSpec{8, kTwoPi, 2.0 / 3.0});
    return g;
}

/// Random Hermitian raw field (not projected); reproducible from the seed.
SpectralVelocity random_raw_field(const GridPtr& grid, std::uint64_t seed) {
    SpectralVelocity s(grid);
    RngStream rs(seed, 0);
    rs.begin_block(0);
    const Grid& g = *grid;
    for (std::size_t m = 0; m < g.n_modes(); ++m) {
        if (!is_canonical(g.mode(m))) continue;
        for (int c = 0; c < 3; ++c)
            s.at(m, c) = Complex{rs.next_gaussian(), rs.next_gaussian()};
    }
    // k = 0 must be real for a Hermitian field
    const int m0 = g.mode_index({0, 0, 0});
    for (int c = 0; c < 3; ++c) s.at(std::size_t(m0), c) = Complex{s.at(std::size_t(m0), c).real(), 0.0};
    enforce_hermitian(s);
    return s;
}

SpectralVelocity random_divfree_field(const GridPtr& grid, std::uint64_t seed) {
    return leray_project(random_raw_field(grid, seed));
}

} // namespace

TEST_CASE("grid retained set is symmetric and ordered", "[fields]") {
    auto g = grid8();
    REQUIRE(g->kmax() == 2);
    REQUIRE(g->n_modes() >= 1);
    for (std::size_t m = 0; m < g->n_modes(); ++m) {
        REQUIRE(g->conj_mode(m) >= 0); // closed under k -> -k
        if (m > 0) {
            REQUIRE(norm2(g->mode(m - 1)) <= norm2(g->mode(m)));
        }
    }
    REQUIRE(g->mode(0) == Wavevector{0, 0, 0});
}

TEST_CASE("grid rejects bad specs", "[fields]") {
    REQUIRE_THROWS_AS(make_grid(GridSpec{3, kTwoPi, 2.0 / 3.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(GridSpec{8, -1.0, 2.0 / 3.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(GridSpec{8, kTwoPi, 0.0}), std::invalid_argument);
}

TEST_CASE("constant field transforms to the DC mode", "[fields]") {
    auto g = grid8();
    PhysicalVelocity p(g);
    for (std::size_t j = 0; j < g->n_points(); ++j) p.at(0, j) = 1.0;
    const SpectralVelocity s = forward_transform(p);
    const int m0 = g->mode_index({0, 0, 0});
    REQUIRE(s.at(std::size_t(m0), 0).real() == Approx(1.0).margin(1e-14));
    double offdc = 0.0;
    for (std::size_t m = 0; m < g->n_modes(); ++m) {
        if (int(m) == m0) continue;
        for (int c = 0; c < 3; ++c) offdc = std::max(offdc, std::abs(s.at(m, c)));
    }
    REQUIRE(offdc < 1e-14);
}

TEST_CASE("forward transform rejects non-finite samples", "[fields]") {
    auto g = grid8();
    PhysicalVelocity p(g);
    p.at(1, 5) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(forward_transform(p), std::invalid_argument);
}

TEST_CASE("sin shear field has exactly two modes with -+i/2 coefficients", "[fields]") {
    auto g = grid8();
    PhysicalVelocity p(g);
    const int n = g->n();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                const std::size_t j = (std::size_t(x) * n + y) * n + z;
                p.at(0, j) = std::sin(kTwoPi * y / n);
            }
    const SpectralVelocity s = forward_transform(p);

    // direct DFT summation oracle for the two expected modes
    auto direct = [&](const Wavevector& k, int comp) {
        Complex acc{0.0, 0.0};
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z) {
                    const std::size_t j = (std::size_t(x) * n + y) * n + z;
                    const double ph = -kTwoPi * (k[0] * x + k[1] * y + k[2] * z) / n;
                    acc += p.at(comp, j) * Complex{std::cos(ph), std::sin(ph)};
                }
        return acc / double(n * n * n);
    };

    const int mp = g->mode_index({0, 1, 0});
    const int mn = g->mode_index({0, -1, 0});
    REQUIRE(std::abs(s.at(std::size_t(mp), 0) - Complex{0.0, -0.5}) < 1e-13);
    REQUIRE(std::abs(s.at(std::size_t(mn), 0) - Complex{0.0, 0.5}) < 1e-13);
    REQUIRE(std::abs(s.at(std::size_t(mp), 0) - direct({0, 1, 0}, 0)) < 1e-13);
    REQUIRE(std::abs(s.at(std::size_t(mn), 0) - direct({0, -1, 0}, 0)) < 1e-13);

    double rest = 0.0;
    for (std::size_t m = 0; m < g->n_modes(); ++m) {
        if (int(m) == mp || int(m) == mn) continue;
        for (int c = 0; c < 3; ++c) rest = std::max(rest, std::abs(s.at(m, c)));
    }
    REQUIRE(rest < 1e-13);
}

TEST_CASE("transform round trip is the identity on band-limited fields", "[fields]") {
    auto g = grid8();
    const SpectralVelocity s = random_divfree_field(g, 11);
    const PhysicalVelocity p = inverse_transform(s);
    const SpectralVelocity s2 = forward_transform(p);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < s.coeff().size(); ++i) {
        worst = std::max(worst, std::abs(s.coeff()[i] - s2.coeff()[i]));
        scale = std::max(scale, std::abs(s.coeff()[i]));
    }
    REQUIRE(worst / scale < 1e-12);

    const PhysicalVelocity p2 = inverse_transform(s2);
    double pworst = 0.0, pscale = 0.0;
    for (std::size_t j = 0; j < p.samples().size(); ++j) {
        pworst = std::max(pworst, std::abs(p.samples()[j] - p2.samples()[j]));
        pscale = std::max(pscale, std::abs(p.samples()[j]));
    }
    REQUIRE(pworst / pscale < 1e-12);
}

TEST_CASE("round trips preserve all norm entries", "[fields]") {
    auto g = grid8();
    const SpectralVelocity s = random_divfree_field(g, 17);
    const SpectralVelocity s2 = forward_transform(inverse_transform(s));
    const NormReport a = compute_norms(s, 3.0);
    const NormReport b = compute_norms(s2, 3.0);
    REQUIRE(b.h_norm_sq == Approx(a.h_norm_sq).epsilon(1e-10));
    REQUIRE(b.v_norm_sq == Approx(a.v_norm_sq).epsilon(1e-10));
    REQUIRE(b.lp_norm == Approx(a.lp_norm).epsilon(1e-10));
    REQUIRE(b.grad_h_norm_sq == Approx(a.grad_h_norm_sq).epsilon(1e-10));
    REQUIRE(b.grad_v_norm_sq == Approx(a.grad_v_norm_sq).epsilon(1e-10));
}

TEST_CASE("leray projection kills pure gradients", "[fields]") {
    auto g = grid8();
    SpectralVelocity s(g);
    RngStream rs(3, 0);
    rs.begin_block(0);
    for (std::size_t m = 0; m < g->n_modes(); ++m) {
        if (!is_canonical(g->mode(m))) continue;
        const Complex c{rs.next_gaussian(), rs.next_gaussian()};
        for (int a = 0; a < 3; ++a) s.at(m, a) = double(g->mode(m)[a]) * c;
    }
    enforce_hermitian(s);
    const SpectralVelocity out = leray_project(s);
    double worst = 0.0;
    for (const auto& c : out.coeff()) worst = std::max(worst, std::abs(c));
    REQUIRE(worst < 1e-12);
}

TEST_CASE("leray projection fixes its range and is idempotent", "[fields]") {
    auto g = grid8();
    const SpectralVelocity u = random_divfree_field(g, 5);
    const SpectralVelocity pu = leray_project(u);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u.coeff().size(); ++i) {
        worst = std::max(worst, std::abs(u.coeff()[i] - pu.coeff()[i]));
        scale = std::max(scale, std::abs(u.coeff()[i]));
    }
    REQUIRE(worst / scale < 1e-14);
}

TEST_CASE("leray projection output is divergence-free and zero-mean", "[fields]") {
    auto g = grid8();
    const SpectralVelocity raw = random_raw_field(g, 23);
    const SpectralVelocity out = leray_project(raw);
    REQUIRE(divergence_residual(out) < 1e-12);
    const int m0 = g->mode_index({0, 0, 0});
    for (int c = 0; c < 3; ++c) REQUIRE(std::abs(out.at(std::size_t(m0), c)) == 0.0);
    REQUIRE(hermitian_residual(out) < 1e-12);
}

TEST_CASE("leray projection is self-adjoint in H", "[fields]") {
    auto g = grid8();
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        const SpectralVelocity a = random_raw_field(g, seed);
        const SpectralVelocity b = random_raw_field(g, seed + 100);
        const double lhs = h_inner(leray_project(a), b);
        const double rhs = h_inner(a, leray_project(b));
        REQUIRE(lhs == Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("norms of the zero field vanish", "[fields]") {
    auto g = grid8();
    const NormReport r = compute_norms(SpectralVelocity(g), 3.0);
    REQUIRE(r.h_norm_sq == 0.0);
    REQUIRE(r.v_norm_sq == 0.0);
    REQUIRE(r.lp_norm == 0.0);
    REQUIRE(r.grad_h_norm_sq == 0.0);
    REQUIRE(r.grad_v_norm_sq == 0.0);
}

TEST_CASE("norms of the shear field match the closed forms", "[fields]") {
    auto g = grid8();
    const SpectralVelocity s = make_shear_field(g, 1.0);
    const NormReport r = compute_norms(s, 3.0);
    const double vol = std::pow(kTwoPi, 3);
    REQUIRE(r.h_norm_sq == Approx(vol / 2).epsilon(1e-12));
    REQUIRE(r.v_norm_sq == Approx(vol / 2).epsilon(1e-12));
    REQUIRE(r.lp_norm == Approx(vol * 3.0 / 8.0).epsilon(1e-12));
    REQUIRE(r.grad_h_norm_sq == Approx(vol / 2).epsilon(1e-10));
    REQUIRE(r.grad_v_norm_sq == Approx(vol / 2).epsilon(1e-12));
}

TEST_CASE("parseval: spectral h-norm equals physical quadrature", "[fields]") {
    auto g = grid8();
    for (std::uint64_t seed = 60; seed < 65; ++seed) {
        const SpectralVelocity s = random_divfree_field(g, seed);
        const PhysicalVelocity p = inverse_transform(s);
        double quad = 0.0;
        for (std::size_t j = 0; j < g->n_points(); ++j)
            for (int c = 0; c < 3; ++c) quad += p.at(c, j) * p.at(c, j);
        quad *= g->cell_volume();
        REQUIRE(quad == Approx(h_norm_sq(s)).epsilon(1e-10));
    }
}

TEST_CASE("poincare ordering holds for zero-mean fields", "[fields]") {
    auto g = grid8();
    for (std::uint64_t seed = 70; seed < 80; ++seed) {
        const SpectralVelocity s = random_divfree_field(g, seed);
        const double c = std::pow(g->spec().box_length / kTwoPi, 2);
        REQUIRE(h_norm_sq(s) <= c * v_norm_sq(s) * (1.0 + 1e-12));
    }
}

TEST_CASE("compute_norms rejects beta < 1", "[fields]") {
    auto g = grid8();
    REQUIRE_THROWS_AS(compute_norms(SpectralVelocity(g), 0.5), std::invalid_argument);
}

TEST_CASE("grad magnitude power field closed form and edge cases", "[fields]") {
    auto g = grid8();
    SECTION("zero field") {
        REQUIRE(grad_magnitude_power_field(PhysicalVelocity(g), 3.0) == 0.0);
    }
    SECTION("constant field") {
        PhysicalVelocity p(g);
        for (std::size_t j = 0; j < g->n_points(); ++j) p.at(2, j) = 4.0;
        REQUIRE(grad_magnitude_power_field(p, 3.0) == Approx(0.0).margin(1e-20));
    }
    SECTION("shear field, beta = 3") {
        const PhysicalVelocity p = inverse_transform(make_shear_field(g, 1.0));
        const double vol = std::pow(kTwoPi, 3);
        REQUIRE(grad_magnitude_power_field(p, 3.0) == Approx(vol / 2).epsilon(1e-10));
    }
}

TEST_CASE("hermitian symmetry is preserved by module operations", "[fields]") {
    auto g = grid8();
    const SpectralVelocity s = random_divfree_field(g, 90);
    REQUIRE(hermitian_residual(s) < 1e-13);
    REQUIRE(hermitian_residual(leray_project(s)) < 1e-13);
    REQUIRE(hermitian_residual(forward_transform(inverse_transform(s))) < 1e-13);
}

TEST_CASE("snapshot round trip is exact and layout is as documented", "[fields]") {
    auto g = grid8();
    const SpectralVelocity s = random_divfree_field(g, 99);
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    save_snapshot(buf, s);

    const std::string bytes = buf.str();
    REQUIRE(bytes.substr(0, 4) == "SNSD");
    std::uint32_t version = 0, n = 0;
    std::memcpy(&version, bytes.data() + 4, 4);
    std::memcpy(&n, bytes.data() + 8, 4);
    double box = 0.0;
    std::memcpy(&box, bytes.data() + 12, 8);
    std::uint64_t count = 0;
    std::memcpy(&count, bytes.data() + 20, 8);
    REQUIRE(version == 1);
    REQUIRE(n == 8);
    REQUIRE(box == kTwoPi);
    REQUIRE(count == g->n_modes());
    REQUIRE(bytes.size() == 28 + count * (12 + 48));

    buf.seekg(0);
    const SpectralVelocity r = load_snapshot(buf);
    REQUIRE(r.grid().spec() == g->spec());
    for (std::size_t i = 0; i < s.coeff().size(); ++i) REQUIRE(r.coeff()[i] == s.coeff()[i]);
}

TEST_CASE("snapshot loader rejects corrupted headers", "[fields]") {
    auto g = grid8();
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    save_snapshot(buf, SpectralVelocity(g));
    std::string bytes = buf.str();
    bytes[0] = 'X';
    std::stringstream bad(bytes, std::ios::in | std::ios::binary);
    REQUIRE_THROWS_AS(load_snapshot(bad), std::runtime_error);
}
