#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "threebox/experiment.hpp"
#include "threebox/pointer.hpp"
#include "threebox/weakcalc.hpp"

using namespace threebox;

namespace {

PostSelectedPointer evolve_preset(const std::string& preset,
                                  const std::string& rail, double k,
                                  double sigma = 1.0) {
    const auto [pre, post] = preset_states(preset);
    return evolve_and_postselect(pre, post, {{rail, k}}, std::nullopt,
                                 GaussianPointer{sigma});
}

}  // namespace

TEST_CASE("gaussian overlap matrix elements") {
    CHECK(gaussian_overlap(0.0, 0.0, 1.0) == 1.0);
    CHECK(gaussian_overlap(2.0, 2.0, 3.0) == 1.0);

    // quadrature of the two amplitude profiles is the reference
    const double numeric = oracle::overlap_by_quadrature(0.0, 0.69, 1.0);
    CHECK(gaussian_overlap(0.0, 0.69, 1.0) == doctest::Approx(numeric).epsilon(1e-12));
    CHECK(gaussian_overlap(0.0, 0.69, 1.0) ==
          doctest::Approx(0.94222375572067207).epsilon(1e-12));

    std::mt19937 rng(31);
    std::uniform_real_distribution<double> d(-4.0, 4.0);
    for (int t = 0; t < 50; ++t) {
        const double d1 = d(rng), d2 = d(rng);
        CHECK(gaussian_overlap(d1, d2, 1.3) == gaussian_overlap(d2, d1, 1.3));
    }
    CHECK_THROWS_AS(gaussian_overlap(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_overlap(0.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("gaussian position matrix elements") {
    CHECK(gaussian_x_moment(0.0, 0.0, 1.0) == 0.0);
    CHECK(gaussian_x_moment(2.0, 2.0, 1.0) == 2.0);

    const double numeric = oracle::x_moment_by_quadrature(0.0, 1.0, 1.0);
    CHECK(gaussian_x_moment(0.0, 1.0, 1.0) == doctest::Approx(numeric).epsilon(1e-10));
    CHECK(gaussian_x_moment(0.0, 1.0, 1.0) ==
          doctest::Approx(0.44124845129229767).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_x_moment(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("evolution without coupling keeps undisplaced branches") {
    const auto [pre, post] = three_box_states();
    const auto ps = evolve_and_postselect(pre, post, {}, std::nullopt, {});
    REQUIRE(ps.branches.size() == 3);
    Complex sum{0.0, 0.0};
    for (const auto& b : ps.branches) {
        CHECK(b.displacement == 0.0);
        CHECK(b.pol == Polarization::V);
        sum += b.weight;
    }
    CHECK(std::abs(sum - Complex{1.0 / 3.0, 0.0}) < 1e-14);
}

TEST_CASE("displacing one rail of the balanced configuration") {
    const double k = 1.7;
    const auto ps = evolve_preset("generalized", "A", k);
    REQUIRE(ps.branches.size() == 3);
    const double w = std::sqrt(0.1);
    CHECK(std::abs(ps.branches[0].weight - Complex{w, 0.0}) < 1e-12);
    CHECK(ps.branches[0].displacement == k);
    CHECK(std::abs(ps.branches[1].weight - Complex{w, 0.0}) < 1e-12);
    CHECK(ps.branches[1].displacement == 0.0);
    CHECK(std::abs(ps.branches[2].weight - Complex{-w, 0.0}) < 1e-12);
    CHECK(ps.branches[2].displacement == 0.0);
    // the two undisplaced weights cancel in every moment
    CHECK(std::abs(ps.branches[1].weight + ps.branches[2].weight) < 1e-14);
}

TEST_CASE("single-rail evolution") {
    const auto s = make_state({1.0, 0.0, 0.0});
    const auto ps = evolve_and_postselect(s, s, {{"A", 0.8}}, std::nullopt, {});
    REQUIRE(ps.branches.size() == 1);
    CHECK(std::abs(ps.branches[0].weight - Complex{1.0, 0.0}) < 1e-15);
    CHECK(ps.branches[0].displacement == 0.8);
}

TEST_CASE("evolution rejects impossible and malformed setups") {
    const auto a = make_state({1.0, 0.0});
    const auto b = make_state({0.0, 1.0});
    CHECK_THROWS_WITH_AS(evolve_and_postselect(a, b, {}, std::nullopt, {}),
                         doctest::Contains("never succeeds"), std::domain_error);
    CHECK_THROWS_AS(
        evolve_and_postselect(a, a, {{"A", 1.0}, {"A", 2.0}}, std::nullopt, {}),
        std::invalid_argument);
    CHECK_THROWS_AS(evolve_and_postselect(a, a, {{"Q", 1.0}}, std::nullopt, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        evolve_and_postselect(a, a, {}, PolarizationCoupling{"A", 2.0}, {}),
        std::invalid_argument);
}

TEST_CASE("mean shift of the displaced third rail") {
    const double k = 0.69;
    const auto r = mean_shift(evolve_preset("generalized", "C", k), k);
    // closed form (0.1 - 0.2 E)/(0.5 - 0.4 E), E = exp(-K^2/8)
    const double e = std::exp(-k * k / 8.0);
    const double expected = (0.1 - 0.2 * e) / (0.5 - 0.4 * e);
    CHECK(r.inferred == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.inferred == doctest::Approx(-0.71841762309524426).epsilon(1e-9));
    CHECK(r.inferred == doctest::Approx(-0.718).epsilon(2e-3));
    CHECK(r.success_probability ==
          doctest::Approx(0.12311049771173116).epsilon(1e-9));
}

TEST_CASE("mean shift equals the coupling on the destructive rails") {
    for (const double k : {0.1, 0.7, 2.0, -2.6}) {
        const auto ra = mean_shift(evolve_preset("generalized", "A", k), k);
        CHECK(std::abs(ra.mean_shift - k) < 1e-12);
        const auto rb = mean_shift(evolve_preset("generalized", "B", k), k);
        CHECK(std::abs(rb.mean_shift - k) < 1e-12);
    }
}

TEST_CASE("strong coupling reaches the projective limit") {
    const auto r = mean_shift(evolve_preset("generalized", "C", 20.0), 20.0);
    CHECK(r.inferred == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("zero coupling has no inferred probability") {
    const auto ps = evolve_preset("generalized", "C", 0.5);
    CHECK_THROWS_WITH_AS(mean_shift(ps, 0.0), doctest::Contains("zero coupling"),
                         std::domain_error);
    // the companion variant still reports the raw moments
    CHECK_NOTHROW(pointer_mean(ps));
}

TEST_CASE("numeric route agrees with the closed form") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> kdist(-3.0, 3.0);
    int done = 0;
    while (done < 50) {
        const auto pre = oracle::random_state(rng, 3);
        const auto post = oracle::random_state(rng, 3);
        const double k = kdist(rng);
        std::optional<PolarizationCoupling> rot;
        if (done % 2 == 1) {
            rot = PolarizationCoupling{"C", 0.3 * kdist(rng) / 3.0};
        }
        PostSelectedPointer ps;
        try {
            ps = evolve_and_postselect(pre, post, {{"B", k}}, rot, {});
        } catch (const std::domain_error&) {
            continue;
        }
        if (pointer_mean(ps).success_probability < 1e-4) continue;
        const auto closed = pointer_mean(ps);
        const auto numeric = pointer_mean_numeric(ps, std::abs(k) + 12.0, 4001);
        CHECK(std::abs(closed.mean_shift - numeric.mean_shift) < 1e-8);
        CHECK(std::abs(closed.success_probability - numeric.success_probability) <
              1e-8);
        ++done;
    }
}

TEST_CASE("numeric route on a single displaced branch") {
    PostSelectedPointer ps{{{Complex{1.0, 0.0}, 1.5, Polarization::V}}, 1.0};
    const auto r = mean_shift_numeric(ps, 1.5, 12.0 + 1.5, 2001);
    CHECK(r.mean_shift == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("the inferred probability crosses zero where the moments cancel") {
    const double k = std::sqrt(8.0 * std::log(2.0));
    const auto closed = mean_shift(evolve_preset("generalized", "C", k), k);
    CHECK(std::abs(closed.inferred) < 1e-6);
    const auto numeric =
        mean_shift_numeric(evolve_preset("generalized", "C", 2.3548), 2.3548,
                           2.3548 + 12.0, 4001);
    CHECK(std::abs(numeric.inferred) < 1e-4);
}

TEST_CASE("numeric route validates its grid") {
    const auto ps = evolve_preset("generalized", "C", 1.0);
    CHECK_THROWS_WITH_AS(pointer_mean_numeric(ps, 5.0, 4001),
                         doctest::Contains("grid coverage"), std::invalid_argument);
    CHECK_THROWS_AS(pointer_mean_numeric(ps, 13.0, 501), std::invalid_argument);
}

TEST_CASE("weak limit converges quadratically to the weak value") {
    std::mt19937 rng(19);
    int done = 0;
    while (done < 40) {
        const auto pre = oracle::random_state(rng, 3);
        const auto post = oracle::random_state(rng, 3);
        if (std::abs(inner(post, pre)) <= 0.1) continue;
        const double aw = weak_value(pre, post, {"B"}).value.real();
        const auto infer = [&](double k) {
            return mean_shift(evolve_and_postselect(pre, post, {{"B", k}},
                                                    std::nullopt, {}),
                              k)
                .inferred;
        };
        const double e1 = std::abs(infer(0.1) - aw);
        const double e2 = std::abs(infer(0.05) - aw);
        if (e1 < 1e-9) continue;  // flat error curve, ratio meaningless
        const double ratio = e1 / e2;
        CHECK(ratio > 4.0 / 1.5);
        CHECK(ratio < 4.0 * 1.5);
        ++done;
    }
}

TEST_CASE("strong limit reproduces the projective conditional probability") {
    std::mt19937 rng(47);
    int done = 0;
    while (done < 60) {
        const auto pre = oracle::random_real_state(rng, 3);
        const auto post = oracle::random_real_state(rng, 3);
        const std::string rail = pre.labels()[done % 3];
        const Complex w_r = std::conj(post.amplitude(rail)) * pre.amplitude(rail);
        const Complex rest = inner(post, pre) - w_r;
        if (std::norm(w_r) + std::norm(rest) < 1e-10) continue;
        const auto ps =
            evolve_and_postselect(pre, post, {{rail, 20.0}}, std::nullopt, {});
        CHECK(mean_shift(ps, 20.0).inferred ==
              doctest::Approx(abl_probability(pre, post, {rail})).epsilon(1e-6));
        ++done;
    }
}

TEST_CASE("cancelled undisplaced weights pin the shift to the coupling") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> mag(0.2, 1.5);
    std::uniform_real_distribution<double> kdist(-3.0, 3.0);
    for (int t = 0; t < 40; ++t) {
        // build a post state whose undisplaced weights cancel exactly
        const auto pre = make_state({mag(rng), mag(rng), mag(rng)});
        const auto post = make_state({mag(rng),
                                      1.0 / pre.amplitude(1).real(),
                                      -1.0 / pre.amplitude(2).real()});
        const Complex undisplaced =
            std::conj(post.amplitude(1)) * pre.amplitude(1) +
            std::conj(post.amplitude(2)) * pre.amplitude(2);
        REQUIRE(std::abs(undisplaced) < 1e-14);
        const double k = kdist(rng);
        if (k == 0.0) continue;
        const auto ps =
            evolve_and_postselect(pre, post, {{"A", k}}, std::nullopt, {});
        CHECK(std::abs(mean_shift(ps, k).mean_shift - k) < 1e-12);
    }
}

TEST_CASE("scaling sigma and displacements together rescales the shift") {
    std::mt19937 rng(59);
    std::uniform_real_distribution<double> kdist(0.1, 2.5);
    std::uniform_real_distribution<double> lam(0.3, 4.0);
    int done = 0;
    while (done < 30) {
        const auto pre = oracle::random_state(rng, 3);
        const auto post = oracle::random_state(rng, 3);
        const double k = kdist(rng);
        const double scale = lam(rng);
        PostSelectedPointer ps1;
        try {
            ps1 = evolve_and_postselect(pre, post, {{"C", k}}, std::nullopt,
                                        GaussianPointer{1.0});
        } catch (const std::domain_error&) {
            continue;
        }
        if (pointer_mean(ps1).success_probability < 1e-4) continue;
        const auto ps2 = evolve_and_postselect(pre, post, {{"C", k * scale}},
                                               std::nullopt,
                                               GaussianPointer{scale});
        const auto m1 = mean_shift(ps1, k);
        const auto m2 = mean_shift(ps2, k * scale);
        CHECK(std::abs(m2.mean_shift - scale * m1.mean_shift) < 1e-12 * scale);
        CHECK(std::abs(m2.success_probability - m1.success_probability) < 1e-12);
        CHECK(std::abs(m2.inferred - m1.inferred) < 1e-12);
        ++done;
    }
}

TEST_CASE("success probability without coupling is the squared overlap") {
    std::mt19937 rng(61);
    int done = 0;
    while (done < 50) {
        const auto pre = oracle::random_state(rng, 3);
        const auto post = oracle::random_state(rng, 3);
        const double ov2 = std::norm(inner(post, pre));
        if (ov2 < 1e-8) continue;
        const auto ps = evolve_and_postselect(pre, post, {}, std::nullopt, {});
        const double n = pointer_mean(ps).success_probability;
        CHECK(n == doctest::Approx(ov2).epsilon(1e-12));
        CHECK(n > 0.0);
        CHECK(n <= 1.0 + 1e-12);
        ++done;
    }
}

TEST_CASE("polarization rotation readout") {
    const auto [pre, post] = preset_states("swapped");
    const double theta = 9.6 * M_PI / 180.0;

    SUBCASE("no rotation coupling reads zero") {
        const auto ps = evolve_and_postselect(pre, post, {}, std::nullopt, {});
        CHECK(polarization_rotation(ps) == 0.0);
    }

    SUBCASE("a single surviving rotated rail reads exactly theta") {
        const auto c = make_state({0.0, 0.0, 1.0});
        const auto ps = evolve_and_postselect(
            c, c, {}, PolarizationCoupling{"C", theta}, {});
        CHECK(polarization_rotation(ps) == doctest::Approx(theta).epsilon(1e-15));
    }

    SUBCASE("the full configuration at zero displacement reads theta") {
        // weights (-1,+1,+1)/sqrt(10): the first two cancel, so the surviving
        // state is single-rail equivalent and the readout is exactly theta.
        const auto ps = evolve_and_postselect(
            pre, post, {}, PolarizationCoupling{"C", theta}, {});
        CHECK(polarization_rotation(ps) == doctest::Approx(theta).epsilon(1e-12));
        CHECK(polarization_rotation(ps) / theta == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("fully rotated states have no reference axis") {
        const auto c = make_state({0.0, 0.0, 1.0});
        auto ps = evolve_and_postselect(c, c, {},
                                        PolarizationCoupling{"C", theta}, {});
        const auto h_only = apply_polarizer(ps, Polarization::V);
        CHECK_THROWS_WITH_AS(polarization_rotation(h_only),
                             doctest::Contains("fully rotated"), std::domain_error);
    }
}

TEST_CASE("polarizer filtering") {
    const auto [pre, post] = preset_states("swapped");
    const double theta = 9.6 * M_PI / 180.0;
    const auto ps = evolve_and_postselect(pre, post, {{"B", 0.8}},
                                          PolarizationCoupling{"C", theta}, {});

    SUBCASE("blocking V leaves the undisplaced rotated light") {
        const auto filtered = apply_polarizer(ps, Polarization::V);
        REQUIRE(filtered.branches.size() == 1);
        CHECK(filtered.branches[0].pol == Polarization::H);
        CHECK(filtered.branches[0].displacement == 0.0);
        CHECK(mean_shift(filtered, 0.8).mean_shift == 0.0);
        // success probability shrinks, no renormalization
        CHECK(pointer_mean(filtered).success_probability <
              pointer_mean(ps).success_probability);
    }

    SUBCASE("blocking H without rotated light changes nothing") {
        const auto plain =
            evolve_and_postselect(pre, post, {{"B", 0.8}}, std::nullopt, {});
        const auto filtered = apply_polarizer(plain, Polarization::H);
        REQUIRE(filtered.branches.size() == plain.branches.size());
        for (std::size_t i = 0; i < filtered.branches.size(); ++i) {
            CHECK(filtered.branches[i].weight == plain.branches[i].weight);
        }
    }

    SUBCASE("blocking both polarizations extinguishes the beam") {
        const auto once = apply_polarizer(ps, Polarization::V);
        CHECK_THROWS_WITH_AS(apply_polarizer(once, Polarization::H),
                             doctest::Contains("extinguishes"), std::domain_error);
    }
}
