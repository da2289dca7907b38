#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "niss/niss.hpp"

using namespace niss;

TEST_CASE("parity basics") {
    // empty subset is the empty product
    CHECK(parity(0, 0, 0.0, 1.0, 2) == 1.0);
    CHECK(parity(0, 3, 0.5, 0.2, 2) == 1.0);

    // d=2, p=1/2: product of raw signs
    CHECK(parity(0b11, 0b10, 0.0, 1.0, 2) == -1.0); // x = (-1, +1)

    // d=1, p=3/4: (1 - 1/2) / (sqrt(3)/2) = 1/sqrt(3)
    const double mu = bernoulli_mean(0.75);
    const double sigma = bernoulli_sigma(0.75);
    CHECK_THAT(parity(1, 1, mu, sigma, 1), Catch::Matchers::WithinAbs(1.0 / std::sqrt(3.0), 1e-12));

    CHECK_THROWS_AS(parity(1, 0, 0.0, 0.0, 1), invalid_source_error);
    CHECK_THROWS_AS(parity(4, 0, 0.0, 1.0, 2), argument_error);
}

TEST_CASE("parities are orthonormal under the analysis measure") {
    for (double p : {0.1, 0.3, 0.5, 0.75}) {
        const double mu = bernoulli_mean(p);
        const double sigma = bernoulli_sigma(p);
        for (int d = 1; d <= 4; ++d) {
            const std::size_t n = std::size_t{1} << d;
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t t = s; t < n; ++t) {
                    double acc = 0;
                    for (std::size_t x = 0; x < n; ++x)
                        acc += product_point_prob(static_cast<std::uint32_t>(x), d, p) *
                               parity(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(x), mu, sigma, d) *
                               parity(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(x), mu, sigma, d);
                    const double want = (s == t) ? 1.0 : 0.0;
                    REQUIRE_THAT(acc, Catch::Matchers::WithinAbs(want, 1e-10));
                }
        }
    }
}

TEST_CASE("analyze pins the textbook spectra") {
    SECTION("constant table") {
        TruthTable c(3, 0.625);
        const FourierSpectrum s = analyze(c, 0.37);
        CHECK_THAT(s.coeffs[0], Catch::Matchers::WithinAbs(0.625, 1e-12));
        for (std::size_t i = 1; i < s.coeffs.size(); ++i)
            CHECK_THAT(s.coeffs[i], Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
    SECTION("dictator at p=1/2") {
        TruthTable f(2);
        for (std::size_t x = 0; x < 4; ++x) f[x] = point_coordinate(static_cast<std::uint32_t>(x), 0);
        const FourierSpectrum s = analyze(f, 0.5);
        CHECK_THAT(s.coeffs[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
        CHECK_THAT(s.coeffs[1], Catch::Matchers::WithinAbs(1.0, 1e-12));
        CHECK_THAT(s.coeffs[2], Catch::Matchers::WithinAbs(0.0, 1e-12));
        CHECK_THAT(s.coeffs[3], Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
    SECTION("positive quadrant indicator at p=1/2") {
        // f = +1 iff x1 = x2 = +1, else -1
        TruthTable f(2, -1.0);
        f[3] = 1.0;
        const FourierSpectrum s = analyze(f, 0.5);
        CHECK_THAT(s.coeffs[0], Catch::Matchers::WithinAbs(-0.5, 1e-12));
        CHECK_THAT(s.coeffs[1], Catch::Matchers::WithinAbs(0.5, 1e-12));
        CHECK_THAT(s.coeffs[2], Catch::Matchers::WithinAbs(0.5, 1e-12));
        CHECK_THAT(s.coeffs[3], Catch::Matchers::WithinAbs(0.5, 1e-12));
    }
    CHECK_THROWS_AS(analyze(TruthTable(1), 0.0), invalid_source_error);
    CHECK_THROWS_AS(analyze(TruthTable(1), 1.0), invalid_source_error);
}

TEST_CASE("synthesize inverts analyze") {
    SECTION("spectrum {}:1 gives the constant table") {
        FourierSpectrum s(2, 0.3);
        s.coeffs[0] = 1.0;
        const TruthTable f = synthesize(s);
        for (double v : f.values) CHECK_THAT(v, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    SECTION("identity spectrum at d=1, p=1/2") {
        FourierSpectrum s(1, 0.5);
        s.coeffs[1] = 1.0;
        const TruthTable f = synthesize(s);
        CHECK(f[0] == -1.0);
        CHECK(f[1] == 1.0);
    }
    SECTION("round trip on random tables") {
        std::mt19937 rng(7);
        for (int trial = 0; trial < 100; ++trial) {
            const int d = 1 + trial % 4;
            const double p = 0.2 + 0.6 * (trial % 7) / 6.0;
            const TruthTable f = testing::random_table(rng, d, -2.0, 2.0);
            const TruthTable back = synthesize(analyze(f, p), p);
            for (std::size_t x = 0; x < f.size(); ++x)
                REQUIRE_THAT(back[x], Catch::Matchers::WithinAbs(f[x], 1e-12));
        }
    }
    SECTION("analysis measure mismatch is caught") {
        FourierSpectrum s(1, 0.5);
        CHECK_THROWS_AS(synthesize(s, 0.25), invalid_source_error);
    }
}

TEST_CASE("Parseval under the analysis measure") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + trial % 4;
        const double p = 0.2 + 0.6 * (trial % 5) / 4.0;
        const TruthTable f = testing::random_table(rng, d, -1.5, 1.5);
        const FourierSpectrum s = analyze(f, p);
        double coeff_energy = 0;
        for (double c : s.coeffs) coeff_energy += c * c;
        double mean_square = 0;
        for (std::size_t x = 0; x < f.size(); ++x)
            mean_square += product_point_prob(static_cast<std::uint32_t>(x), d, p) * f[x] * f[x];
        REQUIRE_THAT(coeff_energy, Catch::Matchers::WithinAbs(mean_square, 1e-10));
        // mean is the empty-set coefficient
        double mean = 0;
        for (std::size_t x = 0; x < f.size(); ++x)
            mean += product_point_prob(static_cast<std::uint32_t>(x), d, p) * f[x];
        REQUIRE_THAT(s.coeffs[0], Catch::Matchers::WithinAbs(mean, 1e-12));
    }
}

TEST_CASE("cross correlation identity") {
    SECTION("rho=0 keeps only the empty set") {
        std::mt19937 rng(3);
        const TruthTable f = testing::random_table(rng, 2);
        const TruthTable g = testing::random_table(rng, 2);
        const FourierSpectrum fs = analyze(f, 0.4), gs = analyze(g, 0.6);
        CHECK_THAT(cross_correlation(fs, gs, 0.0),
                   Catch::Matchers::WithinAbs(fs.coeffs[0] * gs.coeffs[0], 1e-12));
    }
    SECTION("identity pair under a symmetric source returns rho") {
        const BinarySourceSpec src = BinarySourceSpec::dsbs(0.2);
        TruthTable f(1);
        f[0] = -1.0;
        f[1] = 1.0;
        const double got = cross_correlation(analyze(f, src.px()), analyze(f, src.py()), src.rho);
        double direct = 0;
        const auto w = product_pair_weights(src, 1);
        for (std::size_t x = 0; x < 2; ++x)
            for (std::size_t y = 0; y < 2; ++y) direct += w[x * 2 + y] * f[x] * f[y];
        CHECK_THAT(got, Catch::Matchers::WithinAbs(src.rho, 1e-12));
        CHECK_THAT(got, Catch::Matchers::WithinAbs(direct, 1e-12));
    }
    SECTION("rho=1 with itself is the second moment") {
        std::mt19937 rng(5);
        const TruthTable f = testing::random_table(rng, 3);
        const FourierSpectrum fs = analyze(f, 0.3);
        double mean_square = 0;
        for (std::size_t x = 0; x < f.size(); ++x)
            mean_square += product_point_prob(static_cast<std::uint32_t>(x), 3, 0.3) * f[x] * f[x];
        CHECK_THAT(cross_correlation(fs, fs, 1.0), Catch::Matchers::WithinAbs(mean_square, 1e-10));
    }
    SECTION("full identity against the direct product-measure sum") {
        std::mt19937 rng(13);
        for (int trial = 0; trial < 40; ++trial) {
            const int d = 1 + trial % 3;
            const BinarySourceSpec src = testing::random_source(rng);
            const TruthTable f = testing::random_table(rng, d);
            const TruthTable g = testing::random_table(rng, d);
            const double spectral =
                cross_correlation(analyze(f, src.px()), analyze(g, src.py()), src.rho);
            double direct = 0;
            const auto w = product_pair_weights(src, d);
            const std::size_t n = f.size();
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) direct += w[x * n + y] * f[x] * g[y];
            REQUIRE_THAT(spectral, Catch::Matchers::WithinAbs(direct, 1e-9));
        }
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(cross_correlation(FourierSpectrum(1, 0.5), FourierSpectrum(2, 0.5), 0.5),
                        shape_error);
    }
}

TEST_CASE("disagreement probability") {
    CHECK(disagreement_probability(1.0) == 0.0);
    CHECK(disagreement_probability(-1.0) == 1.0);
    CHECK(disagreement_probability(0.0) == 0.5);
    CHECK_NOTHROW(disagreement_probability(1.0 + 1e-10));
    CHECK_THROWS_AS(disagreement_probability(1.1), niss::range_error);

    // equals the directly counted disagreement mass for sign tables
    std::mt19937 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const int d = 1 + trial % 3;
        const BinarySourceSpec src = testing::random_source(rng);
        TruthTable f = testing::random_symbol_table(rng, d, 2);
        TruthTable g = testing::random_symbol_table(rng, d, 2);
        const TruthTable fl = indicator_lift(f, 1, 2), gl = indicator_lift(g, 1, 2);
        const auto w = product_pair_weights(src, d);
        const std::size_t n = fl.size();
        double efg = 0, mass = 0;
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) {
                efg += w[x * n + y] * fl[x] * gl[y];
                if (fl[x] != gl[y]) mass += w[x * n + y];
            }
        REQUIRE_THAT(disagreement_probability(efg), Catch::Matchers::WithinAbs(mass, 1e-10));
    }
}

TEST_CASE("indicator lift") {
    TruthTable f(1);
    f[0] = 0.0;
    f[1] = 1.0;
    const TruthTable lifted = indicator_lift(f, 1, 2);
    CHECK(lifted[0] == -1.0);
    CHECK(lifted[1] == 1.0);

    TruthTable c(2, 2.0);
    CHECK(indicator_lift(c, 2, 3).values == std::vector<double>(4, 1.0));
    CHECK(indicator_lift(c, 1, 3).values == std::vector<double>(4, -1.0));

    TruthTable bad(1);
    bad[0] = 0.5;
    CHECK_THROWS_AS(indicator_lift(bad, 0, 2), alphabet_error);
    CHECK_THROWS_AS(indicator_lift(f, 2, 2), alphabet_error);

    SECTION("partition: exactly one symbol lifts to +1 per point") {
        std::mt19937 rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            const int k = 2 + trial % 3;
            const TruthTable t = testing::random_symbol_table(rng, 3, k);
            for (std::size_t x = 0; x < t.size(); ++x) {
                int plus = 0;
                double sum = 0;
                for (int u = 0; u < k; ++u) {
                    const double v = indicator_lift(t, u, k)[x];
                    plus += (v == 1.0);
                    sum += v;
                }
                REQUIRE(plus == 1);
                REQUIRE(sum == 2.0 - k); // the full-alphabet subset condition, with equality
            }
        }
    }
    SECTION("every symbol subset satisfies the lift-sum bound") {
        std::mt19937 rng(31);
        const int k = 3;
        const TruthTable t = testing::random_symbol_table(rng, 2, k);
        std::vector<TruthTable> lifts;
        for (int u = 0; u < k; ++u) lifts.push_back(indicator_lift(t, u, k));
        for (std::uint32_t subset = 0; subset < (1u << k); ++subset)
            for (std::size_t x = 0; x < t.size(); ++x) {
                double sum = 0;
                int card = 0;
                for (int u = 0; u < k; ++u)
                    if ((subset >> u) & 1u) {
                        sum += lifts[static_cast<std::size_t>(u)][x];
                        ++card;
                    }
                REQUIRE(sum <= 2.0 - card);
            }
    }
}

TEST_CASE("pearson rho of binary sources") {
    const BinarySourceSpec indep =
        BinarySourceSpec::from_pmf({{{0.12, 0.28}, {0.18, 0.42}}}); // P(X=1)=0.6, P(Y=1)=0.7 product
    CHECK_THAT(pearson_rho(indep), Catch::Matchers::WithinAbs(0.0, 1e-12));

    const BinarySourceSpec equal = BinarySourceSpec::from_pmf({{{0.5, 0.0}, {0.0, 0.5}}});
    CHECK_THAT(pearson_rho(equal), Catch::Matchers::WithinAbs(1.0, 1e-12));

    for (double eps : {0.05, 0.1, 0.25, 0.45})
        CHECK_THAT(pearson_rho(BinarySourceSpec::dsbs(eps)),
                   Catch::Matchers::WithinAbs(1.0 - 2.0 * eps, 1e-12));

    CHECK_THROWS_AS(BinarySourceSpec::from_pmf({{{1.0, 0.0}, {0.0, 0.0}}}), invalid_source_error);
    CHECK_THROWS_AS(BinarySourceSpec::from_pmf({{{0.6, 0.6}, {0.0, 0.0}}}), invalid_source_error);
    CHECK_THROWS_AS(BinarySourceSpec::from_pmf({{{0.8, 0.4}, {-0.2, 0.0}}}), invalid_source_error);

    // moments are recomputable from the pmf
    std::mt19937 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const BinarySourceSpec s = testing::random_source(rng);
        double exy = 0;
        const double xs[2] = {-1.0, 1.0};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) exy += s.pmf[i][j] * (xs[i] - s.mu_x) * (xs[j] - s.mu_y);
        REQUIRE_THAT(s.rho, Catch::Matchers::WithinAbs(exy / (s.sigma_x * s.sigma_y), 1e-12));
    }
}
