#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "macap/modulus.hpp"
#include "macap/prob.hpp"

using namespace macap;

namespace {

const double kLn2 = std::log(2.0);

Mac noise_free_1() {
    // columns (a, b): (a1,b1) noiseless to z1, the rest uniform
    return Mac(2, 2, 2,
               {
                   1.0, 0.5, 0.5, 0.5,  // z1: (a1,b1) (a1,b2) (a2,b1) (a2,b2)
                   0.0, 0.5, 0.5, 0.5,  // z2
               });
}

Mac noise_free_2() {
    return Mac(2, 2, 2,
               {
                   1.0, 0.5, 0.5, 0.0,
                   0.0, 0.5, 0.5, 1.0,
               });
}

Mac random_mac(std::mt19937& rng, std::size_t d1, std::size_t d2, std::size_t dout) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> t(d1 * d2 * dout);
    for (std::size_t b1 = 0; b1 < d1; ++b1) {
        for (std::size_t b2 = 0; b2 < d2; ++b2) {
            double sum = 0.0;
            std::vector<double> col(dout);
            for (auto& v : col) {
                v = u(rng) + 1e-3;
                sum += v;
            }
            for (std::size_t z = 0; z < dout; ++z) t[(z * d1 + b1) * d2 + b2] = col[z] / sum;
        }
    }
    return Mac(d1, d2, dout, std::move(t));
}

ProbabilityVector random_simplex(std::mt19937& rng, std::size_t d) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(d);
    double sum = 0.0;
    for (auto& v : x) {
        v = e(rng) + 1e-12;
        sum += v;
    }
    for (auto& v : x) v /= sum;
    return ProbabilityVector(std::move(x));
}

}  // namespace

TEST_CASE("probability vector validation") {
    CHECK_THROWS_AS(ProbabilityVector({0.5, 0.4}), ValidationError);
    CHECK_THROWS_AS(ProbabilityVector({1.2, -0.2}), ValidationError);
    CHECK_THROWS_AS(ProbabilityVector({}), ValidationError);
    CHECK_NOTHROW(ProbabilityVector({0.5, 0.5 + 5e-10}));
}

TEST_CASE("shannon entropy") {
    CHECK(shannon_entropy(ProbabilityVector::uniform(4), LogBase::bits) == doctest::Approx(2.0));
    CHECK(shannon_entropy(ProbabilityVector({1.0, 0.0, 0.0})) == doctest::Approx(0.0));
    // h(1/5) in nats, evaluated directly
    double expected = -0.8 * std::log(0.8) - 0.2 * std::log(0.2);
    CHECK(shannon_entropy(ProbabilityVector({0.8, 0.2})) == doctest::Approx(expected));
    CHECK(expected == doctest::Approx(0.5004).epsilon(1e-3));
}

TEST_CASE("modified binary entropy") {
    CHECK(modified_binary_entropy(0.0) == 0.0);
    CHECK(modified_binary_entropy(0.5) == doctest::Approx(kLn2));
    CHECK(modified_binary_entropy(0.75) == doctest::Approx(kLn2));
    CHECK_THROWS_AS(modified_binary_entropy(-0.1), DomainError);
    // monotone on a sample grid
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
        double v = modified_binary_entropy(0.025 * i);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("mac validation flags the offending column") {
    std::vector<double> t = {
        1.0, 0.5, 0.5, 0.5,
        0.0, 0.4, 0.5, 0.5,  // (b1=0, b2=1) column sums to 0.9
    };
    CHECK_THROWS_WITH_AS(Mac(2, 2, 2, std::move(t)),
                         doctest::Contains("(b1=0, b2=1)"), ValidationError);
}

TEST_CASE("mac with a zero output row is accepted") {
    CHECK_NOTHROW(Mac(2, 1, 3, {1.0, 0.5, 0.0, 0.5, 0.0, 0.0}));
}

TEST_CASE("effective channel") {
    Mac nf1 = noise_free_1();
    SUBCASE("point mass on b1 picks out the noiseless column") {
        EffectiveChannel eff = effective_channel(nf1, ProbabilityVector({1.0, 0.0}));
        CHECK(eff.aq_at(0, 0) == doctest::Approx(1.0));
        CHECK(eff.aq_at(1, 0) == doctest::Approx(0.0));
        CHECK(eff.bq[0] == doctest::Approx(0.0));
    }
    SUBCASE("point mass marginalization for a random channel") {
        std::mt19937 rng(7);
        Mac mac = random_mac(rng, 3, 4, 3);
        EffectiveChannel eff = effective_channel(mac, ProbabilityVector::point_mass(4, 2));
        for (std::size_t z = 0; z < 3; ++z) {
            for (std::size_t b1 = 0; b1 < 3; ++b1) {
                CHECK(eff.aq_at(z, b1) == doctest::Approx(mac.at(z, b1, 2)));
            }
        }
    }
    SUBCASE("uniform q on the second noise-free channel") {
        EffectiveChannel eff = effective_channel(noise_free_2(), ProbabilityVector({0.5, 0.5}));
        CHECK(eff.bq[0] == doctest::Approx(0.5 * kLn2));
        CHECK(eff.bq[1] == doctest::Approx(0.5 * kLn2));
    }
    SUBCASE("columns of aq stay stochastic, bq within its entropy window") {
        std::mt19937 rng(11);
        for (int i = 0; i < 20; ++i) {
            Mac mac = random_mac(rng, 3, 3, 4);
            ProbabilityVector q = random_simplex(rng, 3);
            EffectiveChannel eff = effective_channel(mac, q);
            double h_max = h_n_max(mac);
            for (std::size_t b1 = 0; b1 < 3; ++b1) {
                double sum = 0.0;
                for (std::size_t z = 0; z < 4; ++z) {
                    CHECK(eff.aq_at(z, b1) >= 0.0);
                    sum += eff.aq_at(z, b1);
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(eff.bq[b1] >= 0.0);
                CHECK(eff.bq[b1] <= h_max + 1e-12);
            }
        }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(effective_channel(nf1, ProbabilityVector({1.0, 0.0, 0.0})),
                        ValidationError);
    }
}

TEST_CASE("mutual information") {
    Mac nf1 = noise_free_1();
    Mac nf2 = noise_free_2();
    ProbabilityVector half({0.5, 0.5});

    CHECK(mutual_information(nf2, half, half) == doctest::Approx(0.5 * kLn2));

    double h45 = -0.8 * std::log(0.8) - 0.2 * std::log(0.2);
    CHECK(mutual_information(nf1, ProbabilityVector({1.0, 0.0}), ProbabilityVector({0.6, 0.4})) ==
          doctest::Approx(h45 - 0.4 * kLn2));
    CHECK(h45 - 0.4 * kLn2 == doctest::Approx(0.2231).epsilon(1e-3));

    SUBCASE("deterministic inputs carry no information") {
        std::mt19937 rng(3);
        Mac mac = random_mac(rng, 3, 2, 4);
        CHECK(mutual_information(mac, ProbabilityVector::point_mass(3, 1),
                                 ProbabilityVector::point_mass(2, 0)) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("bounded by log dout and nonnegative") {
        std::mt19937 rng(5);
        for (int i = 0; i < 50; ++i) {
            Mac mac = random_mac(rng, 3, 3, 3);
            double v = mutual_information(mac, random_simplex(rng, 3), random_simplex(rng, 3));
            CHECK(v >= -1e-9);
            CHECK(v <= std::log(3.0) + 1e-9);
        }
    }
    SUBCASE("swap symmetry") {
        std::mt19937 rng(9);
        for (int i = 0; i < 20; ++i) {
            Mac mac = random_mac(rng, 3, 4, 3);
            ProbabilityVector p = random_simplex(rng, 3);
            ProbabilityVector q = random_simplex(rng, 4);
            CHECK(mutual_information(mac, p, q) ==
                  doctest::Approx(mutual_information(mac.swap_inputs(), q, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("h_n_max") {
    CHECK(h_n_max(noise_free_1()) == doctest::Approx(kLn2));
    // noiseless identity channel: every column a point mass
    Mac identity(2, 2, 4,
                 {
                     1, 0, 0, 0,
                     0, 1, 0, 0,
                     0, 0, 1, 0,
                     0, 0, 0, 1,
                 });
    CHECK(h_n_max(identity) == doctest::Approx(0.0));
    Mac uniform(2, 2, 4, std::vector<double>(16, 0.25));
    CHECK(h_n_max(uniform) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("beta_I modulus") {
    Mac nf1 = noise_free_1();
    Modulus beta = beta_I_modulus(nf1);
    CHECK(beta(0.0) == 0.0);
    // ln(dout - 1) = 0, H_max = ln 2, so eval(1) = ln 2 + hbar(1/2)
    CHECK(beta(1.0) == doctest::Approx(2.0 * kLn2));
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        double v = beta(0.04 * i);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("mutual information is beta_I-Lipschitz-like in q") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<std::size_t> dim(2, 4);
    for (int trial = 0; trial < 100; ++trial) {
        Mac mac = random_mac(rng, dim(rng), dim(rng), dim(rng));
        Modulus beta = beta_I_modulus(mac);
        ProbabilityVector p = random_simplex(rng, mac.d1());
        ProbabilityVector q1 = random_simplex(rng, mac.d2());
        ProbabilityVector q2 = random_simplex(rng, mac.d2());
        double dist = 0.0;
        for (std::size_t i = 0; i < mac.d2(); ++i) dist += std::abs(q1[i] - q2[i]);
        double gap = std::abs(mutual_information(mac, p, q1) - mutual_information(mac, p, q2));
        CHECK(gap <= beta(dist) + 1e-9);
    }
}
