#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vast/qlookup.hpp"
#include "vast/tabulator.hpp"

using namespace vast;
using Catch::Approx;

TEST_CASE("observation history pads with blank frames and slides") {
    ObservationHistory h(2, 2);
    CHECK(h.flatten() == std::vector<double>{0, 0, 0, 0, 0, 0});
    h.push({1.0, 2.0});
    CHECK(h.flatten() == std::vector<double>{0, 0, 0, 0, 1, 2});
    h.push({3.0, 4.0});
    h.push({5.0, 6.0});
    h.push({7.0, 8.0});
    CHECK(h.flatten() == std::vector<double>{3, 4, 5, 6, 7, 8});
    CHECK(h.last() == Observation{7.0, 8.0});
    h.reset();
    CHECK(h.flatten() == std::vector<double>{0, 0, 0, 0, 0, 0});
}

TEST_CASE("grid encoding floors, clamps and packs little-endian") {
    GridTabulator grid({GridDim{1.0, 4}, GridDim{1.0, 4}});
    ObservationHistory h(0, 2);
    h.push({1.2, 3.7});
    CHECK(grid.encode(h).code == ((3ULL << 4) | 1ULL));

    h.push({-0.1, 0.3});
    CHECK(grid.extract_cell(grid.encode(h), 0) == 0);  // clamped below

    h.push({99.0, 0.0});
    CHECK(grid.extract_cell(grid.encode(h), 0) == 15);  // clamped above
}

TEST_CASE("grid heading dimension wraps modulo the range") {
    GridTabulator grid({GridDim{45.0, 3, true, 360.0}});
    ObservationHistory h(0, 1);
    h.push({359.0});
    CHECK(grid.encode(h).code == 7);
    h.push({361.0});
    CHECK(grid.encode(h).code == 0);
    h.push({-45.0});
    CHECK(grid.encode(h).code == 7);
}

TEST_CASE("grid shares states between trajectories crossing the same cells") {
    GridTabulator grid({GridDim{0.5, 4}, GridDim{0.5, 4}});
    ObservationHistory a(0, 2), b(0, 2);
    a.push({1.26, 2.01});
    b.push({1.38, 2.22});  // same 0.5-cell
    CHECK(grid.encode(a) == grid.encode(b));
    b.push({1.80, 2.22});  // crosses into the next x-cell
    CHECK(grid.encode(a) != grid.encode(b));
}

TEST_CASE("lsh bits are signs of fixed projections") {
    LSHTabulator lsh(2, 3, 77);
    const auto& v = lsh.projections();
    ObservationHistory h(0, 3);

    h.push({0.0, 0.0, 0.0});
    CHECK(lsh.encode(h).code == 0);  // H(0) = 0 on the zero vector

    // observation equal to the first projection: bit 0 set by self-dot
    h.push({v[0][0], v[0][1], v[0][2]});
    double cross = v[1][0] * v[0][0] + v[1][1] * v[0][1] + v[1][2] * v[0][2];
    std::uint64_t expected = 1ULL | (cross > 0.0 ? 2ULL : 0ULL);
    CHECK(lsh.encode(h).code == expected);

    CHECK(lsh.encode(h) == lsh.encode(h));
    CHECK(lsh.generation() == 0);

    LSHTabulator same_seed(2, 3, 77);
    CHECK(same_seed.encode(h) == lsh.encode(h));
}

TEST_CASE("lsh bit-flip probability follows the random-hyperplane angle law") {
    // For unit observations, P(one projection separates a and b) = angle/pi.
    const std::uint32_t d = 64;
    LSHTabulator lsh(d, 2, 123);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> angle_dist(0.2, 2.8);

    for (int trial = 0; trial < 5; ++trial) {
        double theta = angle_dist(rng);
        ObservationHistory ha(0, 2), hb(0, 2);
        ha.push({1.0, 0.0});
        hb.push({std::cos(theta), std::sin(theta)});
        auto diff = hamming_distance(lsh.encode(ha), lsh.encode(hb));
        double p = theta / M_PI;
        double sigma = std::sqrt(d * p * (1.0 - p));
        CHECK(std::abs(diff - d * p) <= 3.5 * sigma);
    }
}

TEST_CASE("learned tabulator thresholds encoder logits and tracks generations") {
    std::mt19937_64 rng(3);
    auto encoder = std::make_shared<Mlp>(std::vector<std::size_t>{2, 4, 3}, rng);
    LearnedTabulator tab(encoder, 3);
    ObservationHistory h(0, 2);
    h.push({0.4, -0.2});

    auto logits = encoder->forward(h.flatten());
    CHECK(tab.encode(h) == bernoulli_mode(logits));
    CHECK(tab.generation() == 0);
    CHECK(tab.encode(h) == tab.encode(h));

    auto encoder2 = std::make_shared<Mlp>(std::vector<std::size_t>{2, 4, 3}, rng);
    tab.set_snapshot(encoder2);
    CHECK(tab.generation() == 1);
    CHECK(tab.encode(h) == bernoulli_mode(encoder2->forward(h.flatten())));
}
