#include <catch2/catch_amalgamated.hpp>

#include "slicesim/workload.hpp"
#include "support/helpers.hpp"

#include <cmath>

using namespace slicesim;
using Catch::Approx;

TEST_CASE("reference classes resolve from the base values") {
    const auto classes = testutil::reference_classes();
    REQUIRE(classes.size() == 4);
    const std::vector<double> rates{6.0, 7.5, 3.0, 3.75};
    const std::vector<double> lifetimes{12.0, 20.0, 6.0, 10.0};
    const std::vector<double> holdtimes{10.0, 8.0, 3.0, 2.4};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(classes[k].class_id == static_cast<int>(k + 1));
        CHECK(classes[k].arrival_rate == Approx(rates[k]));
        CHECK(classes[k].mean_lifetime == Approx(lifetimes[k]));
        CHECK(classes[k].mean_holdtime == Approx(holdtimes[k]));
        CHECK(classes[k].price_per_slot == Approx(1.0 + std::log(static_cast<double>(k + 1))));
        CHECK(classes[k].balk_sensitivity == Approx(0.02 / (2.0 + static_cast<double>(k))));
    }
    CHECK(classes[0].elastic);
    CHECK_FALSE(classes[1].elastic);
    CHECK(classes[1].demand == ResourceVector{0.016, 0.02});
}

TEST_CASE("factor length mismatch is rejected") {
    WorkloadFactors f;
    f.arrival_factors.pop_back();
    CHECK_THROWS_AS(resolve_classes(f), std::invalid_argument);
}

TEST_CASE("arrival counts") {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(sample_arrival_count(0.0, rng) == 0);
    CHECK_THROWS_AS(sample_arrival_count(-1.0, rng), std::invalid_argument);

    constexpr int draws = 100000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_arrival_count(6.0, rng));
    CHECK(sum / draws == Approx(6.0).margin(0.05));

    std::vector<double> xs(draws);
    double mean = 0.0;
    for (auto& x : xs) {
        x = static_cast<double>(sample_arrival_count(7.5, rng));
        mean += x;
    }
    mean /= draws;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= draws - 1;
    CHECK(var == Approx(7.5).margin(0.2));
}

TEST_CASE("balk probability") {
    CHECK(balk_probability(0.02, 0) == 1.0);
    CHECK(balk_probability(0.005, 100) == Approx(0.606531).margin(1e-6));
    CHECK(balk_probability(0.02, 5000) < 1e-40);
    CHECK(balk_probability(0.0, 1000) == 1.0);
}

TEST_CASE("durations") {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) CHECK(sample_duration(1.0, rng) == 1);
    CHECK_THROWS_AS(sample_duration(0.5, rng), std::invalid_argument);

    constexpr int draws = 100000;
    double sum = 0.0;
    Slot smallest = 100;
    for (int i = 0; i < draws; ++i) {
        const Slot d = sample_duration(12.0, rng);
        smallest = std::min(smallest, d);
        sum += static_cast<double>(d);
    }
    CHECK(smallest >= 1);
    CHECK(sum / draws == Approx(12.0).margin(0.1));
}

TEST_CASE("reneges follow the admission window") {
    std::vector<SliceQueue> queues{SliceQueue{1, {}}};
    Request r;
    r.id = 1;
    r.perceived_slot = 3;
    r.holdtime = 5;
    queues[0].entries.push_back(r);

    auto scan = scan_reneges(queues, 7);
    CHECK(scan.departures == std::vector<Count>{0});
    CHECK(queues[0].length() == 1);

    scan = scan_reneges(queues, 8);
    CHECK(scan.departures == std::vector<Count>{1});
    REQUIRE(scan.removed.size() == 1);
    CHECK(scan.removed[0].id == 1);
    CHECK(queues[0].length() == 0);

    std::vector<SliceQueue> empty{SliceQueue{1, {}}, SliceQueue{2, {}}};
    CHECK(scan_reneges(empty, 4).departures == std::vector<Count>{0, 0});
}

TEST_CASE("reneging keeps FIFO order of the survivors") {
    std::vector<SliceQueue> queues{SliceQueue{1, {}}};
    for (RequestId id = 1; id <= 5; ++id) {
        Request r;
        r.id = id;
        r.perceived_slot = 1;
        r.holdtime = id % 2 == 0 ? 2 : 10;
        queues[0].entries.push_back(r);
    }
    const auto scan = scan_reneges(queues, 3);
    CHECK(scan.departures[0] == 2);
    std::vector<RequestId> left;
    for (const auto& r : queues[0].entries) left.push_back(r.id);
    CHECK(left == std::vector<RequestId>{1, 3, 5});
}

TEST_CASE("slot traffic without arrivals or without balking") {
    WorkloadFactors f;
    f.base_arrival_rate = 0.0;
    WorkloadConfig cfg = make_workload(f, 3);
    std::vector<SliceQueue> queues;
    for (int k = 1; k <= 4; ++k) queues.push_back(SliceQueue{k, {}});
    Rng rng(3);
    RequestId next = 1;
    auto traffic = generate_slot_traffic(cfg, queues, 1, rng, next);
    CHECK(traffic.joined == std::vector<Count>{0, 0, 0, 0});
    CHECK(traffic.balks == std::vector<Count>{0, 0, 0, 0});

    f.base_arrival_rate = 10.0;
    f.base_balk = 0.0;
    cfg = make_workload(f, 3);
    for (Slot t = 1; t <= 50; ++t) {
        traffic = generate_slot_traffic(cfg, queues, t, rng, next);
        CHECK(traffic.balks == std::vector<Count>{0, 0, 0, 0});
        CHECK(traffic.joined == traffic.arrivals);
    }
}

TEST_CASE("balks plus joiners equal arrivals and joiners are FIFO") {
    WorkloadFactors f;
    f.base_arrival_rate = 15.0;
    f.base_balk = 0.5;
    const WorkloadConfig cfg = make_workload(f, 4);
    std::vector<SliceQueue> queues;
    for (int k = 1; k <= 4; ++k) queues.push_back(SliceQueue{k, {}});
    Rng rng(4);
    RequestId next = 1;
    for (Slot t = 1; t <= 30; ++t) {
        std::vector<std::size_t> before;
        for (const auto& q : queues) before.push_back(q.length());
        const auto traffic = generate_slot_traffic(cfg, queues, t, rng, next);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(traffic.balks[k] + traffic.joined[k] == traffic.arrivals[k]);
            CHECK(queues[k].length() == before[k] + static_cast<std::size_t>(traffic.joined[k]));
            for (std::size_t i = 1; i < queues[k].length(); ++i) {
                CHECK(queues[k].entries[i - 1].id < queues[k].entries[i].id);
                CHECK(queues[k].entries[i - 1].perceived_slot <= queues[k].entries[i].perceived_slot);
            }
        }
    }
}

TEST_CASE("identical seeds give identical traffic") {
    const WorkloadConfig cfg = make_workload(WorkloadFactors{}, 99);
    auto trace = [&](std::uint64_t seed) {
        std::vector<SliceQueue> queues;
        for (int k = 1; k <= 4; ++k) queues.push_back(SliceQueue{k, {}});
        Rng rng(seed);
        RequestId next = 1;
        std::vector<Count> out;
        for (Slot t = 1; t <= 100; ++t) {
            const auto tr = generate_slot_traffic(cfg, queues, t, rng, next);
            out.insert(out.end(), tr.joined.begin(), tr.joined.end());
            out.insert(out.end(), tr.balks.begin(), tr.balks.end());
            scan_reneges(queues, t + 1);
        }
        return out;
    };
    CHECK(trace(99) == trace(99));
    CHECK(trace(99) != trace(100));
}

TEST_CASE("monte-carlo balk fraction at a held queue length") {
    Rng rng(5);
    const double beta = 0.02;
    const std::size_t held = 50;
    constexpr int draws = 100000;
    int balked = 0;
    for (int i = 0; i < draws; ++i) {
        if (!std::bernoulli_distribution(balk_probability(beta, held))(rng)) ++balked;
    }
    CHECK(static_cast<double>(balked) / draws == Approx(1.0 - std::exp(-1.0)).margin(0.01));
}
