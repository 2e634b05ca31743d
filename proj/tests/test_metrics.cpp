#include <doctest.h>

#include "hrsim/errors.hpp"
#include "hrsim/metrics.hpp"

using namespace hrsim;

TEST_SUITE("metrics") {

TEST_CASE("latency percentiles use nearest rank on the sorted sample") {
    std::vector<SimTime> samples;
    for (int i = 10; i >= 1; --i) // unsorted on purpose
        samples.push_back(micros(i));
    LatencySummary s = summarize_latencies(samples);
    CHECK(s.count == 10);
    CHECK(s.mean_us == doctest::Approx(5.5));
    CHECK(s.p50_us == doctest::Approx(5.0));  // ceil(0.5*10) = 5th value
    CHECK(s.p95_us == doctest::Approx(10.0)); // ceil(9.5) = 10th value
    CHECK(s.p99_us == doctest::Approx(10.0));
    CHECK(s.min_us == doctest::Approx(1.0));
    CHECK(s.max_us == doctest::Approx(10.0));
}

TEST_CASE("single sample and empty sample edge cases") {
    LatencySummary one = summarize_latencies({micros(7)});
    CHECK(one.count == 1);
    CHECK(one.p50_us == doctest::Approx(7.0));
    CHECK(one.p99_us == doctest::Approx(7.0));

    LatencySummary none = summarize_latencies({});
    CHECK(none.count == 0);
    CHECK(none.mean_us == 0.0);
    CHECK(none.max_us == 0.0);
}

TEST_CASE("every frame registers once") {
    Metrics m;
    m.register_frame(1, 0, kTimeZero);
    CHECK_THROWS_AS(m.register_frame(1, 0, kTimeZero), InvariantViolation);
    CHECK_THROWS_AS(m.record_delivery(99, micros(1)), InvariantViolation);
    CHECK_THROWS_AS(m.record_loss(99, micros(1)), InvariantViolation);
}

TEST_CASE("second delivery of one frame is the elimination tripwire") {
    Metrics m;
    m.register_frame(1, 0, kTimeZero);
    m.record_delivery(1, micros(10));
    CHECK(m.double_deliveries() == 0);
    CHECK_THROWS_AS(m.record_delivery(1, micros(20)), InvariantViolation);
    CHECK(m.double_deliveries() == 1);
}

TEST_CASE("loss is idempotent and a later delivery overrides it") {
    // a flooded copy can be dropped and settled at one node before the
    // responsible node delivers the frame
    Metrics m;
    m.register_frame(1, 0, kTimeZero);
    m.record_loss(1, micros(5));
    m.record_loss(1, micros(6)); // settled: no-op
    m.record_delivery(1, micros(10));
    CHECK(m.delivery_time(1) == micros(10));
    m.record_loss(1, micros(11)); // settled: no-op
    MetricsSummary s = m.summarize();
    CHECK(s.total.delivered == 1);
    CHECK(s.total.lost == 0);
    CHECK(s.double_deliveries == 0);
}

TEST_CASE("per-flow and total accounting") {
    Metrics m;
    m.register_frame(1, 0, kTimeZero);
    m.register_frame(2, 0, micros(1));
    m.register_frame(3, 1, micros(2));
    m.register_frame(4, 1, micros(3));
    m.register_frame(5, 1, micros(4));
    m.record_delivery(1, micros(100));
    m.record_loss(2, micros(200));
    m.record_delivery(3, micros(102));
    m.record_delivery(4, micros(103));
    // frame 5 stays in flight

    MetricsSummary s = m.summarize();
    REQUIRE(s.flows.size() == 2);
    CHECK(s.flows[0].flow == 0);
    CHECK(s.flows[0].offered == 2);
    CHECK(s.flows[0].delivered == 1);
    CHECK(s.flows[0].lost == 1);
    CHECK(s.flows[0].loss_rate == doctest::Approx(0.5));
    CHECK(s.flows[0].latency.count == 1);
    CHECK(s.flows[0].latency.max_us == doctest::Approx(100.0));
    CHECK(s.flows[1].flow == 1);
    CHECK(s.flows[1].offered == 3);
    CHECK(s.flows[1].delivered == 2);
    CHECK(s.flows[1].in_flight == 1);
    CHECK(s.total.offered == 5);
    CHECK(s.total.delivered == 3);
    CHECK(s.total.lost == 1);
    CHECK(s.total.in_flight == 1);
}

TEST_CASE("deadline misses count deliveries that arrived too late") {
    Metrics m;
    m.set_flow_deadline(0, millis(2));
    m.register_frame(1, 0, kTimeZero);
    m.register_frame(2, 0, kTimeZero);
    m.register_frame(3, 0, kTimeZero);
    m.record_delivery(1, millis(1));     // in time
    m.record_delivery(2, millis(2));     // exactly on time
    m.record_delivery(3, millis(2) + nanos(1)); // late
    MetricsSummary s = m.summarize();
    CHECK(s.flows[0].deadline_missed == 1);
}

TEST_CASE("delivery time lookup") {
    Metrics m;
    m.register_frame(1, 0, kTimeZero);
    CHECK_FALSE(m.delivery_time(1).has_value());
    m.record_delivery(1, micros(44));
    CHECK(m.delivery_time(1) == micros(44));
}

} // TEST_SUITE
