#include <doctest.h>

#include <vector>

#include "hrsim/engine.hpp"
#include "hrsim/errors.hpp"

using namespace hrsim;

TEST_SUITE("engine") {

TEST_CASE("events fire in time order regardless of scheduling order") {
    Engine e;
    std::vector<int> fired;
    e.schedule_at(micros(30), [&] { fired.push_back(3); });
    e.schedule_at(micros(10), [&] { fired.push_back(1); });
    e.schedule_at(micros(20), [&] { fired.push_back(2); });
    e.run(micros(100));
    CHECK(fired == std::vector<int>{1, 2, 3});
}

TEST_CASE("simultaneous events fire in scheduling order") {
    Engine e;
    std::vector<int> fired;
    for (int i = 0; i < 8; ++i)
        e.schedule_at(micros(5), [&fired, i] { fired.push_back(i); });
    e.run(micros(5));
    CHECK(fired == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("scheduling in the past is rejected") {
    Engine e;
    e.schedule_at(micros(10), [] {});
    e.run(micros(10));
    CHECK(e.now() == micros(10));
    CHECK_THROWS_AS(e.schedule_at(micros(9), [] {}), ConfigError);
    CHECK_NOTHROW(e.schedule_at(micros(10), [] {})); // now is allowed
}

TEST_CASE("cancel prevents firing exactly once") {
    Engine e;
    int fired = 0;
    EventId id = e.schedule_at(micros(10), [&] { ++fired; });
    CHECK(e.cancel(id));
    CHECK_FALSE(e.cancel(id)); // second cancel is a no-op
    e.run(micros(20));
    CHECK(fired == 0);
}

TEST_CASE("cancel after firing reports false") {
    Engine e;
    EventId id = e.schedule_at(micros(10), [] {});
    e.run(micros(20));
    CHECK_FALSE(e.cancel(id));
}

TEST_CASE("run advances the clock to the horizon even when idle") {
    Engine e;
    RunSummary s = e.run(millis(5));
    CHECK(e.now() == millis(5));
    CHECK(s.events_processed == 0);
    CHECK(s.drained);
}

TEST_CASE("run stops at the horizon and leaves later events pending") {
    Engine e;
    int fired = 0;
    e.schedule_at(micros(10), [&] { ++fired; });
    e.schedule_at(micros(30), [&] { ++fired; });
    RunSummary s = e.run(micros(20));
    CHECK(fired == 1);
    CHECK(s.events_processed == 1);
    CHECK_FALSE(s.drained);
    CHECK(e.now() == micros(20));
}

TEST_CASE("events scheduled from handlers run in the same pass") {
    Engine e;
    std::vector<int> fired;
    e.schedule_at(micros(10), [&] {
        fired.push_back(1);
        e.schedule_in(micros(5), [&] { fired.push_back(2); });
        e.schedule_at(e.now(), [&] { fired.push_back(3); }); // same instant
    });
    e.run(micros(100));
    CHECK(fired == std::vector<int>{1, 3, 2});
}

TEST_CASE("run_until_idle drains and leaves the clock on the last event") {
    Engine e;
    e.schedule_at(micros(10), [&] { e.schedule_in(micros(7), [] {}); });
    RunSummary s = e.run_until_idle(seconds(1));
    CHECK(s.drained);
    CHECK(s.events_processed == 2);
    CHECK(e.now() == micros(17));
}

TEST_CASE("run_until_idle refuses to pass the hard limit") {
    Engine e;
    int fired = 0;
    e.schedule_at(micros(10), [&] { ++fired; });
    e.schedule_at(seconds(10), [&] { ++fired; });
    RunSummary s = e.run_until_idle(seconds(1));
    CHECK(fired == 1);
    CHECK_FALSE(s.drained);
}

TEST_CASE("two engines driven identically stay in lockstep") {
    auto drive = [] {
        Engine e;
        std::vector<std::int64_t> stamps;
        for (int i = 0; i < 50; ++i)
            e.schedule_at(micros(i * 7 % 13), [&stamps, &e] {
                stamps.push_back(e.now().ns);
            });
        e.run_until_idle(seconds(1));
        return stamps;
    };
    CHECK(drive() == drive());
}

} // TEST_SUITE
