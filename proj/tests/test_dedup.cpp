#include <doctest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "hrsim/dedup.hpp"
#include "hrsim/errors.hpp"
#include "hrsim/rng.hpp"

using namespace hrsim;

namespace {

/// Independent reference model: an explicit pruned set of passed sequence
/// numbers instead of a shifting bitmap.
class OracleDedup {
  public:
    explicit OracleDedup(int window) : window_(window) {}

    bool pass(std::uint16_t seq) {
        if (!seen_any_) {
            seen_any_ = true;
            highest_ = seq;
            passed_ = {seq};
            return true;
        }
        if (seq_newer(seq, highest_)) {
            highest_ = seq;
            passed_.insert(seq);
            prune();
            return true;
        }
        std::uint16_t behind =
            static_cast<std::uint16_t>(highest_ - seq); // mod 2^16
        if (behind >= window_)
            return false;
        if (passed_.count(seq))
            return false;
        passed_.insert(seq);
        return true;
    }

  private:
    void prune() {
        for (auto it = passed_.begin(); it != passed_.end();) {
            std::uint16_t behind = static_cast<std::uint16_t>(highest_ - *it);
            it = behind >= window_ ? passed_.erase(it) : std::next(it);
        }
    }

    unsigned window_;
    bool seen_any_{false};
    std::uint16_t highest_{0};
    std::set<std::uint16_t> passed_;
};

} // namespace

TEST_SUITE("dedup") {

TEST_CASE("serial comparison wraps at 2^15") {
    CHECK(seq_newer(1, 0));
    CHECK_FALSE(seq_newer(0, 1));
    CHECK_FALSE(seq_newer(5, 5));
    CHECK(seq_newer(0, 65535)); // wraparound
    CHECK(seq_newer(100, 65500));
    CHECK_FALSE(seq_newer(65500, 100));
    CHECK(seq_newer(32767, 0));
    CHECK_FALSE(seq_newer(32768, 0)); // exactly half the space is not newer
}

TEST_CASE("window bounds are enforced") {
    CHECK_THROWS_AS(DedupState(0), ConfigError);
    CHECK_THROWS_AS(DedupState(-3), ConfigError);
    CHECK_THROWS_AS(DedupState(65), ConfigError);
    CHECK_NOTHROW(DedupState(1));
    CHECK_NOTHROW(DedupState(64));
}

TEST_CASE("first copy passes, repeat copies discard") {
    DedupState d(64);
    CHECK(d.accept(10, micros(1)) == DedupVerdict::Pass);
    CHECK(d.accept(10, micros(2)) == DedupVerdict::Discard);
    CHECK(d.accept(10, micros(3)) == DedupVerdict::Discard);
    CHECK(d.counters().passed == 1);
    CHECK(d.counters().discarded == 2);
    CHECK(d.counters().out_of_window == 0);
}

TEST_CASE("reordered arrivals inside the window pass once") {
    DedupState d(8);
    CHECK(d.accept(5, micros(1)) == DedupVerdict::Pass);
    CHECK(d.accept(3, micros(2)) == DedupVerdict::Pass);
    CHECK(d.accept(4, micros(3)) == DedupVerdict::Pass);
    CHECK(d.accept(3, micros(4)) == DedupVerdict::Discard);
    CHECK(d.accept(6, micros(5)) == DedupVerdict::Pass);
    CHECK(d.counters().passed == 4);
    CHECK(d.counters().discarded == 1);
}

TEST_CASE("arrivals behind the window are counted separately") {
    DedupState d(4);
    CHECK(d.accept(10, micros(1)) == DedupVerdict::Pass);
    CHECK(d.accept(7, micros(2)) == DedupVerdict::Pass);  // behind by 3
    CHECK(d.accept(6, micros(3)) == DedupVerdict::Discard); // behind by 4
    CHECK(d.counters().out_of_window == 1);
    CHECK(d.counters().discarded == 0);
}

TEST_CASE("a jump past the window forgets old history") {
    DedupState d(64);
    CHECK(d.accept(0, micros(1)) == DedupVerdict::Pass);
    CHECK(d.accept(100, micros(2)) == DedupVerdict::Pass);
    // 37 is within 64 of 100 and was never seen: the old bitmap must not
    // leak into the new window
    CHECK(d.accept(37, micros(3)) == DedupVerdict::Pass);
    CHECK(d.accept(37, micros(4)) == DedupVerdict::Discard);
    CHECK(d.accept(36, micros(5)) == DedupVerdict::Discard); // behind by 64
    CHECK(d.counters().out_of_window == 1);
}

TEST_CASE("sequence numbers wrap seamlessly") {
    DedupState d(16);
    CHECK(d.accept(65534, micros(1)) == DedupVerdict::Pass);
    CHECK(d.accept(65535, micros(2)) == DedupVerdict::Pass);
    CHECK(d.accept(0, micros(3)) == DedupVerdict::Pass);
    CHECK(d.accept(1, micros(4)) == DedupVerdict::Pass);
    CHECK(d.accept(65535, micros(5)) == DedupVerdict::Discard);
    CHECK(d.accept(65527, micros(6)) == DedupVerdict::Pass); // behind by 10
    CHECK(d.counters().passed == 5);
}

TEST_CASE("silence resets history instead of discarding a restart") {
    DedupState d(64, seconds(2));
    CHECK(d.accept(5, micros(1)) == DedupVerdict::Pass);
    // same seq after more than 2 s of silence is a restarted sender
    CHECK(d.accept(5, seconds(3)) == DedupVerdict::Pass);
    // and an old seq right after does not look stale
    CHECK(d.accept(4, seconds(3) + micros(1)) == DedupVerdict::Pass);
    CHECK(d.counters().passed == 3);
}

TEST_CASE("explicit stale reset") {
    DedupState d(64, seconds(2));
    d.accept(9, micros(1));
    d.reset_if_stale(micros(2));
    CHECK(d.accept(9, micros(3)) == DedupVerdict::Discard); // not stale yet
    d.reset_if_stale(seconds(10));
    CHECK(d.accept(9, seconds(10)) == DedupVerdict::Pass);
}

TEST_CASE("snapshot and restore move history but not counters") {
    DedupState a(64);
    a.accept(7, micros(1));
    a.accept(8, micros(2));
    a.accept(8, micros(3)); // discard

    DedupState b(64);
    b.restore(a.snapshot());
    CHECK(b.accept(8, micros(4)) == DedupVerdict::Discard);
    CHECK(b.accept(7, micros(5)) == DedupVerdict::Discard);
    CHECK(b.accept(9, micros(6)) == DedupVerdict::Pass);
    CHECK(b.counters().passed == 1); // b's own measurements only
    CHECK(a.counters().passed == 2);
}

TEST_CASE("random walks match the reference model exactly") {
    RngStream rng(2024, "dedup-walk");
    for (int trial = 0; trial < 400; ++trial) {
        int window = 1 + static_cast<int>(rng.next_u64() % 64);
        DedupState d(window, seconds(1000)); // staleness out of the picture
        OracleDedup oracle(window);

        // start near the wrap point half the time
        std::uint16_t base =
            (trial % 2) ? static_cast<std::uint16_t>(65500) : 0;
        std::uint16_t head = base;
        SimTime t = kTimeZero;
        for (int step = 0; step < 250; ++step) {
            t += micros(1);
            std::uint16_t seq;
            double roll = rng.next_unit();
            if (roll < 0.55) {
                seq = head++;
            } else if (roll < 0.85) {
                // replay something recent: duplicate or late copy
                seq = static_cast<std::uint16_t>(
                    head - 1 - rng.next_u64() % (window + 4));
            } else {
                // reordered early arrival within the window
                seq = static_cast<std::uint16_t>(head + rng.next_u64() % 8);
            }
            bool got = d.accept(seq, t) == DedupVerdict::Pass;
            bool want = oracle.pass(seq);
            REQUIRE_MESSAGE(got == want,
                            "trial ", trial, " step ", step, " window ",
                            window, " seq ", seq);
        }
    }
}

} // TEST_SUITE
