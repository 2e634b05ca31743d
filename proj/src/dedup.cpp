#include "hrsim/dedup.hpp"

#include "hrsim/errors.hpp"

namespace hrsim {

bool seq_newer(std::uint16_t a, std::uint16_t b) {
    std::uint16_t d = static_cast<std::uint16_t>(a - b);
    return d != 0 && d < 0x8000;
}

DedupState::DedupState(int window, SimTime stale_after)
    : window_(window), stale_after_(stale_after) {
    if (window < 1 || window > 64)
        throw ConfigError("dedup window must be in [1, 64], got " +
                          std::to_string(window));
}

DedupVerdict DedupState::accept(std::uint16_t seq, SimTime at) {
    reset_if_stale(at);
    last_arrival_ = at;

    if (!seen_any_) {
        seen_any_ = true;
        highest_ = seq;
        bitmap_ = 1;
        ++counters_.passed;
        return DedupVerdict::Pass;
    }

    if (seq_newer(seq, highest_)) {
        std::uint16_t advance = static_cast<std::uint16_t>(seq - highest_);
        bitmap_ = advance >= 64 ? 0 : bitmap_ << advance;
        bitmap_ |= 1;
        highest_ = seq;
        ++counters_.passed;
        return DedupVerdict::Pass;
    }

    std::uint16_t behind = static_cast<std::uint16_t>(highest_ - seq);
    if (behind >= static_cast<std::uint16_t>(window_)) {
        ++counters_.out_of_window;
        return DedupVerdict::Discard;
    }
    std::uint64_t bit = 1ULL << behind;
    if (bitmap_ & bit) {
        ++counters_.discarded;
        return DedupVerdict::Discard;
    }
    bitmap_ |= bit;
    ++counters_.passed;
    return DedupVerdict::Pass;
}

void DedupState::reset_if_stale(SimTime now) {
    if (seen_any_ && now - last_arrival_ >= stale_after_) {
        seen_any_ = false;
        highest_ = 0;
        bitmap_ = 0;
    }
}

} // namespace hrsim
