#include "hrsim/channel.hpp"

#include <cmath>
#include <utility>

#include "hrsim/errors.hpp"

namespace hrsim {

void WirelessParams::check(const std::string& context) const {
    std::vector<std::string> bad;
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0))
        bad.push_back(context + ": loss_prob must be in [0, 1]");
    if (retry_limit < 0)
        bad.push_back(context + ": retry_limit must be >= 0");
    if (attempt_airtime <= kTimeZero)
        bad.push_back(context + ": attempt_airtime must be positive");
    if (ack_timeout < kTimeZero)
        bad.push_back(context + ": ack_timeout must be >= 0");
    if (!bad.empty())
        throw ValidationError(bad);
}

double WirelessParams::residual_loss() const {
    return std::pow(loss_prob, retry_limit + 1);
}

WirelessLink::WirelessLink(SimCore& core, std::string id, WirelessParams params)
    : core_(core), id_(std::move(id)), params_(params) {
    params_.check("link " + id_);
}

std::uint64_t WirelessLink::transmit(const Frame& f, DeliverFn on_delivered,
                                     DropFn on_dropped) {
    std::uint64_t tx_id = next_tx_id_++;
    ++counters_.transmissions;

    RngStream& rng = core_.rng("link/" + id_);
    int max_attempts = params_.retry_limit + 1;
    int attempts = 0;
    bool success = false;
    while (attempts < max_attempts) {
        ++attempts;
        if (!rng.bernoulli(params_.loss_prob)) {
            success = true;
            break;
        }
    }

    Chain chain;
    chain.frame = f;
    chain.on_dropped = on_dropped;

    SimTime slot = params_.attempt_airtime + params_.ack_timeout;
    for (int k = 1; k <= attempts; ++k) {
        SimTime start = slot * (k - 1);
        chain.events.push_back(core_.engine().schedule_in(start, [this, k,
                                                                  tx_id]() {
            ++counters_.attempts;
            counters_.airtime += params_.attempt_airtime;
            auto it = chains_.find(tx_id);
            if (it != chains_.end())
                core_.trace().record(core_.now(), id_, "tx_attempt",
                                     static_cast<std::int64_t>(
                                         it->second.frame.frame_id),
                                     "k=" + std::to_string(k));
        }));
    }

    if (success) {
        SimTime when = slot * (attempts - 1) + params_.attempt_airtime;
        int n = attempts;
        chain.events.push_back(
            core_.engine().schedule_in(when, [this, tx_id, n, on_delivered]() {
                auto it = chains_.find(tx_id);
                if (it == chains_.end())
                    return;
                Frame f = std::move(it->second.frame);
                chains_.erase(it);
                ++counters_.delivered;
                core_.trace().record(core_.now(), id_, "tx_deliver",
                                     static_cast<std::int64_t>(f.frame_id), "",
                                     "attempts=" + std::to_string(n));
                on_delivered(f);
            }));
    } else {
        SimTime when = slot * attempts;
        int n = attempts;
        chain.events.push_back(
            core_.engine().schedule_in(when, [this, tx_id, n]() {
                auto it = chains_.find(tx_id);
                if (it == chains_.end())
                    return;
                Frame f = std::move(it->second.frame);
                DropFn drop = std::move(it->second.on_dropped);
                chains_.erase(it);
                ++counters_.dropped;
                core_.trace().record(core_.now(), id_, "tx_drop",
                                     static_cast<std::int64_t>(f.frame_id), "",
                                     "reason=retry_exhausted attempts=" +
                                         std::to_string(n));
                drop(f, "retry_exhausted");
            }));
    }

    chains_.emplace(tx_id, std::move(chain));
    return tx_id;
}

bool WirelessLink::abort(std::uint64_t tx_id) {
    auto it = chains_.find(tx_id);
    if (it == chains_.end())
        return false;
    for (EventId ev : it->second.events)
        core_.engine().cancel(ev);
    core_.trace().record(core_.now(), id_, "tx_abort",
                         static_cast<std::int64_t>(it->second.frame.frame_id));
    chains_.erase(it);
    ++counters_.aborted;
    return true;
}

void WirelessLink::shutdown() {
    auto pending = std::move(chains_);
    chains_.clear();
    for (auto& [tx_id, chain] : pending) {
        for (EventId ev : chain.events)
            core_.engine().cancel(ev);
        ++counters_.dropped;
        core_.trace().record(core_.now(), id_, "tx_drop",
                             static_cast<std::int64_t>(chain.frame.frame_id),
                             "", "reason=link_down");
        chain.on_dropped(chain.frame, "link_down");
    }
}

} // namespace hrsim
