#include "hrsim/engine.hpp"

#include "hrsim/errors.hpp"

namespace hrsim {

EventId Engine::schedule_at(SimTime at, std::function<void()> fn) {
    if (at < now_) {
        throw ConfigError("schedule_at: t=" + at.str() + " is in the past (now=" +
                          now_.str() + ")");
    }
    EventId id = next_id_++;
    pending_.insert(id);
    queue_.push(Item{at, id, std::move(fn)});
    return id;
}

EventId Engine::schedule_in(SimTime delay, std::function<void()> fn) {
    return schedule_at(now_ + delay, std::move(fn));
}

bool Engine::cancel(EventId id) {
    auto it = pending_.find(id);
    if (it == pending_.end()) return false;
    pending_.erase(it);
    cancelled_.insert(id);
    return true;
}

bool Engine::step() {
    while (!queue_.empty()) {
        Item item = queue_.top();
        queue_.pop();
        if (cancelled_.erase(item.id)) continue;
        pending_.erase(item.id);
        now_ = item.at; // monotone: heap order guarantees item.at >= now_
        ++processed_;
        item.fn();
        return true;
    }
    return false;
}

RunSummary Engine::run(SimTime until) {
    std::uint64_t before = processed_;
    while (!queue_.empty() && queue_.top().at <= until) {
        if (!step()) break;
    }
    // drop any cancelled leftovers at the front so queue_empty() is accurate
    while (!queue_.empty() && cancelled_.count(queue_.top().id)) {
        cancelled_.erase(queue_.top().id);
        queue_.pop();
    }
    if (until > now_) now_ = until;
    return RunSummary{processed_ - before, now_, queue_.empty()};
}

RunSummary Engine::run_until_idle(SimTime hard_limit) {
    std::uint64_t before = processed_;
    while (!queue_.empty() && queue_.top().at <= hard_limit) {
        if (!step()) break;
    }
    while (!queue_.empty() && cancelled_.count(queue_.top().id)) {
        cancelled_.erase(queue_.top().id);
        queue_.pop();
    }
    return RunSummary{processed_ - before, now_, queue_.empty()};
}

} // namespace hrsim
