#include "hrsim/hr_sta.hpp"

#include <algorithm>

#include "hrsim/errors.hpp"
#include "hrsim/hr_ap.hpp"

namespace hrsim {

HrSta::HrSta(SimCore& core, MultiLinkElement mle, Options opts)
    : core_(core), mle_(std::move(mle)), opts_(opts) {
    mle_.check();
    attachments_.resize(mle_.affiliated.size());
}

void HrSta::attach_link(std::size_t link_index, HrAp* ap,
                        std::shared_ptr<WirelessLink> link) {
    if (link_index >= attachments_.size())
        throw ConfigError("STA " + id() + ": link index out of range");
    if (attachments_[link_index])
        throw ConfigError("STA " + id() + ": link " +
                          mle_.affiliated[link_index].link_id +
                          " is already associated");
    attachments_[link_index] = Attachment{ap, std::move(link)};
}

void HrSta::detach_link(std::size_t link_index) {
    if (link_index >= attachments_.size() || !attachments_[link_index])
        throw ConfigError("STA " + id() + ": detaching unassociated link");
    attachments_[link_index].reset();
}

bool HrSta::link_associated(std::size_t link_index) const {
    return link_index < attachments_.size() &&
           attachments_[link_index].has_value();
}

int HrSta::associated_count() const {
    int n = 0;
    for (const auto& a : attachments_)
        n += a.has_value() ? 1 : 0;
    return n;
}

HrAp* HrSta::serving_ap(std::size_t link_index) const {
    if (!link_associated(link_index))
        return nullptr;
    return attachments_[link_index]->ap;
}

std::vector<std::size_t> HrSta::pick_links(ReliabilityCategory rc) const {
    std::vector<std::size_t> out;
    if (rc.is_reliable()) {
        for (std::size_t i = 0;
             i < attachments_.size() &&
             out.size() < static_cast<std::size_t>(rc.redundancy);
             ++i)
            if (attachments_[i])
                out.push_back(i);
        return out;
    }
    if (attachments_[mle_.primary]) {
        out.push_back(mle_.primary);
        return out;
    }
    for (std::size_t i = 0; i < attachments_.size(); ++i)
        if (attachments_[i]) {
            out.push_back(i);
            break;
        }
    return out;
}

void HrSta::originate(const MacAddress& da, int flow, ReliabilityCategory rc,
                      AccessCategory ac, std::size_t payload_len) {
    Frame f;
    f.da = da;
    f.ether_type = kDefaultEtherType;
    f.payload.assign(payload_len, 0);
    f.rc = rc;
    f.ac = ac;
    f.origin = id();
    f.origin_sa = mle_.primary_mac();
    f.created_at = core_.now();
    f.frame_id = core_.next_frame_id();
    f.flow = flow;
    core_.metrics().register_frame(f.frame_id, flow, f.created_at);
    ++counters_.originated;

    auto links = pick_links(rc);
    core_.trace().record(core_.now(), id(), "originate",
                         static_cast<std::int64_t>(f.frame_id),
                         "flow=" + std::to_string(flow),
                         "rc=" + rc.str() + " copies=" +
                             std::to_string(links.size()));
    if (links.empty()) {
        ++counters_.no_link_drops;
        ++counters_.frames_lost;
        core_.metrics().record_loss(f.frame_id, core_.now());
        core_.trace().record(core_.now(), id(), "frame_lost",
                             static_cast<std::int64_t>(f.frame_id), "",
                             "reason=no_link");
        return;
    }

    if (rc.is_reliable()) {
        f.replicated = true;
        f.mld_seq = up_seq_.take();
    }

    auto& pend = pending_[f.frame_id];
    for (std::size_t i : links) {
        Attachment& att = *attachments_[i];
        Frame copy = f;
        copy.sa = mle_.affiliated[i].mac;
        HrAp* ap = att.ap;
        std::uint64_t tx = att.link->transmit(
            copy,
            [this, i, ap](const Frame& g) {
                on_copy_delivered(g.frame_id, i);
                ap->on_air_receive(g, *this, i);
            },
            [this, i](const Frame& g, const std::string&) {
                on_copy_dropped(g, i);
            });
        pend.push_back(PendingCopy{i, tx, att.link});
        ++counters_.copies_sent;
    }
}

void HrSta::on_copy_delivered(std::uint64_t frame_id, std::size_t link_index) {
    auto it = pending_.find(frame_id);
    if (it == pending_.end())
        return;
    auto& copies = it->second;
    copies.erase(std::remove_if(copies.begin(), copies.end(),
                                [&](const PendingCopy& c) {
                                    return c.link_index == link_index;
                                }),
                 copies.end());
    if (opts_.cross_link_abort) {
        for (auto& c : copies)
            if (c.link->abort(c.tx_id))
                ++counters_.siblings_aborted;
        copies.clear();
    }
    if (copies.empty())
        pending_.erase(it);
}

void HrSta::on_copy_dropped(const Frame& f, std::size_t link_index) {
    auto it = pending_.find(f.frame_id);
    if (it == pending_.end())
        return;
    auto& copies = it->second;
    copies.erase(std::remove_if(copies.begin(), copies.end(),
                                [&](const PendingCopy& c) {
                                    return c.link_index == link_index;
                                }),
                 copies.end());
    if (!copies.empty())
        return;
    pending_.erase(it);
    ++counters_.frames_lost;
    core_.metrics().record_loss(f.frame_id, core_.now());
    core_.trace().record(core_.now(), id(), "frame_lost",
                         static_cast<std::int64_t>(f.frame_id), "",
                         "reason=all_copies_dropped");
}

void HrSta::on_air_receive(const Frame& f, std::size_t link_index) {
    if (f.replicated) {
        auto it = dl_dedup_.find(f.origin);
        if (it == dl_dedup_.end())
            it = dl_dedup_
                     .emplace(f.origin, DedupState(opts_.dedup_window,
                                                   opts_.dedup_stale))
                     .first;
        DedupVerdict v = it->second.accept(f.mld_seq, core_.now());
        if (v == DedupVerdict::Discard) {
            core_.trace().record(core_.now(), id(), "dedup_discard",
                                 static_cast<std::int64_t>(f.frame_id),
                                 "link=" +
                                     mle_.affiliated[link_index].link_id,
                                 "origin=" + f.origin +
                                     " seq=" + std::to_string(f.mld_seq));
            return;
        }
        core_.trace().record(core_.now(), id(), "dedup_pass",
                             static_cast<std::int64_t>(f.frame_id),
                             "link=" + mle_.affiliated[link_index].link_id,
                             "origin=" + f.origin +
                                 " seq=" + std::to_string(f.mld_seq));
    }
    deliver_app(f);
}

void HrSta::deliver_app(const Frame& f) {
    bool clean = !f.y_tag && f.sa == f.origin_sa;
    if (!clean) {
        ++counters_.transparency_violations;
        core_.trace().record(core_.now(), id(), "transparency_violation",
                             static_cast<std::int64_t>(f.frame_id));
    }
    ++counters_.delivered;
    if (opts_.keep_frames)
        received_.push_back(f);
    if (f.flow >= 0)
        core_.metrics().record_delivery(f.frame_id, core_.now());
    core_.trace().record(core_.now(), id(), "deliver",
                         static_cast<std::int64_t>(f.frame_id),
                         "flow=" + std::to_string(f.flow));
}

} // namespace hrsim
