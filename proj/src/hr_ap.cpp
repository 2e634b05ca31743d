#include "hrsim/hr_ap.hpp"

#include <algorithm>

#include "hrsim/errors.hpp"

namespace hrsim {

HrAp::HrAp(SimCore& core, std::string id, MacAddress wired_mac,
           std::vector<ApLink> links, Options opts)
    : WiredNode(core, std::move(id)), wired_mac_(wired_mac),
      ap_links_(std::move(links)), opts_(opts) {
    if (ap_links_.empty())
        throw ConfigError("AP " + id_ + ": no radio links");
    ap_directory_[id_] = wired_mac_;
}

void HrAp::provision_ap(const std::string& ap_id,
                        const MacAddress& wired_mac) {
    ap_directory_[ap_id] = wired_mac;
}

void HrAp::provision_sta(const std::string& sta_id,
                         std::vector<std::string> link_ids, std::size_t primary,
                         const MacAddress& primary_mac) {
    sta_directory_[sta_id] = StaMeta{std::move(link_ids), primary, primary_mac};
    sta_by_primary_mac_[primary_mac] = sta_id;
}

void HrAp::note_serving(const std::string& sta_id, const std::string& link_id,
                        const std::string& ap_id) {
    // data seeding only; elections form once the view is complete
    serving_view_[sta_id][link_id] = ap_id;
}

std::optional<HrAp::Election> HrAp::election(const std::string& sta_id) const {
    auto it = elected_.find(sta_id);
    if (it == elected_.end())
        return std::nullopt;
    return it->second;
}

std::shared_ptr<WirelessLink> HrAp::link_for(const std::string& sta_id,
                                             std::size_t sta_link) const {
    auto it = local_.find(sta_id);
    if (it == local_.end())
        return nullptr;
    auto lt = it->second.links.find(sta_link);
    return lt == it->second.links.end() ? nullptr : lt->second.link;
}

std::optional<std::size_t> HrAp::ap_link_of(const std::string& sta_id,
                                            std::size_t sta_link) const {
    auto it = local_.find(sta_id);
    if (it == local_.end())
        return std::nullopt;
    auto lt = it->second.links.find(sta_link);
    if (lt == it->second.links.end())
        return std::nullopt;
    return lt->second.ap_link;
}

DedupState& HrAp::dedup_for(std::map<std::string, DedupState>& m,
                            const std::string& key) {
    auto it = m.find(key);
    if (it == m.end())
        it = m.emplace(key, DedupState(opts_.dedup_window, opts_.dedup_stale))
                 .first;
    return it->second;
}

void HrAp::settle_loss(const Frame& f) {
    if (f.flow >= 0)
        core_.metrics().record_loss(f.frame_id, core_.now());
}

Frame HrAp::make_control(const MacAddress& da, ControlBody body) {
    Frame f;
    f.da = da;
    f.sa = wired_mac_;
    f.ether_type = kControlEtherType;
    f.frame_id = core_.next_frame_id();
    f.control = std::make_shared<const ControlBody>(std::move(body));
    return f;
}

void HrAp::associate(HrSta& sta, std::size_t sta_link, std::size_t ap_link,
                     const WirelessParams& params, bool announce) {
    if (ap_link >= ap_links_.size())
        throw ConfigError("AP " + id_ + ": radio link index out of range");
    const auto& sl = sta.mle().affiliated.at(sta_link);
    if (sl.channel != ap_links_[ap_link].channel)
        throw ConfigError("AP " + id_ + "/" + ap_links_[ap_link].link_id +
                          " and STA " + sta.id() + "/" + sl.link_id +
                          " are on different channels");

    std::string link_name = sta.id() + "." + sl.link_id + "@" + id_;
    auto link = std::make_shared<WirelessLink>(core_, link_name, params);
    auto& ls = local_[sta.id()];
    ls.sta = &sta;
    if (!ls.links.emplace(sta_link, Attach{ap_link, link}).second)
        throw ConfigError("AP " + id_ + ": STA link " + sl.link_id +
                          " already associated here");
    sta.attach_link(sta_link, this, link);
    serving_view_[sta.id()][sl.link_id] = id_;
    core_.trace().record(core_.now(), id_, "assoc", -1, link_name);
    recompute_election(sta.id());
    if (announce)
        send_notice(sta.id(), sl.link_id, true);
}

void HrAp::disassociate(HrSta& sta, std::size_t sta_link, bool announce) {
    auto it = local_.find(sta.id());
    if (it == local_.end() || !it->second.links.count(sta_link))
        throw ConfigError("AP " + id_ + ": STA " + sta.id() +
                          " link is not associated here");
    const std::string link_id = sta.mle().affiliated.at(sta_link).link_id;
    it->second.links.at(sta_link).link->shutdown();
    it->second.links.erase(sta_link);
    if (it->second.links.empty())
        local_.erase(it);
    sta.detach_link(sta_link);

    auto vit = serving_view_.find(sta.id());
    if (vit != serving_view_.end()) {
        vit->second.erase(link_id);
        if (vit->second.empty())
            serving_view_.erase(vit);
    }
    core_.trace().record(core_.now(), id_, "disassoc", -1,
                         sta.id() + "." + link_id + "@" + id_);
    recompute_election(sta.id());
    if (announce)
        send_notice(sta.id(), link_id, false);
}

void HrAp::grant_duty(const std::string& sta_id) {
    duty_.insert(sta_id);
    core_.trace().record(core_.now(), id_, "pap_duty_grant", -1, sta_id);
}

void HrAp::recompute_election(const std::string& sta_id) {
    std::optional<Election> e;
    auto vit = serving_view_.find(sta_id);
    if (vit != serving_view_.end() && !vit->second.empty()) {
        const StaMeta& meta = sta_directory_.at(sta_id);
        const std::string& primary_link = meta.link_ids.at(meta.primary);
        auto p = vit->second.find(primary_link);
        if (p != vit->second.end()) {
            e = Election{p->second, false};
        } else {
            std::string lowest;
            for (const auto& [link, ap] : vit->second)
                if (lowest.empty() || ap < lowest)
                    lowest = ap;
            e = Election{lowest, true};
        }
    }

    auto cur = elected_.find(sta_id);
    bool changed = e ? (cur == elected_.end() || !(cur->second == *e))
                     : (cur != elected_.end());
    if (changed) {
        if (e) {
            elected_[sta_id] = *e;
            if (e->fallback)
                ++counters_.pap_fallback_elections;
            core_.trace().record(core_.now(), id_, "pap_elect", -1, sta_id,
                                 "ap=" + e->ap +
                                     " fallback=" + (e->fallback ? "1" : "0"));
        } else {
            elected_.erase(sta_id);
            core_.trace().record(core_.now(), id_, "pap_none", -1, sta_id);
        }
    }

    if (duty_.count(sta_id)) {
        if (!e) {
            duty_.erase(sta_id);
            core_.trace().record(core_.now(), id_, "pap_duty_drop", -1,
                                 sta_id);
        } else if (e->ap != id_) {
            send_cede(sta_id, e->ap);
            duty_.erase(sta_id);
        }
    }
}

void HrAp::send_notice(const std::string& sta_id, const std::string& link_id,
                       bool associated) {
    Frame f = make_control(MacAddress::broadcast(),
                           AssocNotice{sta_id, link_id, id_, "", associated});
    core_.trace().record(core_.now(), id_, "notice_tx",
                         static_cast<std::int64_t>(f.frame_id), sta_id,
                         "link=" + link_id +
                             " assoc=" + (associated ? "1" : "0"));
    send_wired(0, f);
}

void HrAp::send_cede(const std::string& sta_id, const std::string& to_ap) {
    PapCede cede{sta_id, false, {}};
    auto dit = up_dedup_.find(sta_id);
    if (dit != up_dedup_.end()) {
        cede.has_state = true;
        cede.up_state = dit->second.snapshot();
    }
    Frame f = make_control(ap_directory_.at(to_ap), std::move(cede));
    ++counters_.cedes_tx;
    core_.trace().record(core_.now(), id_, "pap_cede_tx",
                         static_cast<std::int64_t>(f.frame_id), sta_id,
                         "to=" + to_ap);
    send_wired(0, f);
}

void HrAp::on_air_receive(const Frame& f, HrSta& sta, std::size_t sta_link) {
    const std::string& sid = sta.id();
    if (duty_.count(sid)) {
        eliminate_and_forward(sid, f);
        return;
    }
    auto e = election(sid);
    if (e && e->ap != id_) {
        if (f.replicated &&
            dedup_for(relay_filter_, sid).accept(f.mld_seq, core_.now()) ==
                DedupVerdict::Discard) {
            ++counters_.relay_suppressed;
            core_.trace().record(core_.now(), id_, "relay_suppress",
                                 static_cast<std::int64_t>(f.frame_id), sid,
                                 "seq=" + std::to_string(f.mld_seq));
            return;
        }
        Frame tagged = add_ytag(f, f.da, f.mld_seq, kYFlagElimPending,
                                ap_directory_.at(e->ap), wired_mac_);
        ++counters_.relayed_up;
        core_.trace().record(core_.now(), id_, "relay_up",
                             static_cast<std::int64_t>(f.frame_id),
                             "to=" + e->ap,
                             "na=" + f.da.str() +
                                 " seq=" + std::to_string(f.mld_seq));
        send_wired(0, tagged);
        return;
    }
    // elected here but the duty handoff is still in flight, or no election
    ++counters_.no_duty_drops;
    core_.trace().record(core_.now(), id_, "drop",
                         static_cast<std::int64_t>(f.frame_id),
                         "link=" + std::to_string(sta_link),
                         "reason=no_duty");
    settle_loss(f);
}

void HrAp::eliminate_and_forward(const std::string& sta_id, Frame f) {
    if (f.replicated) {
        DedupVerdict v =
            dedup_for(up_dedup_, sta_id).accept(f.mld_seq, core_.now());
        if (v == DedupVerdict::Discard) {
            core_.trace().record(core_.now(), id_, "dedup_discard",
                                 static_cast<std::int64_t>(f.frame_id),
                                 sta_id, "seq=" + std::to_string(f.mld_seq));
            return;
        }
        core_.trace().record(core_.now(), id_, "dedup_pass",
                             static_cast<std::int64_t>(f.frame_id), sta_id,
                             "seq=" + std::to_string(f.mld_seq));
    }
    f.sa = sta_directory_.at(sta_id).primary_mac;
    f.y_tag.reset();
    // wireless-to-wireless through this same AP never reaches the wire
    auto hairpin = sta_by_primary_mac_.find(f.da);
    if (hairpin != sta_by_primary_mac_.end() &&
        duty_.count(hairpin->second)) {
        core_.trace().record(core_.now(), id_, "fwd_local",
                             static_cast<std::int64_t>(f.frame_id),
                             hairpin->second);
        distribute_downlink(hairpin->second, f);
        return;
    }
    ++counters_.forwarded_wired;
    core_.trace().record(core_.now(), id_, "fwd_wired",
                         static_cast<std::int64_t>(f.frame_id), sta_id);
    send_wired(0, f);
}

void HrAp::on_wired_receive(const Frame& f, std::size_t port) {
    (void)port;
    if (f.ether_type == kControlEtherType && f.control) {
        handle_control(f);
        return;
    }
    if (f.y_tag) {
        handle_relay(f);
        return;
    }
    if (f.da == wired_mac_ || f.da.is_broadcast()) {
        ++counters_.ignored;
        return;
    }
    auto sit = sta_by_primary_mac_.find(f.da);
    if (sit == sta_by_primary_mac_.end()) {
        ++counters_.ignored; // flooded copy meant for a host or unknown node
        return;
    }
    const std::string& sid = sit->second;
    if (duty_.count(sid)) {
        distribute_downlink(sid, f);
        return;
    }
    if (local_.count(sid)) {
        ++counters_.no_duty_drops;
        core_.trace().record(core_.now(), id_, "drop",
                             static_cast<std::int64_t>(f.frame_id), sid,
                             "reason=no_duty");
    } else {
        ++counters_.stale_path_drops;
        core_.trace().record(core_.now(), id_, "drop",
                             static_cast<std::int64_t>(f.frame_id), sid,
                             "reason=stale_path");
    }
    settle_loss(f);
}

void HrAp::handle_control(const Frame& f) {
    ++counters_.control_rx;
    if (const auto* n = std::get_if<AssocNotice>(f.control.get())) {
        if (n->ap_id == id_)
            return;
        if (n->associated) {
            serving_view_[n->sta_mld][n->link_id] = n->ap_id;
        } else {
            auto vit = serving_view_.find(n->sta_mld);
            if (vit != serving_view_.end()) {
                vit->second.erase(n->link_id);
                if (vit->second.empty())
                    serving_view_.erase(vit);
            }
        }
        core_.trace().record(core_.now(), id_, "notice_rx",
                             static_cast<std::int64_t>(f.frame_id), n->sta_mld,
                             "link=" + n->link_id + " ap=" + n->ap_id +
                                 " assoc=" + (n->associated ? "1" : "0"));
        recompute_election(n->sta_mld);
        return;
    }
    if (const auto* c = std::get_if<PapCede>(f.control.get())) {
        if (f.da != wired_mac_)
            return;
        duty_.insert(c->sta_mld);
        if (c->has_state)
            dedup_for(up_dedup_, c->sta_mld).restore(c->up_state);
        ++counters_.cedes_rx;
        core_.trace().record(core_.now(), id_, "pap_duty_rx",
                             static_cast<std::int64_t>(f.frame_id),
                             c->sta_mld);
        recompute_election(c->sta_mld);
    }
}

void HrAp::handle_relay(const Frame& f) {
    if (f.da != wired_mac_) {
        ++counters_.ignored; // flooded relay copy addressed to another AP
        return;
    }
    std::uint8_t flags = f.y_tag->flags;
    Frame inner = strip_ytag(f);

    if (flags & kYFlagElimPending) {
        std::string sid = inner.origin; // copy: inner may be moved below
        if (sid.empty() || !sta_directory_.count(sid)) {
            ++counters_.misdirected_drops;
            core_.trace().record(core_.now(), id_, "drop",
                                 static_cast<std::int64_t>(inner.frame_id),
                                 sid, "reason=misdirected");
            settle_loss(inner);
            return;
        }
        if (duty_.count(sid)) {
            eliminate_and_forward(sid, std::move(inner));
            return;
        }
        auto e = election(sid);
        if (e && e->ap != id_ && inner.relay_hops < kMaxRelayHops) {
            ++inner.relay_hops;
            Frame tagged =
                add_ytag(inner, inner.da, inner.mld_seq, kYFlagElimPending,
                         ap_directory_.at(e->ap), wired_mac_);
            ++counters_.relay_forwarded;
            core_.trace().record(core_.now(), id_, "relay_fwd",
                                 static_cast<std::int64_t>(inner.frame_id),
                                 "to=" + e->ap,
                                 "hops=" + std::to_string(inner.relay_hops));
            send_wired(0, tagged);
            return;
        }
        ++counters_.no_duty_drops;
        core_.trace().record(core_.now(), id_, "drop",
                             static_cast<std::int64_t>(inner.frame_id), sid,
                             "reason=relay_no_duty");
        settle_loss(inner);
        return;
    }

    // Downlink distribution order: transmit on our links named by the tag.
    auto sit = sta_by_primary_mac_.find(inner.da);
    if (sit == sta_by_primary_mac_.end()) {
        ++counters_.misdirected_drops;
        core_.trace().record(core_.now(), id_, "drop",
                             static_cast<std::int64_t>(inner.frame_id), "",
                             "reason=misdirected");
        settle_loss(inner);
        return;
    }
    auto lit = local_.find(sit->second);
    std::size_t sent = 0;
    if (lit != local_.end()) {
        for (auto& [idx, attach] : lit->second.links) {
            if (flags & ytag_link_bit(idx)) {
                transmit_to_sta(lit->second, idx, inner);
                ++sent;
            }
        }
    }
    if (sent == 0) {
        ++counters_.misdirected_drops;
        core_.trace().record(core_.now(), id_, "drop",
                             static_cast<std::int64_t>(inner.frame_id),
                             sit->second, "reason=relay_gone");
        settle_loss(inner);
    }
}

void HrAp::distribute_downlink(const std::string& sta_id, const Frame& f) {
    auto vit = serving_view_.find(sta_id);
    if (vit == serving_view_.end() || vit->second.empty()) {
        ++counters_.misdirected_drops;
        core_.trace().record(core_.now(), id_, "drop",
                             static_cast<std::int64_t>(f.frame_id), sta_id,
                             "reason=no_links");
        settle_loss(f);
        return;
    }
    const StaMeta& meta = sta_directory_.at(sta_id);

    // candidate (link index, serving ap) pairs in link-index order
    std::vector<std::pair<std::size_t, std::string>> candidates;
    for (std::size_t i = 0; i < meta.link_ids.size(); ++i) {
        auto it = vit->second.find(meta.link_ids[i]);
        if (it != vit->second.end())
            candidates.emplace_back(i, it->second);
    }

    std::vector<std::pair<std::size_t, std::string>> targets;
    if (f.rc.is_reliable()) {
        for (const auto& c : candidates) {
            if (targets.size() >= static_cast<std::size_t>(f.rc.redundancy))
                break;
            targets.push_back(c);
        }
    } else {
        auto prim = std::find_if(candidates.begin(), candidates.end(),
                                 [&](const auto& c) {
                                     return c.first == meta.primary;
                                 });
        if (prim != candidates.end())
            targets.push_back(*prim);
        else if (!candidates.empty())
            targets.push_back(candidates.front());
    }
    if (targets.empty()) {
        ++counters_.misdirected_drops;
        core_.trace().record(core_.now(), id_, "drop",
                             static_cast<std::int64_t>(f.frame_id), sta_id,
                             "reason=no_links");
        settle_loss(f);
        return;
    }

    Frame g = f;
    g.origin = id_;
    g.replicated = f.rc.is_reliable();
    g.mld_seq = g.replicated ? dl_seq_[sta_id].take() : 0;
    ++counters_.distributed;
    core_.trace().record(core_.now(), id_, "dl_distribute",
                         static_cast<std::int64_t>(g.frame_id), sta_id,
                         "copies=" + std::to_string(targets.size()) +
                             " seq=" + std::to_string(g.mld_seq));

    std::map<std::string, std::uint8_t> remote; // ap -> link bitmap
    for (const auto& [idx, ap] : targets) {
        if (ap == id_) {
            auto lit = local_.find(sta_id);
            if (lit == local_.end() || !lit->second.links.count(idx)) {
                ++counters_.misdirected_drops;
                continue;
            }
            transmit_to_sta(lit->second, idx, g);
        } else {
            remote[ap] |= ytag_link_bit(idx);
        }
    }
    for (const auto& [ap, bits] : remote) {
        Frame tagged = add_ytag(g, g.da, g.mld_seq, bits,
                                ap_directory_.at(ap), wired_mac_);
        ++counters_.relayed_down;
        core_.trace().record(core_.now(), id_, "relay_dl",
                             static_cast<std::int64_t>(g.frame_id),
                             "to=" + ap,
                             "na=" + g.da.str() +
                                 " seq=" + std::to_string(g.mld_seq));
        send_wired(0, tagged);
    }
}

void HrAp::transmit_to_sta(LocalSta& ls, std::size_t sta_link,
                           const Frame& f) {
    Frame g = rewrite_egress_to_air(f, ls.sta->mle(), sta_link);
    g.sa = f.origin_sa;
    HrSta* sta = ls.sta;
    ls.links.at(sta_link).link->transmit(
        g,
        [sta, sta_link](const Frame& h) { sta->on_air_receive(h, sta_link); },
        [this](const Frame& h, const std::string&) {
            ++counters_.air_copy_drops;
            settle_loss(h);
        });
}

} // namespace hrsim
