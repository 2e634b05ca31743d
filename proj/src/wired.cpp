#include "hrsim/wired.hpp"

#include "hrsim/errors.hpp"

namespace hrsim {

void WiredNode::connect(WiredNode& a, WiredNode& b, SimTime latency) {
    if (latency < kTimeZero)
        throw ConfigError("cable latency must be >= 0");
    std::size_t pa = a.ports_.size();
    std::size_t pb = b.ports_.size();
    a.ports_.push_back(Port{&b, pb, latency});
    b.ports_.push_back(Port{&a, pa, latency});
}

void WiredNode::send_wired(std::size_t port, const Frame& f) {
    const Port& p = ports_.at(port);
    WiredNode* peer = p.peer;
    std::size_t peer_port = p.peer_port;
    core_.engine().schedule_in(p.latency, [peer, peer_port, f]() {
        peer->on_wired_receive(f, peer_port);
    });
}

void WiredNode::send_wired_all_but(std::size_t except_port, const Frame& f) {
    for (std::size_t i = 0; i < ports_.size(); ++i)
        if (i != except_port)
            send_wired(i, f);
}

std::optional<std::size_t> LearningSwitch::lookup(const MacAddress& mac) {
    auto it = table_.find(mac);
    if (it == table_.end())
        return std::nullopt;
    if (core_.now() - it->second.last_seen > mac_age_) {
        table_.erase(it);
        return std::nullopt;
    }
    return it->second.port;
}

void LearningSwitch::on_wired_receive(const Frame& f, std::size_t port) {
    if (!f.sa.is_broadcast()) {
        auto it = table_.find(f.sa);
        if (it == table_.end() || it->second.port != port)
            core_.trace().record(core_.now(), id_, "learn",
                                 static_cast<std::int64_t>(f.frame_id),
                                 "port=" + std::to_string(port), f.sa.str());
        table_[f.sa] = TableEntry{port, core_.now()};
    }

    if (f.da.is_broadcast()) {
        ++counters_.flooded;
        core_.trace().record(core_.now(), id_, "flood",
                             static_cast<std::int64_t>(f.frame_id),
                             "port=" + std::to_string(port));
        send_wired_all_but(port, f);
        return;
    }

    auto out = lookup(f.da);
    if (!out) {
        ++counters_.flooded;
        core_.trace().record(core_.now(), id_, "flood",
                             static_cast<std::int64_t>(f.frame_id),
                             "port=" + std::to_string(port));
        send_wired_all_but(port, f);
        return;
    }
    if (*out == port) {
        ++counters_.filtered;
        core_.trace().record(core_.now(), id_, "filter",
                             static_cast<std::int64_t>(f.frame_id),
                             "port=" + std::to_string(port));
        return;
    }
    ++counters_.forwarded;
    core_.trace().record(core_.now(), id_, "fwd",
                         static_cast<std::int64_t>(f.frame_id),
                         "port=" + std::to_string(*out));
    send_wired(*out, f);
}

void EthernetHost::originate(const MacAddress& da, int flow,
                             ReliabilityCategory rc, AccessCategory ac,
                             std::size_t payload_len) {
    if (port_count() == 0)
        throw ConfigError("host " + id_ + " is not cabled");
    Frame f;
    f.da = da;
    f.sa = mac_;
    f.ether_type = kDefaultEtherType;
    f.payload.assign(payload_len, 0);
    f.rc = rc;
    f.ac = ac;
    f.origin_sa = mac_;
    f.created_at = core_.now();
    f.frame_id = core_.next_frame_id();
    f.flow = flow;
    core_.metrics().register_frame(f.frame_id, flow, f.created_at);
    ++counters_.originated;
    core_.trace().record(core_.now(), id_, "originate",
                         static_cast<std::int64_t>(f.frame_id),
                         "flow=" + std::to_string(flow),
                         "rc=" + f.rc.str());
    send_wired(0, f);
}

void EthernetHost::on_wired_receive(const Frame& f, std::size_t port) {
    (void)port;
    if (f.ether_type == kControlEtherType || f.da != mac_) {
        ++counters_.ignored;
        return;
    }
    bool clean = !f.y_tag && f.sa == f.origin_sa;
    if (!clean) {
        ++counters_.transparency_violations;
        core_.trace().record(core_.now(), id_, "transparency_violation",
                             static_cast<std::int64_t>(f.frame_id));
    }
    ++counters_.delivered;
    if (keep_frames_)
        received_.push_back(f);
    if (f.flow >= 0)
        core_.metrics().record_delivery(f.frame_id, core_.now());
    core_.trace().record(core_.now(), id_, "deliver",
                         static_cast<std::int64_t>(f.frame_id),
                         "flow=" + std::to_string(f.flow));
}

} // namespace hrsim
