#include "hrsim/simulation.hpp"

#include <algorithm>
#include <functional>

#include "hrsim/errors.hpp"

namespace hrsim {

Simulation::Simulation(ScenarioSpec spec, RunOptions opts)
    : spec_(std::move(spec)), opts_(opts) {
    spec_.validate();
    build();
}

HrSta& Simulation::sta(const std::string& id) {
    auto it = stas_.find(id);
    if (it == stas_.end())
        throw ConfigError("no such STA: " + id);
    return *it->second;
}

HrAp& Simulation::ap(const std::string& id) {
    auto it = aps_.find(id);
    if (it == aps_.end())
        throw ConfigError("no such AP: " + id);
    return *it->second;
}

EthernetHost& Simulation::host(const std::string& id) {
    auto it = hosts_.find(id);
    if (it == hosts_.end())
        throw ConfigError("no such host: " + id);
    return *it->second;
}

WirelessParams Simulation::link_params(const StaSpec& sta,
                                       std::size_t link) const {
    const auto& l = sta.links.at(link);
    return l.radio ? *l.radio : spec_.radio;
}

MacAddress Simulation::app_mac(const std::string& node_id) const {
    for (const auto& h : spec_.hosts)
        if (h.id == node_id)
            return h.mac;
    for (const auto& s : spec_.stas)
        if (s.id == node_id)
            return s.links.at(s.primary).mac;
    throw ConfigError("no application endpoint named " + node_id);
}

void Simulation::build() {
    core_ = std::make_unique<SimCore>(spec_.seed);
    core_->trace().enable(opts_.trace);

    switch_ = std::make_unique<LearningSwitch>(*core_, "sw0", spec_.mac_age);
    for (const auto& h : spec_.hosts) {
        hosts_[h.id] = std::make_unique<EthernetHost>(*core_, h.id, h.mac,
                                                      opts_.keep_frames);
        WiredNode::connect(*switch_, *hosts_[h.id], spec_.wired_latency);
    }
    HrAp::Options ap_opts{spec_.dedup_window, spec_.dedup_stale};
    for (const auto& a : spec_.aps) {
        std::vector<HrAp::ApLink> links;
        for (const auto& l : a.links)
            links.push_back({l.link_id, l.channel});
        aps_[a.id] = std::make_unique<HrAp>(*core_, a.id, a.wired_mac,
                                            std::move(links), ap_opts);
        WiredNode::connect(*switch_, *aps_[a.id], spec_.wired_latency);
    }
    HrSta::Options sta_opts{spec_.cross_link_abort, spec_.dedup_window,
                            spec_.dedup_stale, opts_.keep_frames};
    for (const auto& s : spec_.stas)
        stas_[s.id] = std::make_unique<HrSta>(*core_, s.mle(), sta_opts);

    // static infrastructure directory, then the initial serving map
    for (auto& [id, ap] : aps_) {
        for (const auto& a : spec_.aps)
            ap->provision_ap(a.id, a.wired_mac);
        for (const auto& s : spec_.stas) {
            std::vector<std::string> link_ids;
            for (const auto& l : s.links)
                link_ids.push_back(l.link_id);
            ap->provision_sta(s.id, std::move(link_ids), s.primary,
                              s.links.at(s.primary).mac);
        }
        for (const auto& s : spec_.stas)
            for (const auto& l : s.links)
                ap->note_serving(s.id, l.link_id, l.ap);
    }

    for (const auto& s : spec_.stas) {
        for (std::size_t i = 0; i < s.links.size(); ++i) {
            const auto& l = s.links[i];
            HrAp& ap = *aps_.at(l.ap);
            const auto& al = spec_.aps;
            std::size_t ap_link = 0;
            for (const auto& a : al)
                if (a.id == l.ap)
                    for (std::size_t k = 0; k < a.links.size(); ++k)
                        if (a.links[k].link_id == l.ap_link)
                            ap_link = k;
            ap.associate(*stas_.at(s.id), i, ap_link, link_params(s, i),
                         false);
            links_ever_[s.id].push_back(ap.link_for(s.id, i));
        }
        HrAp& first = *aps_.at(s.links.front().ap);
        auto e = first.election(s.id);
        if (!e)
            throw InvariantViolation("no primary AP electable for " + s.id);
        aps_.at(e->ap)->grant_duty(s.id);
    }

    for (const auto& f : spec_.flows)
        if (f.deadline)
            core_->metrics().set_flow_deadline(f.id, *f.deadline);
}

void Simulation::schedule_flow(const FlowSpec& f) {
    MacAddress dst = app_mac(f.dst);
    bool from_sta = stas_.count(f.src) > 0;
    auto emit = std::make_shared<std::function<void(std::uint64_t)>>();
    *emit = [this, f, dst, from_sta, emit](std::uint64_t remaining) {
        if (from_sta)
            stas_.at(f.src)->originate(dst, f.id, f.rc, f.ac, f.payload_len);
        else
            hosts_.at(f.src)->originate(dst, f.id, f.rc, f.ac, f.payload_len);
        if (remaining > 1)
            core_->engine().schedule_in(f.period, [emit, remaining]() {
                (*emit)(remaining - 1);
            });
    };
    core_->engine().schedule_at(f.start, [emit, count = f.count]() {
        (*emit)(count);
    });
}

void Simulation::schedule_moves() {
    for (const auto& m : spec_.moves) {
        const StaSpec* ss = nullptr;
        for (const auto& s : spec_.stas)
            if (s.id == m.sta)
                ss = &s;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < ss->links.size(); ++i)
            if (ss->links[i].link_id == m.link_id)
                idx = i;
        WirelessParams params = link_params(*ss, idx);
        auto prev = std::make_shared<std::pair<std::string, std::size_t>>();

        core_->engine().schedule_at(m.at, [this, m, idx, prev]() {
            HrSta& s = *stas_.at(m.sta);
            HrAp* from = s.serving_ap(idx);
            if (!from)
                throw InvariantViolation("move of unassociated link " +
                                         m.sta + "/" + m.link_id);
            auto al = from->ap_link_of(m.sta, idx);
            *prev = {from->id(), al.value_or(0)};
            core_->trace().record(core_->now(), m.sta, "reassoc_begin", -1,
                                  m.link_id,
                                  "from=" + from->id() + " to=" + m.to_ap);
            from->disassociate(s, idx, true);
        });

        core_->engine().schedule_at(
            m.at + m.gap, [this, m, idx, prev, params]() {
                HrSta& s = *stas_.at(m.sta);
                if (m.fail) {
                    HrAp& back = *aps_.at(prev->first);
                    back.associate(s, idx, prev->second, params, true);
                    ++moves_reverted_;
                    core_->trace().record(core_->now(), m.sta,
                                          "reassoc_revert", -1, m.link_id,
                                          "back_to=" + prev->first);
                    links_ever_[m.sta].push_back(
                        back.link_for(m.sta, idx));
                    return;
                }
                HrAp& to = *aps_.at(m.to_ap);
                std::size_t al = 0;
                for (std::size_t k = 0; k < to.ap_links().size(); ++k)
                    if (to.ap_links()[k].link_id == m.to_ap_link)
                        al = k;
                to.associate(s, idx, al, params, true);
                ++moves_done_;
                core_->trace().record(core_->now(), m.sta, "reassoc_end", -1,
                                      m.link_id, "at=" + m.to_ap);
                links_ever_[m.sta].push_back(to.link_for(m.sta, idx));
            });
    }
}

RunResult Simulation::run() {
    if (ran_)
        throw ConfigError("a Simulation runs once; build a fresh one");
    ran_ = true;

    for (const auto& f : spec_.flows)
        schedule_flow(f);
    schedule_moves();

    RunSummary horizon = core_->engine().run(spec_.duration);
    RunSummary drain =
        core_->engine().run_until_idle(spec_.duration + seconds(10));
    if (!drain.drained)
        throw InvariantViolation("simulation did not drain after horizon");

    MetricsSummary m = core_->metrics().summarize();
    if (m.total.in_flight != 0)
        throw InvariantViolation(
            std::to_string(m.total.in_flight) +
            " frames neither delivered nor lost after drain");

    RunResult r;
    r.metrics = m;
    r.events = horizon.events_processed + drain.events_processed;
    r.end_time = drain.end_time;
    r.report = make_report(m, r.events, r.end_time);
    if (opts_.trace)
        r.trace_tsv = core_->trace().tsv();
    return r;
}

namespace {

ojson latency_json(const LatencySummary& l) {
    return ojson{{"count", l.count},   {"mean_us", l.mean_us},
                 {"p50_us", l.p50_us}, {"p95_us", l.p95_us},
                 {"p99_us", l.p99_us}, {"min_us", l.min_us},
                 {"max_us", l.max_us}};
}

ojson flow_json(const FlowSummary& f) {
    return ojson{{"offered", f.offered},
                 {"delivered", f.delivered},
                 {"lost", f.lost},
                 {"in_flight", f.in_flight},
                 {"loss_rate", f.loss_rate},
                 {"deadline_missed", f.deadline_missed},
                 {"latency", latency_json(f.latency)}};
}

ojson dedup_json(const std::map<std::string, DedupState>& m) {
    ojson j = ojson::object();
    for (const auto& [key, st] : m)
        j[key] = ojson{{"passed", st.counters().passed},
                       {"discarded", st.counters().discarded},
                       {"out_of_window", st.counters().out_of_window}};
    return j;
}

} // namespace

ojson Simulation::make_report(const MetricsSummary& m, std::uint64_t events,
                              SimTime end_time) const {
    ojson j;
    j["scenario"] = spec_.name;
    j["seed"] = spec_.seed;
    j["engine"] = ojson{{"events", events}, {"end_time_ns", end_time.ns}};

    ojson totals = flow_json(m.total);
    totals["double_deliveries"] = m.double_deliveries;
    j["totals"] = totals;

    j["flows"] = ojson::array();
    for (const auto& fs : m.flows) {
        ojson fj = flow_json(fs);
        ojson row;
        row["id"] = fs.flow;
        for (const auto& f : spec_.flows)
            if (f.id == fs.flow) {
                row["name"] = f.name;
                row["rc"] = f.rc.str();
            }
        row.update(fj);
        j["flows"].push_back(row);
    }

    j["links"] = ojson::array();
    for (const auto& [sid, links] : links_ever_) {
        for (const auto& link : links) {
            if (!link)
                continue;
            const auto& c = link->counters();
            j["links"].push_back(ojson{{"name", link->id()},
                                       {"transmissions", c.transmissions},
                                       {"attempts", c.attempts},
                                       {"delivered", c.delivered},
                                       {"dropped", c.dropped},
                                       {"aborted", c.aborted},
                                       {"airtime_ns", c.airtime.ns}});
        }
    }

    j["aps"] = ojson::object();
    for (const auto& [id, ap] : aps_) {
        const auto& c = ap->counters();
        j["aps"][id] =
            ojson{{"forwarded_wired", c.forwarded_wired},
                  {"distributed", c.distributed},
                  {"relayed_up", c.relayed_up},
                  {"relay_forwarded", c.relay_forwarded},
                  {"relayed_down", c.relayed_down},
                  {"relay_suppressed", c.relay_suppressed},
                  {"misdirected_drops", c.misdirected_drops},
                  {"no_duty_drops", c.no_duty_drops},
                  {"stale_path_drops", c.stale_path_drops},
                  {"air_copy_drops", c.air_copy_drops},
                  {"pap_fallback_elections", c.pap_fallback_elections},
                  {"cedes_tx", c.cedes_tx},
                  {"cedes_rx", c.cedes_rx},
                  {"control_rx", c.control_rx},
                  {"ignored", c.ignored},
                  {"uplink_dedup", dedup_json(ap->uplink_dedup())}};
    }

    j["stas"] = ojson::object();
    for (const auto& [id, st] : stas_) {
        const auto& c = st->counters();
        j["stas"][id] =
            ojson{{"originated", c.originated},
                  {"copies_sent", c.copies_sent},
                  {"no_link_drops", c.no_link_drops},
                  {"frames_lost", c.frames_lost},
                  {"delivered", c.delivered},
                  {"siblings_aborted", c.siblings_aborted},
                  {"transparency_violations", c.transparency_violations},
                  {"downlink_dedup", dedup_json(st->downlink_dedup())}};
    }

    j["hosts"] = ojson::object();
    for (const auto& [id, h] : hosts_) {
        const auto& c = h->counters();
        j["hosts"][id] =
            ojson{{"originated", c.originated},
                  {"delivered", c.delivered},
                  {"ignored", c.ignored},
                  {"transparency_violations", c.transparency_violations}};
    }

    const auto& sc = switch_->counters();
    j["switch"] = ojson{{"forwarded", sc.forwarded},
                        {"flooded", sc.flooded},
                        {"filtered", sc.filtered}};
    j["moves"] = ojson{{"done", moves_done_}, {"reverted", moves_reverted_}};
    return j;
}

} // namespace hrsim
