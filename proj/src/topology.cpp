#include "hrsim/topology.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "hrsim/errors.hpp"

namespace hrsim {

MultiLinkElement StaSpec::mle() const {
    MultiLinkElement m;
    m.mld_id = id;
    m.primary = primary;
    for (const auto& l : links)
        m.affiliated.push_back({l.link_id, l.channel, l.mac});
    return m;
}

namespace {

/// Replays the association timeline of one STA's links across its moves.
/// Returns false when a move is inconsistent (unknown link, no-op target).
struct Timeline {
    std::map<std::string, std::string> link_ap; // link_id -> current ap

    std::set<std::string> serving() const {
        std::set<std::string> s;
        for (const auto& [l, a] : link_ap)
            s.insert(a);
        return s;
    }
};

} // namespace

void ScenarioSpec::validate() const {
    std::vector<std::string> v;
    auto bad = [&](const std::string& msg) { v.push_back(msg); };

    if (name.empty())
        bad("scenario name is empty");
    if (duration <= kTimeZero)
        bad("duration must be positive");
    if (wired_latency < kTimeZero)
        bad("wired_latency must be >= 0");
    if (mac_age <= kTimeZero)
        bad("mac_age must be positive");
    if (dedup_window < 1 || dedup_window > 64)
        bad("dedup_window must be in [1, 64]");
    if (dedup_stale <= kTimeZero)
        bad("dedup_stale must be positive");

    try {
        radio.check("radio");
    } catch (const ValidationError& e) {
        v.insert(v.end(), e.violations.begin(), e.violations.end());
    }
    if (wired_latency >= radio.attempt_airtime)
        bad("wired_latency must be smaller than attempt_airtime, otherwise a "
            "relayed copy can outrun its own transmission");

    std::set<std::string> ids;
    std::set<MacAddress> macs;
    auto claim_id = [&](const std::string& id, const std::string& what) {
        if (id.empty())
            bad(what + " with empty id");
        else if (!ids.insert(id).second)
            bad("duplicate node id: " + id);
    };
    auto claim_mac = [&](const MacAddress& m, const std::string& where) {
        if (!macs.insert(m).second)
            bad("duplicate MAC " + m.str() + " at " + where);
    };

    std::map<std::string, const ApSpec*> ap_by_id;
    for (const auto& ap : aps) {
        claim_id(ap.id, "AP");
        claim_mac(ap.wired_mac, "AP " + ap.id);
        ap_by_id[ap.id] = &ap;
        if (ap.links.empty())
            bad("AP " + ap.id + " has no radio links");
        std::set<std::string> lids;
        for (const auto& l : ap.links)
            if (!lids.insert(l.link_id).second)
                bad("AP " + ap.id + " has duplicate link id " + l.link_id);
    }

    auto ap_link = [&](const std::string& ap,
                       const std::string& link) -> const ApLinkSpec* {
        auto it = ap_by_id.find(ap);
        if (it == ap_by_id.end())
            return nullptr;
        for (const auto& l : it->second->links)
            if (l.link_id == link)
                return &l;
        return nullptr;
    };

    std::map<std::string, const StaSpec*> sta_by_id;
    for (const auto& sta : stas) {
        claim_id(sta.id, "STA");
        sta_by_id[sta.id] = &sta;
        if (sta.links.empty()) {
            bad("STA " + sta.id + " has no links");
            continue;
        }
        if (sta.primary >= sta.links.size())
            bad("STA " + sta.id + " primary index out of range");
        std::set<std::string> lids;
        for (const auto& l : sta.links) {
            claim_mac(l.mac, "STA " + sta.id + "/" + l.link_id);
            if (!lids.insert(l.link_id).second)
                bad("STA " + sta.id + " has duplicate link id " + l.link_id);
            if (!ap_by_id.count(l.ap)) {
                bad("STA " + sta.id + "/" + l.link_id +
                    " references unknown AP " + l.ap);
                continue;
            }
            const ApLinkSpec* al = ap_link(l.ap, l.ap_link);
            if (!al)
                bad("STA " + sta.id + "/" + l.link_id +
                    " references unknown radio link " + l.ap + "/" +
                    l.ap_link);
            else if (al->channel != l.channel)
                bad("STA " + sta.id + "/" + l.link_id + " (channel " +
                    std::to_string(l.channel) + ") and " + l.ap + "/" +
                    l.ap_link + " (channel " + std::to_string(al->channel) +
                    ") are on different channels");
            if (l.radio) {
                try {
                    l.radio->check("STA " + sta.id + "/" + l.link_id +
                                   " radio");
                } catch (const ValidationError& e) {
                    v.insert(v.end(), e.violations.begin(),
                             e.violations.end());
                }
                if (wired_latency >= l.radio->attempt_airtime)
                    bad("wired_latency must be smaller than attempt_airtime "
                        "of STA " +
                        sta.id + "/" + l.link_id);
            }
        }
    }

    std::map<std::string, const HostSpec*> host_by_id;
    for (const auto& h : hosts) {
        claim_id(h.id, "host");
        claim_mac(h.mac, "host " + h.id);
        host_by_id[h.id] = &h;
    }

    std::set<int> flow_ids;
    for (const auto& f : flows) {
        std::string tag = "flow " + std::to_string(f.id) + " (" + f.name + ")";
        if (!flow_ids.insert(f.id).second)
            bad("duplicate flow id " + std::to_string(f.id));
        bool src_sta = sta_by_id.count(f.src) > 0;
        bool src_host = host_by_id.count(f.src) > 0;
        bool dst_sta = sta_by_id.count(f.dst) > 0;
        bool dst_host = host_by_id.count(f.dst) > 0;
        if (!src_sta && !src_host)
            bad(tag + ": unknown source " + f.src);
        if (!dst_sta && !dst_host)
            bad(tag + ": unknown destination " + f.dst);
        if (f.src == f.dst)
            bad(tag + ": source equals destination");
        if (src_host && dst_host)
            bad(tag + ": at least one endpoint must be wireless");
        if (f.rc.is_reliable()) {
            for (const auto* s : {src_sta ? sta_by_id[f.src] : nullptr,
                                  dst_sta ? sta_by_id[f.dst] : nullptr})
                if (s && static_cast<std::size_t>(f.rc.redundancy) >
                             s->links.size())
                    bad(tag + ": redundancy " +
                        std::to_string(f.rc.redundancy) + " exceeds the " +
                        std::to_string(s->links.size()) + " links of STA " +
                        s->id);
        }
        if (f.count == 0)
            bad(tag + ": count must be >= 1");
        if (f.count > 1 && f.period <= kTimeZero)
            bad(tag + ": period must be positive");
        if (f.start < kTimeZero)
            bad(tag + ": start must be >= 0");
        if (f.payload_len > 1500)
            bad(tag + ": payload_len exceeds 1500");
    }

    // moves, replayed per STA in time order
    std::map<std::string, std::vector<const MoveSpec*>> per_sta;
    for (const auto& m : moves) {
        std::string tag = "move of " + m.sta + "/" + m.link_id + " at " +
                          m.at.str();
        if (!sta_by_id.count(m.sta)) {
            bad(tag + ": unknown STA");
            continue;
        }
        if (m.gap <= kTimeZero)
            bad(tag + ": gap must be positive");
        if (m.at < kTimeZero)
            bad(tag + ": time must be >= 0");
        const StaSpec* s = sta_by_id[m.sta];
        auto lit = std::find_if(s->links.begin(), s->links.end(),
                                [&](const StaLinkSpec& l) {
                                    return l.link_id == m.link_id;
                                });
        if (lit == s->links.end()) {
            bad(tag + ": unknown STA link");
            continue;
        }
        if (s->links.size() < 2)
            bad(tag + ": a STA needs a second link to keep service during "
                      "reassociation");
        const ApLinkSpec* al = ap_link(m.to_ap, m.to_ap_link);
        if (!ap_by_id.count(m.to_ap))
            bad(tag + ": unknown target AP " + m.to_ap);
        else if (!al)
            bad(tag + ": unknown target radio link " + m.to_ap + "/" +
                m.to_ap_link);
        else if (al->channel != lit->channel)
            bad(tag + ": target " + m.to_ap + "/" + m.to_ap_link +
                " is on channel " + std::to_string(al->channel) +
                ", the STA link uses " + std::to_string(lit->channel));
        per_sta[m.sta].push_back(&m);
    }
    for (auto& [sid, ms] : per_sta) {
        std::stable_sort(ms.begin(), ms.end(),
                         [](const MoveSpec* a, const MoveSpec* b) {
                             return a->at < b->at;
                         });
        const StaSpec* s = sta_by_id[sid];
        if (!s)
            continue;
        Timeline tl;
        for (const auto& l : s->links)
            tl.link_ap[l.link_id] = l.ap;
        SimTime busy_until{-1};
        for (const MoveSpec* m : ms) {
            std::string tag = "move of " + m->sta + "/" + m->link_id +
                              " at " + m->at.str();
            if (m->at <= busy_until)
                bad(tag + ": overlaps the previous reassociation of " + sid);
            busy_until = m->at + m->gap;
            auto cur = tl.link_ap.find(m->link_id);
            if (cur == tl.link_ap.end())
                continue;
            if (cur->second == m->to_ap)
                bad(tag + ": link is already at " + m->to_ap);
            if (!m->fail)
                cur->second = m->to_ap;
        }
    }

    if (!v.empty())
        throw ValidationError(v);
}

std::vector<int> ScenarioSpec::move_transition_types() const {
    std::map<std::string, Timeline> tls;
    for (const auto& s : stas) {
        Timeline tl;
        for (const auto& l : s.links)
            tl.link_ap[l.link_id] = l.ap;
        tls[s.id] = tl;
    }
    std::vector<const MoveSpec*> ordered;
    for (const auto& m : moves)
        ordered.push_back(&m);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const MoveSpec* a, const MoveSpec* b) {
                         return a->at < b->at;
                     });
    std::map<const MoveSpec*, int> type_of;
    for (const MoveSpec* m : ordered) {
        Timeline& tl = tls[m->sta];
        if (m->fail) {
            type_of[m] = 0;
            continue;
        }
        auto before = tl.serving();
        tl.link_ap[m->link_id] = m->to_ap;
        auto after = tl.serving();
        int t = 3;
        if (before.size() == 1 && after.size() > 1)
            t = 1;
        else if (before.size() > 1 && after.size() == 1)
            t = 2;
        type_of[m] = t;
    }
    std::vector<int> out;
    for (const auto& m : moves)
        out.push_back(type_of[&m]);
    return out;
}

// ---- JSON ----------------------------------------------------------------

namespace {

ojson params_to_json(const WirelessParams& p) {
    return ojson{{"loss_prob", p.loss_prob},
                 {"retry_limit", p.retry_limit},
                 {"attempt_airtime_ns", p.attempt_airtime.ns},
                 {"ack_timeout_ns", p.ack_timeout.ns}};
}

WirelessParams params_from_json(const ojson& j) {
    WirelessParams p;
    p.loss_prob = j.at("loss_prob").get<double>();
    p.retry_limit = j.at("retry_limit").get<int>();
    p.attempt_airtime = SimTime{j.at("attempt_airtime_ns").get<std::int64_t>()};
    p.ack_timeout = SimTime{j.at("ack_timeout_ns").get<std::int64_t>()};
    return p;
}

} // namespace

ojson ScenarioSpec::to_json() const {
    ojson j;
    j["name"] = name;
    j["seed"] = seed;
    j["duration_ns"] = duration.ns;
    j["radio"] = params_to_json(radio);
    j["cross_link_abort"] = cross_link_abort;
    j["wired_latency_ns"] = wired_latency.ns;
    j["mac_age_ns"] = mac_age.ns;
    j["dedup_window"] = dedup_window;
    j["dedup_stale_ns"] = dedup_stale.ns;

    j["aps"] = ojson::array();
    for (const auto& ap : aps) {
        ojson links = ojson::array();
        for (const auto& l : ap.links)
            links.push_back(
                ojson{{"link_id", l.link_id}, {"channel", l.channel}});
        j["aps"].push_back(ojson{{"id", ap.id},
                                 {"wired_mac", ap.wired_mac.str()},
                                 {"links", links}});
    }
    j["stas"] = ojson::array();
    for (const auto& s : stas) {
        ojson links = ojson::array();
        for (const auto& l : s.links) {
            ojson lj{{"link_id", l.link_id},
                     {"channel", l.channel},
                     {"mac", l.mac.str()},
                     {"ap", l.ap},
                     {"ap_link", l.ap_link}};
            if (l.radio)
                lj["radio"] = params_to_json(*l.radio);
            links.push_back(lj);
        }
        j["stas"].push_back(
            ojson{{"id", s.id}, {"primary", s.primary}, {"links", links}});
    }
    j["hosts"] = ojson::array();
    for (const auto& h : hosts)
        j["hosts"].push_back(ojson{{"id", h.id}, {"mac", h.mac.str()}});

    j["flows"] = ojson::array();
    for (const auto& f : flows) {
        ojson fj{{"id", f.id},           {"name", f.name},
                 {"src", f.src},         {"dst", f.dst},
                 {"rc", f.rc.str()},     {"ac", to_string(f.ac)},
                 {"start_ns", f.start.ns}, {"period_ns", f.period.ns},
                 {"count", f.count},     {"payload_len", f.payload_len}};
        if (f.deadline)
            fj["deadline_ns"] = f.deadline->ns;
        j["flows"].push_back(fj);
    }
    j["moves"] = ojson::array();
    for (const auto& m : moves)
        j["moves"].push_back(ojson{{"at_ns", m.at.ns},
                                   {"sta", m.sta},
                                   {"link_id", m.link_id},
                                   {"to_ap", m.to_ap},
                                   {"to_ap_link", m.to_ap_link},
                                   {"gap_ns", m.gap.ns},
                                   {"fail", m.fail}});
    return j;
}

ScenarioSpec ScenarioSpec::from_json(const ojson& j) {
    try {
        ScenarioSpec s;
        s.name = j.at("name").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.duration = SimTime{j.at("duration_ns").get<std::int64_t>()};
        s.radio = params_from_json(j.at("radio"));
        s.cross_link_abort = j.at("cross_link_abort").get<bool>();
        s.wired_latency = SimTime{j.at("wired_latency_ns").get<std::int64_t>()};
        s.mac_age = SimTime{j.at("mac_age_ns").get<std::int64_t>()};
        s.dedup_window = j.at("dedup_window").get<int>();
        s.dedup_stale = SimTime{j.at("dedup_stale_ns").get<std::int64_t>()};

        for (const auto& aj : j.at("aps")) {
            ApSpec ap;
            ap.id = aj.at("id").get<std::string>();
            ap.wired_mac = MacAddress::parse(aj.at("wired_mac"));
            for (const auto& lj : aj.at("links"))
                ap.links.push_back({lj.at("link_id").get<std::string>(),
                                    lj.at("channel").get<int>()});
            s.aps.push_back(std::move(ap));
        }
        for (const auto& sj : j.at("stas")) {
            StaSpec st;
            st.id = sj.at("id").get<std::string>();
            st.primary = sj.at("primary").get<std::size_t>();
            for (const auto& lj : sj.at("links")) {
                StaLinkSpec l;
                l.link_id = lj.at("link_id").get<std::string>();
                l.channel = lj.at("channel").get<int>();
                l.mac = MacAddress::parse(lj.at("mac"));
                l.ap = lj.at("ap").get<std::string>();
                l.ap_link = lj.at("ap_link").get<std::string>();
                if (lj.contains("radio"))
                    l.radio = params_from_json(lj.at("radio"));
                st.links.push_back(std::move(l));
            }
            s.stas.push_back(std::move(st));
        }
        for (const auto& hj : j.at("hosts"))
            s.hosts.push_back(
                {hj.at("id").get<std::string>(), MacAddress::parse(hj.at("mac"))});
        for (const auto& fj : j.at("flows")) {
            FlowSpec f;
            f.id = fj.at("id").get<int>();
            f.name = fj.at("name").get<std::string>();
            f.src = fj.at("src").get<std::string>();
            f.dst = fj.at("dst").get<std::string>();
            f.rc = ReliabilityCategory::parse(fj.at("rc"));
            std::string ac = fj.at("ac").get<std::string>();
            if (ac == "background")
                f.ac = AccessCategory::Background;
            else if (ac == "best_effort")
                f.ac = AccessCategory::BestEffort;
            else if (ac == "video")
                f.ac = AccessCategory::Video;
            else if (ac == "voice")
                f.ac = AccessCategory::Voice;
            else
                throw ConfigError("bad access category: " + ac);
            f.start = SimTime{fj.at("start_ns").get<std::int64_t>()};
            f.period = SimTime{fj.at("period_ns").get<std::int64_t>()};
            f.count = fj.at("count").get<std::uint64_t>();
            f.payload_len = fj.at("payload_len").get<std::size_t>();
            if (fj.contains("deadline_ns"))
                f.deadline = SimTime{fj.at("deadline_ns").get<std::int64_t>()};
            s.flows.push_back(std::move(f));
        }
        for (const auto& mj : j.at("moves")) {
            MoveSpec m;
            m.at = SimTime{mj.at("at_ns").get<std::int64_t>()};
            m.sta = mj.at("sta").get<std::string>();
            m.link_id = mj.at("link_id").get<std::string>();
            m.to_ap = mj.at("to_ap").get<std::string>();
            m.to_ap_link = mj.at("to_ap_link").get<std::string>();
            m.gap = SimTime{mj.at("gap_ns").get<std::int64_t>()};
            m.fail = mj.at("fail").get<bool>();
            s.moves.push_back(std::move(m));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad scenario JSON: ") + e.what());
    }
}

ScenarioSpec ScenarioSpec::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open scenario file: " + path);
    ojson j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return from_json(j);
}

void ScenarioSpec::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot write scenario file: " + path);
    f << to_json().dump(2) << "\n";
}

// ---- presets -------------------------------------------------------------

namespace {

ScenarioSpec preset_scenario1() {
    ScenarioSpec s;
    s.name = "scenario1";
    s.seed = 1;
    s.duration = millis(1100);
    s.aps.push_back(
        {"ap1", MacAddress::parse("02:a0:00:00:00:01"), {{"A", 36}, {"B", 149}}});
    StaSpec sta;
    sta.id = "sta1";
    sta.primary = 0;
    sta.links.push_back(
        {"1A", 36, MacAddress::parse("02:50:00:01:0a:01"), "ap1", "A", {}});
    sta.links.push_back(
        {"1B", 149, MacAddress::parse("02:50:00:01:0b:01"), "ap1", "B", {}});
    s.stas.push_back(sta);
    s.hosts.push_back({"h1", MacAddress::parse("02:e0:00:00:00:01")});
    s.flows.push_back({0, "up_rel", "sta1", "h1",
                       ReliabilityCategory::reliable(2), AccessCategory::Voice,
                       millis(1), millis(1), 1000, 100, millis(2)});
    s.flows.push_back({1, "down_rel", "h1", "sta1",
                       ReliabilityCategory::reliable(2), AccessCategory::Voice,
                       micros(1500), millis(1), 1000, 100, millis(2)});
    s.flows.push_back({2, "up_be", "sta1", "h1",
                       ReliabilityCategory::best_effort(),
                       AccessCategory::BestEffort, micros(1250), millis(1),
                       1000, 100, std::nullopt});
    return s;
}

ScenarioSpec preset_scenario2() {
    ScenarioSpec s = preset_scenario1();
    s.name = "scenario2";
    s.seed = 2;
    s.aps.clear();
    s.aps.push_back(
        {"ap1", MacAddress::parse("02:a0:00:00:00:01"), {{"A", 36}}});
    s.aps.push_back(
        {"ap2", MacAddress::parse("02:a0:00:00:00:02"), {{"A", 149}}});
    s.stas[0].links[0].ap = "ap1";
    s.stas[0].links[0].ap_link = "A";
    s.stas[0].links[1].ap = "ap2";
    s.stas[0].links[1].ap_link = "A";
    return s;
}

ScenarioSpec preset_scenario3() {
    ScenarioSpec s;
    s.name = "scenario3";
    s.seed = 3;
    s.duration = millis(320);
    s.aps.push_back(
        {"ap1", MacAddress::parse("02:a0:00:00:00:01"), {{"A", 36}, {"B", 40}}});
    s.aps.push_back(
        {"ap2", MacAddress::parse("02:a0:00:00:00:02"), {{"A", 36}}});
    s.aps.push_back(
        {"ap3", MacAddress::parse("02:a0:00:00:00:03"), {{"A", 36}}});
    StaSpec sta;
    sta.id = "sta1";
    sta.primary = 1;
    sta.links.push_back(
        {"1A", 36, MacAddress::parse("02:50:00:01:0a:01"), "ap1", "A", {}});
    sta.links.push_back(
        {"1B", 40, MacAddress::parse("02:50:00:01:0b:01"), "ap1", "B", {}});
    s.stas.push_back(sta);
    s.hosts.push_back({"h1", MacAddress::parse("02:e0:00:00:00:01")});
    s.flows.push_back({0, "up_rel", "sta1", "h1",
                       ReliabilityCategory::reliable(2), AccessCategory::Voice,
                       millis(1), micros(500), 600, 100, millis(2)});
    s.flows.push_back({1, "down_rel", "h1", "sta1",
                       ReliabilityCategory::reliable(2), AccessCategory::Voice,
                       micros(1250), micros(500), 600, 100, millis(2)});
    s.moves.push_back({millis(50), "sta1", "1A", "ap2", "A", millis(2), false});
    s.moves.push_back({millis(150), "sta1", "1A", "ap3", "A", millis(2), false});
    s.moves.push_back({millis(250), "sta1", "1A", "ap1", "A", millis(2), false});
    return s;
}

ScenarioSpec preset_fig2() {
    ScenarioSpec s;
    s.name = "fig2";
    s.seed = 42;
    s.duration = millis(1);
    s.radio.loss_prob = 0.0;
    s.aps.push_back({"ap1", MacAddress::parse("02:a0:00:00:00:01"),
                     {{"1A", 36}, {"1B", 149}}});
    s.aps.push_back({"ap2", MacAddress::parse("02:a0:00:00:00:02"),
                     {{"2A", 44}, {"2B", 157}}});
    StaSpec sta;
    sta.id = "sta3";
    sta.primary = 1;
    WirelessParams slow;
    slow.loss_prob = 0.0;
    slow.attempt_airtime = micros(400);
    sta.links.push_back(
        {"3A", 44, MacAddress::parse("02:50:00:03:0a:01"), "ap2", "2A", {}});
    sta.links.push_back({"3B", 149, MacAddress::parse("02:50:00:03:0b:01"),
                         "ap1", "1B", slow});
    s.stas.push_back(sta);
    s.hosts.push_back({"node4", MacAddress::parse("02:e0:00:00:00:04")});
    s.flows.push_back({0, "walkthrough", "sta3", "node4",
                       ReliabilityCategory::reliable(2), AccessCategory::Voice,
                       SimTime{0}, millis(1), 1, 64, std::nullopt});
    return s;
}

} // namespace

const std::vector<std::string>& ScenarioSpec::preset_names() {
    static const std::vector<std::string> names = {"scenario1", "scenario2",
                                                   "scenario3", "fig2"};
    return names;
}

ScenarioSpec ScenarioSpec::preset(const std::string& name) {
    if (name == "scenario1")
        return preset_scenario1();
    if (name == "scenario2")
        return preset_scenario2();
    if (name == "scenario3")
        return preset_scenario3();
    if (name == "fig2")
        return preset_fig2();
    throw ConfigError("unknown preset: " + name);
}

} // namespace hrsim
