#include <doctest.h>

#include <cstdio>
#include <string>

#include "hrsim/errors.hpp"
#include "hrsim/frames.hpp"
#include "hrsim/simulation.hpp"

using namespace hrsim;

namespace {

ScenarioSpec relay_spec() {
    ScenarioSpec s = ScenarioSpec::preset("scenario2");
    s.radio.loss_prob = 0.0;
    s.duration = millis(30);
    s.flows.clear();
    return s;
}

FlowSpec flow(int id, const char* name, const char* src, const char* dst,
              ReliabilityCategory rc, std::uint64_t count) {
    FlowSpec f;
    f.id = id;
    f.name = name;
    f.src = src;
    f.dst = dst;
    f.rc = rc;
    f.ac = AccessCategory::Voice;
    f.start = millis(1);
    f.period = millis(1);
    f.count = count;
    return f;
}

Frame app_frame(const MacAddress& da, const MacAddress& sa,
                std::uint64_t frame_id) {
    Frame f;
    f.da = da;
    f.sa = sa;
    f.origin_sa = sa;
    f.ether_type = kDefaultEtherType;
    f.payload.assign(10, 0);
    f.frame_id = frame_id;
    return f;
}

} // namespace

TEST_SUITE("ap") {

TEST_CASE("uplink copies at a non-elected AP are relayed to the primary AP") {
    ScenarioSpec spec = relay_spec();
    spec.flows.push_back(
        flow(0, "up", "sta1", "h1", ReliabilityCategory::reliable(2), 10));
    Simulation sim(spec, RunOptions{false, false});

    HrAp& ap1 = sim.ap("ap1");
    HrAp& ap2 = sim.ap("ap2");
    REQUIRE(ap1.election("sta1").has_value());
    CHECK(*ap1.election("sta1") == HrAp::Election{"ap1", false});
    CHECK(*ap2.election("sta1") == HrAp::Election{"ap1", false});
    CHECK(ap1.has_duty("sta1"));
    CHECK_FALSE(ap2.has_duty("sta1"));

    auto res = sim.run();
    CHECK(ap2.counters().relayed_up == 10);
    CHECK(ap2.counters().relay_suppressed == 0);
    CHECK(ap2.counters().forwarded_wired == 0);
    CHECK(ap1.counters().forwarded_wired == 10);
    REQUIRE(ap1.uplink_dedup().count("sta1") == 1);
    CHECK(ap1.uplink_dedup().at("sta1").counters().passed == 10);
    CHECK(ap1.uplink_dedup().at("sta1").counters().discarded == 10);
    CHECK(sim.host("h1").counters().delivered == 10);
    CHECK(res.metrics.total.delivered == 10);
    CHECK(res.metrics.double_deliveries == 0);
}

TEST_CASE("downlink duplication happens at the duty holder, partly by relay") {
    ScenarioSpec spec = relay_spec();
    spec.flows.push_back(
        flow(0, "down", "h1", "sta1", ReliabilityCategory::reliable(2), 10));
    Simulation sim(spec, RunOptions{false, false});
    auto res = sim.run();

    HrAp& ap1 = sim.ap("ap1");
    HrAp& ap2 = sim.ap("ap2");
    CHECK(ap1.counters().distributed == 10);
    CHECK(ap1.counters().relayed_down == 10); // one tagged copy to ap2 each
    CHECK(ap2.counters().distributed == 0);

    HrSta& sta = sim.sta("sta1");
    CHECK(sta.counters().delivered == 10);
    REQUIRE(sta.downlink_dedup().count("ap1") == 1);
    CHECK(sta.downlink_dedup().at("ap1").counters().passed == 10);
    CHECK(sta.downlink_dedup().at("ap1").counters().discarded == 10);
    CHECK(res.metrics.total.delivered == 10);
}

TEST_CASE("malformed or stale relay frames are dropped, not forwarded") {
    Simulation sim(relay_spec(), RunOptions{false, false});
    HrAp& ap1 = sim.ap("ap1");
    HrAp& ap2 = sim.ap("ap2");
    HrSta& sta = sim.sta("sta1");
    const MacAddress h1 = sim.host("h1").mac();
    const MacAddress sta_mac = sta.mle().primary_mac();
    const MacAddress link1_mac = sta.mle().affiliated[1].mac;

    SUBCASE("unknown origin is misdirected") {
        Frame inner = app_frame(h1, link1_mac, 9001);
        inner.origin = "ghost";
        inner.replicated = true;
        inner.mld_seq = 50;
        Frame tagged = add_ytag(inner, inner.da, inner.mld_seq,
                                kYFlagElimPending, ap2.wired_mac(),
                                ap1.wired_mac());
        ap2.on_wired_receive(tagged, 0);
        CHECK(ap2.counters().misdirected_drops == 1);
        CHECK(ap2.counters().relay_forwarded == 0);
    }
    SUBCASE("the relay hop budget caps forwarding loops") {
        Frame inner = app_frame(h1, link1_mac, 9002);
        inner.origin = "sta1";
        inner.replicated = true;
        inner.mld_seq = 51;
        inner.relay_hops = kMaxRelayHops;
        Frame tagged = add_ytag(inner, inner.da, inner.mld_seq,
                                kYFlagElimPending, ap2.wired_mac(),
                                ap1.wired_mac());
        ap2.on_wired_receive(tagged, 0);
        CHECK(ap2.counters().no_duty_drops == 1);
        CHECK(ap2.counters().relay_forwarded == 0);
    }
    SUBCASE("a fresh elimination-pending frame is forwarded to the elected AP") {
        Frame inner = app_frame(h1, link1_mac, 9003);
        inner.origin = "sta1";
        inner.replicated = true;
        inner.mld_seq = 52;
        Frame tagged = add_ytag(inner, inner.da, inner.mld_seq,
                                kYFlagElimPending, ap2.wired_mac(),
                                ap1.wired_mac());
        ap2.on_wired_receive(tagged, 0);
        CHECK(ap2.counters().relay_forwarded == 1);
        sim.core().engine().run_until_idle(seconds(1));
        CHECK(ap1.counters().forwarded_wired == 1);
        CHECK(sim.host("h1").counters().delivered == 1);
    }
    SUBCASE("a distribution order naming links this AP no longer serves") {
        Frame inner = app_frame(sta_mac, h1, 9004);
        inner.origin = "ap1";
        inner.origin_sa = h1;
        inner.replicated = true;
        inner.mld_seq = 7;
        Frame tagged = add_ytag(inner, inner.da, inner.mld_seq,
                                ytag_link_bit(0), ap2.wired_mac(),
                                ap1.wired_mac());
        ap2.on_wired_receive(tagged, 0);
        CHECK(ap2.counters().misdirected_drops == 1);
    }
    SUBCASE("a distribution order for a served link reaches the STA") {
        Frame inner = app_frame(sta_mac, h1, 9005);
        inner.origin = "ap1";
        inner.origin_sa = h1;
        inner.replicated = true;
        inner.mld_seq = 8;
        Frame tagged = add_ytag(inner, inner.da, inner.mld_seq,
                                ytag_link_bit(1), ap2.wired_mac(),
                                ap1.wired_mac());
        ap2.on_wired_receive(tagged, 0);
        sim.core().engine().run_until_idle(seconds(1));
        CHECK(sta.counters().delivered == 1);
        CHECK(sta.counters().transparency_violations == 0);
    }
    SUBCASE("relay copies addressed to another AP are ignored") {
        Frame inner = app_frame(h1, link1_mac, 9006);
        inner.origin = "sta1";
        inner.replicated = true;
        inner.mld_seq = 53;
        Frame tagged = add_ytag(inner, inner.da, inner.mld_seq,
                                kYFlagElimPending, ap1.wired_mac(),
                                ap2.wired_mac());
        ap2.on_wired_receive(tagged, 0); // flooded copy, not ours
        CHECK(ap2.counters().ignored == 1);
        CHECK(ap2.counters().relay_forwarded == 0);
    }
}

TEST_CASE("replication duty follows the primary link across a roam") {
    ScenarioSpec s;
    s.name = "roam";
    s.seed = 7;
    s.duration = millis(60);
    s.radio.loss_prob = 0.0;
    s.aps.push_back({"ap1", MacAddress::parse("02:a0:00:00:00:01"),
                     {{"A", 36}, {"B", 149}}});
    s.aps.push_back({"ap2", MacAddress::parse("02:a0:00:00:00:02"), {{"A", 36}}});
    StaSpec sta;
    sta.id = "sta1";
    sta.primary = 0;
    sta.links.push_back(
        {"1A", 36, MacAddress::parse("02:50:00:01:0a:01"), "ap1", "A", {}});
    sta.links.push_back(
        {"1B", 149, MacAddress::parse("02:50:00:01:0b:01"), "ap1", "B", {}});
    s.stas.push_back(sta);
    s.hosts.push_back({"h1", MacAddress::parse("02:e0:00:00:00:01")});
    s.flows.push_back(
        flow(0, "up", "sta1", "h1", ReliabilityCategory::reliable(2), 30));
    s.flows.push_back(
        flow(1, "down", "h1", "sta1", ReliabilityCategory::reliable(2), 30));
    s.flows[1].start = millis(1) + micros(500);
    s.moves.push_back({millis(20), "sta1", "1A", "ap2", "A", millis(2), false});

    Simulation sim(s, RunOptions{false, false});
    CHECK(sim.ap("ap1").has_duty("sta1"));
    auto res = sim.run();

    CHECK(sim.moves_done() == 1);
    CHECK_FALSE(sim.ap("ap1").has_duty("sta1"));
    CHECK(sim.ap("ap2").has_duty("sta1"));
    CHECK(sim.sta("sta1").serving_ap(0) == &sim.ap("ap2"));
    CHECK(sim.ap("ap1").counters().cedes_tx == 1);
    CHECK(sim.ap("ap2").counters().cedes_rx == 1);
    CHECK(sim.ap("ap1").counters().pap_fallback_elections >= 1);
    CHECK(res.metrics.double_deliveries == 0);
    CHECK(res.metrics.total.offered == 60);
    CHECK(res.metrics.total.delivered + res.metrics.total.lost == 60);
    CHECK(res.metrics.total.in_flight == 0);
    CHECK(res.metrics.total.delivered == 60);
}

TEST_CASE("wireless-to-wireless through one AP stays off the wire") {
    ScenarioSpec s;
    s.name = "hairpin";
    s.seed = 5;
    s.duration = millis(30);
    s.radio.loss_prob = 0.0;
    s.aps.push_back({"ap1", MacAddress::parse("02:a0:00:00:00:01"),
                     {{"A", 36}, {"B", 149}}});
    for (int i = 1; i <= 2; ++i) {
        StaSpec sta;
        sta.id = "sta" + std::to_string(i);
        sta.primary = 0;
        char mac_a[18], mac_b[18];
        std::snprintf(mac_a, sizeof mac_a, "02:50:00:0%d:0a:01", i);
        std::snprintf(mac_b, sizeof mac_b, "02:50:00:0%d:0b:01", i);
        sta.links.push_back({std::to_string(i) + "A", 36,
                             MacAddress::parse(mac_a), "ap1", "A", {}});
        sta.links.push_back({std::to_string(i) + "B", 149,
                             MacAddress::parse(mac_b), "ap1", "B", {}});
        s.stas.push_back(sta);
    }
    s.flows.push_back(
        flow(0, "peer", "sta1", "sta2", ReliabilityCategory::reliable(2), 10));

    Simulation sim(s, RunOptions{true, false});
    auto res = sim.run();

    CHECK(sim.fabric().counters().forwarded == 0);
    CHECK(sim.fabric().counters().flooded == 0);
    CHECK(sim.ap("ap1").counters().forwarded_wired == 0);
    CHECK(sim.ap("ap1").counters().distributed == 10);
    CHECK(sim.sta("sta2").counters().delivered == 10);
    CHECK(res.metrics.total.delivered == 10);
    CHECK(res.trace_tsv.find("fwd_local") != std::string::npos);
}

} // TEST_SUITE
