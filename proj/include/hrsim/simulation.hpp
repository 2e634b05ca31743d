#pragma once

#include <map>
#include <memory>
#include <string>

#include "hrsim/core.hpp"
#include "hrsim/hr_ap.hpp"
#include "hrsim/hr_sta.hpp"
#include "hrsim/topology.hpp"
#include "hrsim/wired.hpp"

namespace hrsim {

struct RunOptions {
    bool trace{true};
    bool keep_frames{true};
};

struct RunResult {
    MetricsSummary metrics;
    std::uint64_t events{0};
    SimTime end_time{0};
    ojson report;
    std::string trace_tsv;
};

/// Builds the node graph for a validated scenario, drives flows and
/// reassociations, runs to the horizon, then drains every in-flight event so
/// each offered frame ends delivered or lost.
class Simulation {
  public:
    explicit Simulation(ScenarioSpec spec, RunOptions opts = {});

    RunResult run();

    SimCore& core() { return *core_; }
    const ScenarioSpec& spec() const { return spec_; }
    HrSta& sta(const std::string& id);
    HrAp& ap(const std::string& id);
    EthernetHost& host(const std::string& id);
    LearningSwitch& fabric() { return *switch_; }
    std::uint64_t moves_done() const { return moves_done_; }
    std::uint64_t moves_reverted() const { return moves_reverted_; }

    /// Radio parameters a given STA link uses (override or scenario default).
    WirelessParams link_params(const StaSpec& sta, std::size_t link) const;

  private:
    void build();
    void schedule_flow(const FlowSpec& f);
    void schedule_moves();
    ojson make_report(const MetricsSummary& m, std::uint64_t events,
                      SimTime end_time) const;
    MacAddress app_mac(const std::string& node_id) const;

    ScenarioSpec spec_;
    RunOptions opts_;
    std::unique_ptr<SimCore> core_;
    std::unique_ptr<LearningSwitch> switch_;
    std::map<std::string, std::unique_ptr<HrAp>> aps_;
    std::map<std::string, std::unique_ptr<HrSta>> stas_;
    std::map<std::string, std::unique_ptr<EthernetHost>> hosts_;
    std::map<std::string, std::vector<std::shared_ptr<WirelessLink>>>
        links_ever_; // per sta: every radio link created, for reporting
    std::uint64_t moves_done_{0};
    std::uint64_t moves_reverted_{0};
    bool ran_{false};
};

} // namespace hrsim
