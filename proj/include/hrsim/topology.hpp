#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hrsim/channel.hpp"
#include "hrsim/frames.hpp"
#include "hrsim/time.hpp"

namespace hrsim {

using ojson = nlohmann::ordered_json;

struct ApLinkSpec {
    std::string link_id;
    int channel{0};
};

struct ApSpec {
    std::string id;
    MacAddress wired_mac;
    std::vector<ApLinkSpec> links;
};

struct StaLinkSpec {
    std::string link_id;
    int channel{0};
    MacAddress mac;
    std::string ap;      // initially associated AP
    std::string ap_link; // and its radio link
    std::optional<WirelessParams> radio; // per-link override
};

struct StaSpec {
    std::string id;
    std::size_t primary{0};
    std::vector<StaLinkSpec> links;

    MultiLinkElement mle() const;
};

struct HostSpec {
    std::string id;
    MacAddress mac;
};

struct FlowSpec {
    int id{0};
    std::string name;
    std::string src;
    std::string dst;
    ReliabilityCategory rc{ReliabilityCategory::best_effort()};
    AccessCategory ac{AccessCategory::BestEffort};
    SimTime start{0};
    SimTime period{millis(1)};
    std::uint64_t count{1};
    std::size_t payload_len{100};
    std::optional<SimTime> deadline;
};

/// One reassociation: the STA link leaves its current AP at `at` and joins
/// to_ap at `at + gap`. With fail=true the join is refused and the link
/// returns to the AP it left.
struct MoveSpec {
    SimTime at{0};
    std::string sta;
    std::string link_id;
    std::string to_ap;
    std::string to_ap_link;
    SimTime gap{millis(2)};
    bool fail{false};
};

struct ScenarioSpec {
    std::string name{"unnamed"};
    std::uint64_t seed{1};
    SimTime duration{seconds(1)};
    WirelessParams radio;
    bool cross_link_abort{false};
    SimTime wired_latency{micros(5)};
    SimTime mac_age{seconds(300)};
    int dedup_window{64};
    SimTime dedup_stale{seconds(2)};

    std::vector<ApSpec> aps;
    std::vector<StaSpec> stas;
    std::vector<HostSpec> hosts;
    std::vector<FlowSpec> flows;
    std::vector<MoveSpec> moves;

    /// Checks every structural constraint and throws ValidationError
    /// listing all violations at once.
    void validate() const;

    /// Per successful move: 1 = one AP to several, 2 = several to one,
    /// 3 = several to several. Failed moves yield 0. Requires a spec that
    /// passed validate().
    std::vector<int> move_transition_types() const;

    ojson to_json() const;
    static ScenarioSpec from_json(const ojson& j);
    static ScenarioSpec from_file(const std::string& path);
    void write_file(const std::string& path) const;

    static const std::vector<std::string>& preset_names();
    static ScenarioSpec preset(const std::string& name);
};

} // namespace hrsim
