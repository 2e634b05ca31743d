#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hrsim/dedup.hpp"
#include "hrsim/time.hpp"

namespace hrsim {

struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    constexpr auto operator<=>(const MacAddress&) const = default;

    static MacAddress parse(const std::string& text); // "aa:bb:cc:dd:ee:ff"
    static MacAddress broadcast();
    std::string str() const;
    bool is_broadcast() const;
};

// Reserved relay-tag EtherType: IEEE 802 local experimental 1.
inline constexpr std::uint16_t kYTagEtherType = 0x88B5;
// Simulator control plane (association notices, relay-duty handoff):
// IEEE 802 local experimental 2.
inline constexpr std::uint16_t kControlEtherType = 0x88B6;
inline constexpr std::uint16_t kDefaultEtherType = 0x0800;

enum class AccessCategory : std::uint8_t { Background, BestEffort, Video, Voice };

std::string to_string(AccessCategory ac);

/// Per-frame reliability marking. redundancy == 1 means best effort (never
/// duplicated); redundancy >= 2 requests k-way replication across affiliated
/// links.
struct ReliabilityCategory {
    int redundancy{1};

    static ReliabilityCategory best_effort() { return {1}; }
    static ReliabilityCategory reliable(int k);
    static ReliabilityCategory parse(const std::string& text); // "best_effort" | "reliable:2"

    bool is_reliable() const { return redundancy >= 2; }
    std::string str() const;
    constexpr auto operator<=>(const ReliabilityCategory&) const = default;
};

/// The relay tag carried across Ethernet between HR APs. On the wire it is
/// exactly 12 bytes: reserved EtherType (2) + NA (6) + seq (2) + ancillary (2).
struct YTag {
    MacAddress na;          // next/final destination the frame must reach
    std::uint16_t seq{0};   // elimination sequence number (the sender MLD seq)
    std::uint8_t version{1};
    std::uint8_t flags{0};

    constexpr auto operator<=>(const YTag&) const = default;
};

inline constexpr std::size_t kYTagWireSize = 12;

// Tag flag layout. Bit 0 set means elimination is still pending and the
// receiving AP must run it before forwarding; clear means the copy was
// already sequenced by the duplicator and the receiver only transmits it.
// Bits 1..7 address the destination STA links a downlink relay targets:
// bit (1 + i) selects affiliated link index i.
inline constexpr std::uint8_t kYFlagElimPending = 0x01;

constexpr std::uint8_t ytag_link_bit(std::size_t link_index) {
    return static_cast<std::uint8_t>(1u << (1 + link_index));
}

// Control-plane bodies. These ride in Frame metadata, not serialized bytes;
// management encoding is out of scope.
struct AssocNotice {
    std::string sta_mld;
    std::string link_id;
    std::string ap_id;
    std::string ap_link_id;
    bool associated{true};
};
struct PapCede {
    std::string sta_mld;
    // elimination history travels with the duty so the successor never
    // re-delivers a frame the predecessor already forwarded
    bool has_state{false};
    DedupSnapshot up_state;
};
using ControlBody = std::variant<AssocNotice, PapCede>;

/// Everything that travels on simulated Ethernet or air. da/sa/ether_type/
/// y_tag/payload are the wire image; the rest is simulation metadata (the
/// paper leaves on-air RC encoding open, so RC and friends are not wire bits).
struct Frame {
    MacAddress da;
    MacAddress sa;
    std::uint16_t ether_type{kDefaultEtherType};
    std::optional<YTag> y_tag;
    std::vector<std::uint8_t> payload;

    ReliabilityCategory rc{ReliabilityCategory::best_effort()};
    AccessCategory ac{AccessCategory::BestEffort};
    std::uint16_t mld_seq{0};
    std::string origin;       // MLD that assigned mld_seq; empty for legacy nodes
    bool replicated{false};   // true iff copies of this frame exist and the
                              // receiver-side MLD must run elimination
    MacAddress origin_sa;     // stable source address the final receiver
                              // must see after all rewrites
    std::uint8_t relay_hops{0};
    SimTime created_at{0};
    std::uint64_t frame_id{0};
    std::int32_t flow{-1};

    std::shared_ptr<const ControlBody> control;
};

/// Static multi-link advertisement for one MLD: affiliated links and the
/// designated primary STA whose MAC represents the device on the wire.
struct MultiLinkElement {
    struct Affiliated {
        std::string link_id;
        int channel{0};
        MacAddress mac;
    };

    std::string mld_id;
    std::vector<Affiliated> affiliated;
    std::size_t primary{0};

    /// Throws ConfigError on duplicate MACs or a bad primary index.
    void check() const;
    const MacAddress& primary_mac() const { return affiliated.at(primary).mac; }
};

// ---- wire codec ----------------------------------------------------------

/// Serializes DA | SA | [tag] | EtherType | payload. With a tag present the
/// outer EtherType is the reserved value and the original EtherType follows
/// the tag, VLAN style.
std::vector<std::uint8_t> serialize_frame(const Frame& f);

/// Inserts a relay tag after SA and returns the tagged wire image.
/// Throws NestedTagError if the frame already carries a tag.
std::vector<std::uint8_t> encode_ytag(const Frame& f, const MacAddress& na,
                                      std::uint16_t seq);

/// Parses a tagged wire image and reconstructs the inner frame with DA := NA.
/// Throws NotAYTagError on a wrong EtherType, MalformedFrameError when the
/// bytes are too short to hold the tag.
std::pair<Frame, YTag> decode_ytag(const std::vector<std::uint8_t>& bytes);

// ---- structural tag helpers used on the simulated wire -------------------

/// Tagged relay copy: DA := relay target, SA := relaying AP, tag {na, seq,
/// flags}. Metadata is preserved. Throws NestedTagError if already tagged.
Frame add_ytag(Frame f, const MacAddress& na, std::uint16_t seq,
               std::uint8_t flags, const MacAddress& outer_da,
               const MacAddress& outer_sa);

/// Removes the tag and rewrites DA := NA, the receive-side inverse of
/// add_ytag. Throws NotAYTagError if the frame carries no tag.
Frame strip_ytag(Frame f);

// ---- egress rewriting ----------------------------------------------------

/// Wired egress: frames leaving the AP carry the origin's primary STA MAC as
/// SA. Throws NoAssociationError when SA is not one of the MLE's affiliated
/// MACs.
Frame rewrite_egress_to_wired(Frame f, const MultiLinkElement& mle);

/// Air egress: DA becomes the affiliated STA MAC of the specific link.
/// Throws NoAssociationError when DA does not address this MLD.
Frame rewrite_egress_to_air(Frame f, const MultiLinkElement& mle,
                            std::size_t link_index);

} // namespace hrsim
