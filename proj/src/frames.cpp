#include "hrsim/frames.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "hrsim/errors.hpp"

namespace hrsim {

MacAddress MacAddress::parse(const std::string& text) {
    MacAddress m;
    unsigned v[6];
    char tail;
    int n = std::sscanf(text.c_str(), "%x:%x:%x:%x:%x:%x%c", &v[0], &v[1],
                        &v[2], &v[3], &v[4], &v[5], &tail);
    if (n != 6)
        throw ConfigError("bad MAC address: \"" + text + "\"");
    for (int i = 0; i < 6; ++i) {
        if (v[i] > 0xFF)
            throw ConfigError("bad MAC address: \"" + text + "\"");
        m.octets[i] = static_cast<std::uint8_t>(v[i]);
    }
    return m;
}

MacAddress MacAddress::broadcast() {
    MacAddress m;
    m.octets.fill(0xFF);
    return m;
}

bool MacAddress::is_broadcast() const {
    return std::all_of(octets.begin(), octets.end(),
                       [](std::uint8_t b) { return b == 0xFF; });
}

std::string MacAddress::str() const {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", octets[0],
                  octets[1], octets[2], octets[3], octets[4], octets[5]);
    return buf;
}

std::string to_string(AccessCategory ac) {
    switch (ac) {
    case AccessCategory::Background: return "background";
    case AccessCategory::BestEffort: return "best_effort";
    case AccessCategory::Video: return "video";
    case AccessCategory::Voice: return "voice";
    }
    return "?";
}

ReliabilityCategory ReliabilityCategory::reliable(int k) {
    if (k < 2)
        throw ConfigError("reliable RC needs redundancy >= 2, got " +
                          std::to_string(k));
    return {k};
}

ReliabilityCategory ReliabilityCategory::parse(const std::string& text) {
    if (text == "best_effort")
        return best_effort();
    if (text.rfind("reliable:", 0) == 0) {
        try {
            return reliable(std::stoi(text.substr(9)));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("bad RC: \"" + text + "\"");
        }
    }
    throw ConfigError("bad RC: \"" + text + "\"");
}

std::string ReliabilityCategory::str() const {
    return is_reliable() ? "reliable:" + std::to_string(redundancy)
                         : "best_effort";
}

void MultiLinkElement::check() const {
    if (affiliated.empty())
        throw ConfigError("MLD " + mld_id + ": no affiliated links");
    if (primary >= affiliated.size())
        throw ConfigError("MLD " + mld_id + ": primary index " +
                          std::to_string(primary) + " out of range");
    std::set<MacAddress> macs;
    std::set<std::string> ids;
    for (const auto& a : affiliated) {
        if (!macs.insert(a.mac).second)
            throw ConfigError("MLD " + mld_id + ": duplicate link MAC " +
                              a.mac.str());
        if (!ids.insert(a.link_id).second)
            throw ConfigError("MLD " + mld_id + ": duplicate link id " +
                              a.link_id);
    }
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

std::uint16_t get_u16(const std::vector<std::uint8_t>& in, std::size_t off) {
    return static_cast<std::uint16_t>((in[off] << 8) | in[off + 1]);
}

void put_mac(std::vector<std::uint8_t>& out, const MacAddress& m) {
    out.insert(out.end(), m.octets.begin(), m.octets.end());
}

MacAddress get_mac(const std::vector<std::uint8_t>& in, std::size_t off) {
    MacAddress m;
    std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(off), 6,
                m.octets.begin());
    return m;
}

} // namespace

std::vector<std::uint8_t> serialize_frame(const Frame& f) {
    std::vector<std::uint8_t> out;
    out.reserve(14 + (f.y_tag ? kYTagWireSize : 0) + f.payload.size());
    put_mac(out, f.da);
    put_mac(out, f.sa);
    if (f.y_tag) {
        put_u16(out, kYTagEtherType);
        put_mac(out, f.y_tag->na);
        put_u16(out, f.y_tag->seq);
        out.push_back(f.y_tag->version);
        out.push_back(f.y_tag->flags);
    }
    put_u16(out, f.ether_type);
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

std::vector<std::uint8_t> encode_ytag(const Frame& f, const MacAddress& na,
                                      std::uint16_t seq) {
    if (f.y_tag)
        throw NestedTagError("frame " + std::to_string(f.frame_id) +
                             " already carries a relay tag");
    Frame tagged = f;
    tagged.y_tag = YTag{na, seq, 1, 0};
    return serialize_frame(tagged);
}

std::pair<Frame, YTag> decode_ytag(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 14)
        throw MalformedFrameError("frame truncated: " +
                                  std::to_string(bytes.size()) + " bytes");
    if (get_u16(bytes, 12) != kYTagEtherType)
        throw NotAYTagError("EtherType is not the reserved relay value");
    if (bytes.size() < 14 + kYTagWireSize)
        throw MalformedFrameError("relay tag truncated: " +
                                  std::to_string(bytes.size()) + " bytes");
    YTag tag;
    tag.na = get_mac(bytes, 14);
    tag.seq = get_u16(bytes, 20);
    tag.version = bytes[22];
    tag.flags = bytes[23];

    Frame f;
    f.da = tag.na; // the tag names the true destination
    f.sa = get_mac(bytes, 6);
    f.ether_type = get_u16(bytes, 24);
    f.payload.assign(bytes.begin() + 26, bytes.end());
    f.mld_seq = tag.seq;
    f.replicated = true;
    return {f, tag};
}

Frame add_ytag(Frame f, const MacAddress& na, std::uint16_t seq,
               std::uint8_t flags, const MacAddress& outer_da,
               const MacAddress& outer_sa) {
    if (f.y_tag)
        throw NestedTagError("frame " + std::to_string(f.frame_id) +
                             " already carries a relay tag");
    f.y_tag = YTag{na, seq, 1, flags};
    f.da = outer_da;
    f.sa = outer_sa;
    return f;
}

Frame strip_ytag(Frame f) {
    if (!f.y_tag)
        throw NotAYTagError("frame " + std::to_string(f.frame_id) +
                            " carries no relay tag");
    f.da = f.y_tag->na;
    f.mld_seq = f.y_tag->seq;
    f.y_tag.reset();
    return f;
}

Frame rewrite_egress_to_wired(Frame f, const MultiLinkElement& mle) {
    bool known = std::any_of(
        mle.affiliated.begin(), mle.affiliated.end(),
        [&](const MultiLinkElement::Affiliated& a) { return a.mac == f.sa; });
    if (!known)
        throw NoAssociationError("SA " + f.sa.str() +
                                 " is not affiliated with MLD " + mle.mld_id);
    f.sa = mle.primary_mac();
    return f;
}

Frame rewrite_egress_to_air(Frame f, const MultiLinkElement& mle,
                            std::size_t link_index) {
    if (link_index >= mle.affiliated.size())
        throw ConfigError("MLD " + mle.mld_id + ": link index " +
                          std::to_string(link_index) + " out of range");
    bool addressed =
        f.da == mle.primary_mac() ||
        std::any_of(mle.affiliated.begin(), mle.affiliated.end(),
                    [&](const MultiLinkElement::Affiliated& a) {
                        return a.mac == f.da;
                    });
    if (!addressed && !f.da.is_broadcast())
        throw NoAssociationError("DA " + f.da.str() +
                                 " does not address MLD " + mle.mld_id);
    f.da = mle.affiliated[link_index].mac;
    return f;
}

} // namespace hrsim
