#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hrsim/time.hpp"

namespace hrsim {

/// One simulator event in the order it was processed. Serialized as a TSV
/// line; reruns with the same seed must reproduce the byte stream exactly.
struct TraceRecord {
    SimTime at{0};
    std::string node;   // acting node id
    std::string event;  // e.g. "tx_attempt", "dedup_discard", "deliver"
    std::int64_t frame{-1};
    std::string where;  // link or port id, may be empty
    std::string detail; // free-form key=value pairs, may be empty

    std::string tsv() const;
};

/// Append-only event log. Recording can be disabled for large sweeps; the
/// record() overloads are cheap no-ops then.
class Trace {
  public:
    void enable(bool on) { enabled_ = on; }
    bool enabled() const { return enabled_; }

    void record(TraceRecord rec);
    void record(SimTime at, std::string node, std::string event,
                std::int64_t frame = -1, std::string where = {},
                std::string detail = {});

    const std::vector<TraceRecord>& records() const { return records_; }
    std::string tsv() const; // header line + one line per record
    void write_file(const std::string& path) const;

  private:
    bool enabled_{true};
    std::vector<TraceRecord> records_;
};

} // namespace hrsim
