#include "hrsim/trace.hpp"

#include <fstream>

#include "hrsim/errors.hpp"

namespace hrsim {

std::string TraceRecord::tsv() const {
    std::string line = std::to_string(at.ns);
    line += '\t';
    line += node;
    line += '\t';
    line += event;
    line += '\t';
    line += frame < 0 ? "-" : std::to_string(frame);
    line += '\t';
    line += where.empty() ? "-" : where;
    line += '\t';
    line += detail.empty() ? "-" : detail;
    return line;
}

void Trace::record(TraceRecord rec) {
    if (enabled_)
        records_.push_back(std::move(rec));
}

void Trace::record(SimTime at, std::string node, std::string event,
                   std::int64_t frame, std::string where, std::string detail) {
    if (enabled_)
        records_.push_back(TraceRecord{at, std::move(node), std::move(event),
                                       frame, std::move(where),
                                       std::move(detail)});
}

std::string Trace::tsv() const {
    std::string out = "time_ns\tnode\tevent\tframe\twhere\tdetail\n";
    for (const auto& r : records_) {
        out += r.tsv();
        out += '\n';
    }
    return out;
}

void Trace::write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw SimError("cannot open trace file for writing: " + path);
    f << tsv();
}

} // namespace hrsim
