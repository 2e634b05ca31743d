#include "hrsim/core.hpp"

namespace hrsim {

RngStream& SimCore::rng(const std::string& name) {
    auto it = streams_.find(name);
    if (it == streams_.end())
        it = streams_.emplace(name, std::make_unique<RngStream>(seed_, name))
                 .first;
    return *it->second;
}

} // namespace hrsim
