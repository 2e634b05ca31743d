#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace hrsim {

/// Simulated time in integer nanoseconds. No floating point anywhere on the
/// clock path, so event traces are exactly reproducible.
struct SimTime {
    std::int64_t ns{0};

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{ns + o.ns}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{ns - o.ns}; }
    constexpr SimTime& operator+=(SimTime o) { ns += o.ns; return *this; }
    constexpr SimTime operator*(std::int64_t k) const { return SimTime{ns * k}; }

    double as_micros() const { return static_cast<double>(ns) / 1000.0; }
    std::string str() const { return std::to_string(ns); }
};

constexpr SimTime nanos(std::int64_t v)  { return SimTime{v}; }
constexpr SimTime micros(std::int64_t v) { return SimTime{v * 1000}; }
constexpr SimTime millis(std::int64_t v) { return SimTime{v * 1000000}; }
constexpr SimTime seconds(std::int64_t v){ return SimTime{v * 1000000000}; }

constexpr SimTime kTimeZero{0};

} // namespace hrsim
