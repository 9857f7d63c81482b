#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>
#include <thread>

#include "recgraph/error.hpp"

namespace recgraph {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Millis = std::chrono::milliseconds;

/// Formats as `YYYY-MM-DDTHH:MM:SS.mmmZ` (UTC).
inline std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day = floor<days>(ts);
    const year_month_day ymd{day};
    const hh_mm_ss<milliseconds> tod{ts - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()), static_cast<int>(tod.seconds().count()),
                  static_cast<int>(tod.subseconds().count()));
    return buf;
}

/// Accepts the format produced by format_timestamp; the millisecond part is optional.
inline Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    int y = 0;
    unsigned mo = 0, d = 0;
    int h = 0, mi = 0, s = 0, ms = 0;
    const std::string str(text);
    int consumed = 0;
    bool ok = std::sscanf(str.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d.%3dZ%n", &y, &mo, &d, &h, &mi, &s,
                          &ms, &consumed) == 7 &&
              consumed == static_cast<int>(str.size());
    if (!ok) {
        ms = 0;
        consumed = 0;
        ok = std::sscanf(str.c_str(), "%4d-%2u-%2uT%2d:%2d:%2dZ%n", &y, &mo, &d, &h, &mi, &s,
                         &consumed) == 6 &&
             consumed == static_cast<int>(str.size());
    }
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ok || !ymd.ok() || h > 23 || mi > 59 || s > 60) {
        throw FormatError("malformed timestamp '" + str + "'");
    }
    return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{s} +
                     milliseconds{ms}};
}

/// Source of time for schedulers. A simulated clock never sleeps: waiting
/// returns the due time immediately, which makes crawls against the synthetic
/// platform instantaneous and their timestamps reproducible.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
    /// Blocks until `due` (if real) and returns the time the caller resumes at.
    virtual Timestamp wait_until(Timestamp due) const = 0;
    virtual bool simulated() const noexcept = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override {
        return std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now());
    }
    Timestamp wait_until(Timestamp due) const override {
        std::this_thread::sleep_until(due);
        return now();
    }
    bool simulated() const noexcept override { return false; }
};

class SimulatedClock final : public Clock {
public:
    explicit SimulatedClock(Timestamp origin) : origin_(origin) {}
    Timestamp now() const override { return origin_; }
    Timestamp wait_until(Timestamp due) const override { return due; }
    bool simulated() const noexcept override { return true; }

private:
    Timestamp origin_;
};

/// Default origin for simulated runs.
inline Timestamp default_simulation_origin() {
    return parse_timestamp("2019-05-01T00:00:00.000Z");
}

} // namespace recgraph
