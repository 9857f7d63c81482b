#pragma once

#include <memory>
#include <optional>
#include <semaphore>

#include "recgraph/core.hpp"

namespace recgraph {

/// Contract shared by every suggestion source: live HTTP, log replay and the
/// synthetic platform. Repeated calls for the same id are expected to return
/// different lists. Failures are reported through SuggestionSample::status;
/// implementations throw only for misuse (e.g. an exhausted replay log).
class Provider {
public:
    virtual ~Provider() = default;

    virtual SuggestionSample fetch_suggestions(const VideoId& id, RequestIndex request_index) = 0;

    /// Metadata snapshot, or nullopt when the item cannot be resolved.
    virtual std::optional<VideoMeta> fetch_meta(const VideoId& id) = 0;
};

inline constexpr std::ptrdiff_t kDefaultMaxInFlight = 8;

/// Caps the number of concurrent calls into a shared provider.
class InFlightLimiter final : public Provider {
public:
    InFlightLimiter(Provider& inner, std::ptrdiff_t max_in_flight = kDefaultMaxInFlight)
        : inner_(inner), slots_(max_in_flight < 1 ? 1 : max_in_flight) {}

    SuggestionSample fetch_suggestions(const VideoId& id, RequestIndex request_index) override {
        Slot slot(slots_);
        return inner_.fetch_suggestions(id, request_index);
    }

    std::optional<VideoMeta> fetch_meta(const VideoId& id) override {
        Slot slot(slots_);
        return inner_.fetch_meta(id);
    }

private:
    struct Slot {
        explicit Slot(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
        ~Slot() { sem.release(); }
        Slot(const Slot&) = delete;
        Slot& operator=(const Slot&) = delete;
        std::counting_semaphore<>& sem;
    };

    Provider& inner_;
    std::counting_semaphore<> slots_;
};

} // namespace recgraph
