#pragma once

#include <map>
#include <mutex>

#include "recgraph/sample_log.hpp"
#include "recgraph/source.hpp"

namespace recgraph {

class ExhaustedLogError : public ProviderError {
public:
    explicit ExhaustedLogError(const VideoId& id)
        : ProviderError("replay log exhausted for " + id.str()) {}
};

/// Serves recorded samples back, per id, in stored request-index order.
/// The requested index is ignored: each call consumes the next stored sample.
class ReplaySource final : public Provider {
public:
    explicit ReplaySource(const SampleLog& log) {
        for (const auto& id : log.sources()) {
            auto samples = log.samples_for(id);
            if (!samples.empty()) queues_.emplace(id, Queue{std::move(samples), 0});
        }
        for (const auto& m : log.metas) {
            auto& slot = metas_[m.meta.id];
            if (!slot || m.request_index >= slot->request_index) slot = m;
        }
    }

    SuggestionSample fetch_suggestions(const VideoId& id, RequestIndex) override {
        std::lock_guard lock(mutex_);
        auto it = queues_.find(id);
        if (it == queues_.end() || it->second.next >= it->second.samples.size()) {
            throw ExhaustedLogError(id);
        }
        return it->second.samples[it->second.next++];
    }

    std::optional<VideoMeta> fetch_meta(const VideoId& id) override {
        std::lock_guard lock(mutex_);
        auto it = metas_.find(id);
        if (it == metas_.end() || !it->second) return std::nullopt;
        return it->second->meta;
    }

    std::size_t remaining(const VideoId& id) const {
        std::lock_guard lock(mutex_);
        auto it = queues_.find(id);
        return it == queues_.end() ? 0 : it->second.samples.size() - it->second.next;
    }

private:
    struct Queue {
        std::vector<SuggestionSample> samples;
        std::size_t next = 0;
    };

    std::map<VideoId, Queue> queues_;
    std::map<VideoId, std::optional<MetaSnapshot>> metas_;
    mutable std::mutex mutex_;
};

} // namespace recgraph
