#include "voxcast/block_cache.hpp"

#include "voxcast/error.hpp"

namespace voxcast {

std::shared_ptr<const Block> BlockCache::get(const CacheKey& key) {
    {
        std::shared_lock lock(mutex_);
        const auto it = entries_.find(key);
        if (it != entries_.end()) {
            it->second->stamp.store(tick(), std::memory_order_relaxed);
            hits_.fetch_add(1, std::memory_order_relaxed);
            return it->second->block;
        }
    }
    std::unique_lock lock(mutex_);
    const auto it = entries_.find(key);
    if (it != entries_.end()) {  // raced with an insert
        it->second->stamp.store(tick(), std::memory_order_relaxed);
        hits_.fetch_add(1, std::memory_order_relaxed);
        return it->second->block;
    }
    misses_.fetch_add(1, std::memory_order_relaxed);
    enqueue_locked(key);
    return nullptr;
}

bool BlockCache::contains(const CacheKey& key) const {
    std::shared_lock lock(mutex_);
    return entries_.count(key) != 0;
}

std::shared_ptr<const Block> BlockCache::peek(const CacheKey& key) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : it->second->block;
}

void BlockCache::request(const CacheKey& key) {
    std::unique_lock lock(mutex_);
    if (entries_.count(key)) return;
    enqueue_locked(key);
}

void BlockCache::enqueue_locked(const CacheKey& key) {
    if (requested_.insert(key).second) request_fifo_.push_back(key);
}

std::vector<CacheKey> BlockCache::insert(const CacheKey& key,
                                         std::shared_ptr<const Block> block) {
    const std::size_t bytes = block->voxels.size();
    if (bytes > capacity_)
        throw Error("cache: block (" + std::to_string(bytes) + " bytes) exceeds capacity (" +
                    std::to_string(capacity_) + ")");

    std::unique_lock lock(mutex_);
    std::vector<CacheKey> evicted;

    if (const auto it = entries_.find(key); it != entries_.end()) {
        // replace in place: same key, fresh recency, no duplicate entry
        used_ -= it->second->bytes;
        it->second->block = std::move(block);
        it->second->bytes = bytes;
        const std::uint64_t stamp = tick();
        it->second->stamp.store(stamp, std::memory_order_relaxed);
        heap_.push({stamp, key});
        used_ += bytes;
        peak_ = std::max(peak_, used_);
        requested_.erase(key);
        return evicted;
    }

    // free space, oldest first; stale heap nodes are skipped or
    // refreshed lazily
    while (used_ + bytes > capacity_ && !heap_.empty()) {
        HeapNode top = heap_.top();
        heap_.pop();
        const auto it = entries_.find(top.key);
        if (it == entries_.end()) continue;  // node for an evicted entry
        const std::uint64_t current = it->second->stamp.load(std::memory_order_relaxed);
        if (current != top.stamp) {
            heap_.push({current, top.key});  // entry was touched since; reinsert fresh
            continue;
        }
        used_ -= it->second->bytes;
        entries_.erase(it);
        evicted.push_back(top.key);
    }

    auto entry = std::make_unique<Entry>();
    entry->block = std::move(block);
    entry->bytes = bytes;
    const std::uint64_t stamp = tick();
    entry->stamp.store(stamp, std::memory_order_relaxed);
    entries_.emplace(key, std::move(entry));
    heap_.push({stamp, key});
    used_ += bytes;
    peak_ = std::max(peak_, used_);
    requested_.erase(key);
    return evicted;
}

std::vector<CacheKey> BlockCache::drain_requests(std::size_t limit) {
    std::unique_lock lock(mutex_);
    std::vector<CacheKey> out;
    while (out.size() < limit && !request_fifo_.empty()) {
        const CacheKey key = request_fifo_.front();
        request_fifo_.pop_front();
        // entries satisfied by an insert since they were queued are
        // gone from the set; skip their stale FIFO slots
        if (requested_.erase(key) == 1) out.push_back(key);
    }
    return out;
}

std::size_t BlockCache::bytes_used() const {
    std::shared_lock lock(mutex_);
    return used_;
}

std::size_t BlockCache::peak_bytes() const {
    std::shared_lock lock(mutex_);
    return peak_;
}

std::size_t BlockCache::entry_count() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::size_t BlockProvider::load_requested(std::size_t limit) {
    const auto keys = render_cache_.drain_requests(limit);
    for (const CacheKey& key : keys) {
        auto block = memory_cache_.get(key);
        if (!block) {
            block = std::make_shared<const Block>(
                container_->read_chunk(key.level, key.coords));
            memory_cache_.insert(key, block);
        }
        render_cache_.insert(key, block);
    }
    return keys.size();
}

std::shared_ptr<const Block> BlockProvider::fetch(const CacheKey& key) {
    if (auto block = render_cache_.get(key)) return block;
    auto block = memory_cache_.get(key);
    if (!block) {
        block = std::make_shared<const Block>(container_->read_chunk(key.level, key.coords));
        memory_cache_.insert(key, block);
    }
    render_cache_.insert(key, block);
    return block;
}

}  // namespace voxcast
