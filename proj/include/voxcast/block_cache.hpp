#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <queue>
#include <shared_mutex>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "voxcast/container.hpp"

namespace voxcast {

struct CacheKey {
    std::uint32_t level = 0;
    std::array<std::uint32_t, 3> coords{};

    bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const {
        std::uint64_t h = k.level;
        for (std::uint32_t c : k.coords) h = h * 0x100000001b3ULL ^ c;
        return static_cast<std::size_t>(h);
    }
};

/// Byte-budgeted LRU block cache. Recency is a monotonic tick updated
/// on every touch; eviction pops a timestamp min-heap with lazy
/// deletion of stale heap nodes. Misses enqueue the key on a FIFO
/// request queue (deduplicated) for the loader to drain between
/// frames.
///
/// Concurrency: lookups take a shared lock and bump the timestamp
/// atomically; anything that changes the key set (insert, eviction,
/// request enqueue, drain) takes the exclusive lock. No lock is held
/// across disk I/O — the cache stores already-decoded blocks only.
class BlockCache {
  public:
    explicit BlockCache(std::size_t capacity_bytes) : capacity_(capacity_bytes) {}

    /// nullptr on miss (the key is then queued for loading).
    std::shared_ptr<const Block> get(const CacheKey& key);

    /// Lookup that neither refreshes recency nor queues a request.
    bool contains(const CacheKey& key) const;

    /// contains() variant returning the payload; used by render passes
    /// to pin neighbor blocks without touching recency.
    std::shared_ptr<const Block> peek(const CacheKey& key) const;

    /// Queue a key for loading without a lookup (deduplicated).
    void request(const CacheKey& key);

    /// Inserts (or replaces) an entry and returns the evicted keys,
    /// oldest first. Throws if the block alone exceeds the budget.
    std::vector<CacheKey> insert(const CacheKey& key, std::shared_ptr<const Block> block);

    /// Up to `limit` queued keys in FIFO order, removed from the queue.
    std::vector<CacheKey> drain_requests(std::size_t limit);

    std::size_t bytes_used() const;
    std::size_t peak_bytes() const;
    std::size_t capacity() const { return capacity_; }
    std::size_t entry_count() const;
    std::uint64_t hits() const { return hits_.load(std::memory_order_relaxed); }
    std::uint64_t misses() const { return misses_.load(std::memory_order_relaxed); }

  private:
    struct Entry {
        std::shared_ptr<const Block> block;
        std::size_t bytes = 0;
        std::atomic<std::uint64_t> stamp{0};
    };
    struct HeapNode {
        std::uint64_t stamp;
        CacheKey key;
        bool operator>(const HeapNode& o) const { return stamp > o.stamp; }
    };

    void enqueue_locked(const CacheKey& key);
    std::uint64_t tick() { return clock_.fetch_add(1, std::memory_order_relaxed) + 1; }

    const std::size_t capacity_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<CacheKey, std::unique_ptr<Entry>, CacheKeyHash> entries_;
    std::priority_queue<HeapNode, std::vector<HeapNode>, std::greater<>> heap_;
    std::deque<CacheKey> request_fifo_;
    std::unordered_set<CacheKey, CacheKeyHash> requested_;
    std::size_t used_ = 0;
    std::size_t peak_ = 0;
    std::atomic<std::uint64_t> clock_{0};
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> misses_{0};
};

/// Two-level composition: render-cache miss falls through to the
/// memory cache, which falls through to the container on disk.
/// load_requested() drains the render cache's queue and fills both
/// levels; blocks are never duplicated within one instance.
class BlockProvider {
  public:
    BlockProvider(ContainerHandle container, std::size_t memory_bytes,
                  std::size_t render_bytes)
        : container_(std::move(container)),
          memory_cache_(memory_bytes),
          render_cache_(render_bytes) {}

    BlockCache& render_cache() { return render_cache_; }
    BlockCache& memory_cache() { return memory_cache_; }
    const ContainerHandle& container() const { return container_; }

    /// Loads up to `limit` requested blocks into the render cache
    /// (via the memory cache). Returns the number loaded.
    std::size_t load_requested(std::size_t limit);

    /// Fetches one block through the hierarchy immediately.
    std::shared_ptr<const Block> fetch(const CacheKey& key);

  private:
    ContainerHandle container_;
    BlockCache memory_cache_;
    BlockCache render_cache_;
};

}  // namespace voxcast
