#pragma once

#include <cstddef>
#include <new>

namespace gsc {

namespace detail {

// Thread-local freelists for the small blocks behind Vec/Mat temporaries.
// The kernels allocate a handful of N-sized vectors per node and per site;
// going through the global allocator from several workers at once serializes
// on its locks, which costs more than the numerical work for small N.
class BlockPool {
public:
    static constexpr std::size_t kBuckets = 6;  // 64, 128, ..., 2048 bytes
    static constexpr std::size_t kMaxCached = 64;
    // one cache line minimum: pooled blocks migrate between workers, and
    // sub-line blocks from neighboring allocations would false-share
    static constexpr std::align_val_t kAlign{64};

    void* allocate(std::size_t bytes) {
        const int b = bucket_of(bytes);
        if (b < 0) return ::operator new(bytes);
        Node*& head = free_[static_cast<std::size_t>(b)];
        if (head) {
            Node* n = head;
            head = n->next;
            --count_[static_cast<std::size_t>(b)];
            return n;
        }
        return ::operator new(bucket_bytes(b), kAlign);
    }

    void deallocate(void* p, std::size_t bytes) {
        const int b = bucket_of(bytes);
        if (b < 0) {
            ::operator delete(p);
            return;
        }
        if (count_[static_cast<std::size_t>(b)] >= kMaxCached) {
            ::operator delete(p, kAlign);
            return;
        }
        Node* n = static_cast<Node*>(p);
        n->next = free_[static_cast<std::size_t>(b)];
        free_[static_cast<std::size_t>(b)] = n;
        ++count_[static_cast<std::size_t>(b)];
    }

    ~BlockPool() {
        for (std::size_t b = 0; b < kBuckets; ++b)
            while (free_[b]) {
                Node* n = free_[b];
                free_[b] = n->next;
                ::operator delete(n, kAlign);
            }
    }

private:
    struct Node {
        Node* next;
    };

    static int bucket_of(std::size_t bytes) {
        std::size_t cap = 64;
        for (std::size_t b = 0; b < kBuckets; ++b, cap *= 2)
            if (bytes <= cap) return static_cast<int>(b);
        return -1;
    }
    static std::size_t bucket_bytes(int b) { return std::size_t(64) << b; }

    Node* free_[kBuckets] = {};
    std::size_t count_[kBuckets] = {};
};

inline BlockPool& thread_pool() {
    thread_local BlockPool pool;
    return pool;
}

}  // namespace detail

/// Stateless allocator backed by per-thread freelists; blocks may migrate
/// between threads (freed into the freeing thread's cache), which is safe.
template <class T>
struct PoolAllocator {
    using value_type = T;

    PoolAllocator() = default;
    template <class U>
    PoolAllocator(const PoolAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(detail::thread_pool().allocate(n * sizeof(T)));
    }
    void deallocate(T* p, std::size_t n) noexcept {
        detail::thread_pool().deallocate(p, n * sizeof(T));
    }

    friend bool operator==(const PoolAllocator&, const PoolAllocator&) { return true; }
    friend bool operator!=(const PoolAllocator&, const PoolAllocator&) { return false; }
};

}  // namespace gsc
