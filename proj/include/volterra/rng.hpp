#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace volterra {

// Counter-based stream: output i is a pure function of (key, i), where the
// key is derived by hashing the root seed together with the stream path.
// Substreams can therefore be handed to workers in any order without
// affecting the numbers a given (root, path) produces.
class RngStream {
  public:
    explicit RngStream(std::uint64_t root) : key_(derive_key(golden_, root)) {}
    RngStream(std::uint64_t root, std::initializer_list<std::uint64_t> path)
        : RngStream(root) {
        for (auto p : path) key_ = derive_key(key_, p);
    }

    // Child stream for path element `index`; does not disturb this stream.
    RngStream derive(std::uint64_t index) const {
        RngStream s(*this);
        s.key_ = derive_key(key_, index);
        s.counter_ = 0;
        s.have_cached_gaussian_ = false;
        return s;
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * golden_); }

    // Uniform on (0,1), never exactly 0 or 1.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_gaussian();
    void fill_gaussian(std::span<double> out);

    std::uint64_t key() const { return key_; }

  private:
    static constexpr std::uint64_t golden_ = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }
    static std::uint64_t derive_key(std::uint64_t key, std::uint64_t element) {
        return mix(mix(key + golden_) ^ mix(element + 0xD1B54A32D192ED03ull));
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    bool have_cached_gaussian_ = false;
    double cached_gaussian_ = 0.0;
};

}  // namespace volterra
