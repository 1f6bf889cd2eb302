#pragma once

#include <string>
#include <vector>

namespace volterra {

// Set partition of {1..k}; blocks are canonically ordered by their smallest
// element and elements within a block are increasing.
class Partition {
  public:
    explicit Partition(std::vector<std::vector<int>> blocks);

    int ground_size() const { return k_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    // p_t = |P_t| in canonical order
    std::vector<int> sizes() const;
    // block index (0-based) containing element e (1-based)
    int block_of(int e) const;

    std::string to_string() const;  // {{1,2},{3}}
    bool operator==(const Partition& other) const {
        return blocks_ == other.blocks_;
    }

  private:
    std::vector<std::vector<int>> blocks_;
    int k_ = 0;
};

// All set partitions of {1..k}, 1 <= k <= 10, sorted lexicographically by
// the block-leader sequence; count equals the Bell number.
std::vector<Partition> enumerate_partitions(int k);

}  // namespace volterra
