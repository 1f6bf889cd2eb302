#include "volterra/partitions.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace volterra {

Partition::Partition(std::vector<std::vector<int>> blocks)
    : blocks_(std::move(blocks)) {
    int count = 0;
    for (auto& block : blocks_) {
        if (block.empty())
            throw std::invalid_argument("partition: empty block");
        std::sort(block.begin(), block.end());
        count += static_cast<int>(block.size());
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });
    k_ = count;
    std::vector<bool> seen(static_cast<std::size_t>(k_) + 1, false);
    for (const auto& block : blocks_)
        for (int e : block) {
            if (e < 1 || e > k_ || seen[static_cast<std::size_t>(e)])
                throw std::invalid_argument(
                    "partition: blocks must form a disjoint cover of {1..k}");
            seen[static_cast<std::size_t>(e)] = true;
        }
}

std::vector<int> Partition::sizes() const {
    std::vector<int> out;
    out.reserve(blocks_.size());
    for (const auto& block : blocks_)
        out.push_back(static_cast<int>(block.size()));
    return out;
}

int Partition::block_of(int e) const {
    for (std::size_t t = 0; t < blocks_.size(); ++t)
        for (int v : blocks_[t])
            if (v == e) return static_cast<int>(t);
    throw std::invalid_argument("partition: element out of range");
}

std::string Partition::to_string() const {
    std::string out = "{";
    for (std::size_t t = 0; t < blocks_.size(); ++t) {
        out += "{";
        for (std::size_t j = 0; j < blocks_[t].size(); ++j) {
            out += std::to_string(blocks_[t][j]);
            if (j + 1 < blocks_[t].size()) out += ",";
        }
        out += "}";
        if (t + 1 < blocks_.size()) out += ",";
    }
    out += "}";
    return out;
}

std::vector<Partition> enumerate_partitions(int k) {
    if (k < 1 || k > 10)
        throw std::invalid_argument("enumerate_partitions: k must be in 1..10");
    std::vector<Partition> out;
    // restricted growth strings: rgs[0] = 0, rgs[i] <= 1 + max(rgs[0..i-1])
    std::vector<int> rgs(static_cast<std::size_t>(k), 0);
    const auto emit = [&]() {
        const int m = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(m));
        for (int i = 0; i < k; ++i)
            blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])]
                .push_back(i + 1);
        out.emplace_back(std::move(blocks));
    };
    const std::function<void(int, int)> recurse = [&](int i, int maxv) {
        if (i == k) {
            emit();
            return;
        }
        for (int v = 0; v <= maxv + 1; ++v) {
            rgs[static_cast<std::size_t>(i)] = v;
            recurse(i + 1, std::max(maxv, v));
        }
    };
    recurse(0, -1);
    // sort by block-leader sequence, a sequence that ends counting as larger
    // than any continuation (so {{1},{2}} precedes {{1,2}})
    std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
        const auto& ba = a.blocks();
        const auto& bb = b.blocks();
        const std::size_t n = std::min(ba.size(), bb.size());
        for (std::size_t t = 0; t < n; ++t)
            if (ba[t].front() != bb[t].front())
                return ba[t].front() < bb[t].front();
        return ba.size() > bb.size();
    });
    return out;
}

}  // namespace volterra
