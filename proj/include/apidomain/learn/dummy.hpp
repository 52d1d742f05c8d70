#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/rng.hpp"

namespace apidomain {

/// "uniform" strategy: each cell is 1 with probability 1/2 regardless of the
/// features. Each predict() restarts the stream, so output depends only on
/// the seed and the row count.
class UniformDummy {
 public:
  explicit UniformDummy(std::uint64_t seed = 0) : seed_(seed) {}

  std::vector<std::uint8_t> predict(std::size_t rows) const {
    Rng rng(seed_);
    std::vector<std::uint8_t> out(rows);
    for (auto& v : out) v = rng.coin() ? 1 : 0;
    return out;
  }

  std::uint64_t seed() const { return seed_; }
  bool operator==(const UniformDummy&) const = default;

  friend void to_json(nlohmann::json& j, const UniformDummy& d) { j = {{"strategy", "uniform"}, {"seed", d.seed_}}; }
  friend void from_json(const nlohmann::json& j, UniformDummy& d) { d.seed_ = j.at("seed").get<std::uint64_t>(); }

 private:
  std::uint64_t seed_;
};

}  // namespace apidomain
