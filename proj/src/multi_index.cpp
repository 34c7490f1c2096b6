#include "nilwalk/multi_index.hpp"

#include <algorithm>
#include <sstream>

namespace nilwalk {

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (i) os << ",";
    os << e_[i];
  }
  os << ")";
  return os.str();
}

namespace {

void enumerate_rec(const std::vector<int>& weights, std::size_t pos, int budget,
                   MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == weights.size()) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k * weights[pos] <= budget; ++k) {
    cur[pos] = static_cast<uint32_t>(k);
    enumerate_rec(weights, pos + 1, budget - k * weights[pos], cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_weighted(const std::vector<int>& weights, int dmax) {
  std::vector<MultiIndex> out;
  MultiIndex cur(weights.size());
  enumerate_rec(weights, 0, dmax, cur, out);
  std::sort(out.begin(), out.end(), [&](const MultiIndex& a, const MultiIndex& b) {
    const auto da = a.weighted_degree(weights), db = b.weighted_degree(weights);
    if (da != db) return da < db;
    return a < b;
  });
  return out;
}

}  // namespace nilwalk
