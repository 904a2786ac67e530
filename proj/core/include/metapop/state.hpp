#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace metapop {

struct TravelMatrices;

// Sparse origin-destination layout of the network state. Human compartments
// exist for every stored OD pair: per origin, the diagonal (i, i) first,
// then the travel destinations in matrix rank order. Mosquito compartments
// are per node. Total dimension: 4 n + 3 pair_count.
struct StateLayout {
  int n = 0;
  std::vector<int> row_ptr;  // n + 1; pair row_ptr[i] is the diagonal (i, i)
  std::vector<int> dest;     // destination node of each pair
  std::vector<int> origin;   // origin node of each pair
  // pair indices grouped by destination node (ascending pair index within a
  // destination); used for deterministic present-population sums
  std::vector<int> dest_ptr;  // n + 1
  std::vector<int> by_dest;

  std::size_t pair_count() const { return dest.size(); }
  std::size_t dimension() const { return 4 * std::size_t(n) + 3 * pair_count(); }
  int diagonal_pair(int i) const { return row_ptr[i]; }
  // pair index of (i, j), or -1 when the pair is not stored
  int pair_index(int i, int j) const;
};

std::shared_ptr<const StateLayout> make_layout(const TravelMatrices& tm);

// Flat state vector over a shared layout: node-major mosquito block
// [E, L, S_m, I_m] then pair-major human block [S_H, I_H, R_H].
class NetworkState {
 public:
  NetworkState() = default;
  explicit NetworkState(std::shared_ptr<const StateLayout> layout);

  const StateLayout& layout() const { return *layout_; }
  std::shared_ptr<const StateLayout> layout_ptr() const { return layout_; }

  double& e(int i) { return data_[4 * i]; }
  double e(int i) const { return data_[4 * i]; }
  double& l(int i) { return data_[4 * i + 1]; }
  double l(int i) const { return data_[4 * i + 1]; }
  double& s_m(int i) { return data_[4 * i + 2]; }
  double s_m(int i) const { return data_[4 * i + 2]; }
  double& i_m(int i) { return data_[4 * i + 3]; }
  double i_m(int i) const { return data_[4 * i + 3]; }

  double& s_h(int pair) { return data_[human_base_ + 3 * pair]; }
  double s_h(int pair) const { return data_[human_base_ + 3 * pair]; }
  double& i_h(int pair) { return data_[human_base_ + 3 * pair + 1]; }
  double i_h(int pair) const { return data_[human_base_ + 3 * pair + 1]; }
  double& r_h(int pair) { return data_[human_base_ + 3 * pair + 2]; }
  double r_h(int pair) const { return data_[human_base_ + 3 * pair + 2]; }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }
  std::size_t human_base() const { return human_base_; }

  // Resident human total of each origin (sum over the origin's row).
  std::vector<double> resident_totals() const;
  // Present human total at each node (sum over incoming pairs).
  std::vector<double> present_totals() const;
  std::vector<double> present_infected() const;

 private:
  std::shared_ptr<const StateLayout> layout_;
  std::size_t human_base_ = 0;
  std::vector<double> data_;
};

}  // namespace metapop
