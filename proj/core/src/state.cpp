#include "metapop/state.hpp"

#include <numeric>
#include <stdexcept>

#include "metapop/mobility.hpp"

namespace metapop {

int StateLayout::pair_index(int i, int j) const {
  for (int q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
    if (dest[q] == j) return q;
  }
  return -1;
}

std::shared_ptr<const StateLayout> make_layout(const TravelMatrices& tm) {
  auto layout = std::make_shared<StateLayout>();
  const int n = tm.n;
  layout->n = n;
  layout->row_ptr.resize(n + 1);
  layout->row_ptr[0] = 0;
  const std::size_t pairs = std::size_t(n) + tm.pair_count();
  layout->dest.reserve(pairs);
  layout->origin.reserve(pairs);
  for (int i = 0; i < n; ++i) {
    layout->dest.push_back(i);  // diagonal first
    layout->origin.push_back(i);
    for (int q = tm.row_ptr[i]; q < tm.row_ptr[i + 1]; ++q) {
      if (tm.dest[q] == i) {
        throw std::invalid_argument("make_layout: travel matrices must not store diagonal pairs");
      }
      layout->dest.push_back(tm.dest[q]);
      layout->origin.push_back(i);
    }
    layout->row_ptr[i + 1] = static_cast<int>(layout->dest.size());
  }
  // destination-major grouping
  layout->dest_ptr.assign(n + 1, 0);
  for (int d : layout->dest) layout->dest_ptr[d + 1]++;
  for (int i = 1; i <= n; ++i) layout->dest_ptr[i] += layout->dest_ptr[i - 1];
  layout->by_dest.resize(layout->dest.size());
  std::vector<int> cur(layout->dest_ptr.begin(), layout->dest_ptr.end() - 1);
  for (int q = 0; q < static_cast<int>(layout->dest.size()); ++q) {
    layout->by_dest[cur[layout->dest[q]]++] = q;
  }
  return layout;
}

NetworkState::NetworkState(std::shared_ptr<const StateLayout> layout)
    : layout_(std::move(layout)),
      human_base_(4 * std::size_t(layout_->n)),
      data_(layout_->dimension(), 0.0) {}

std::vector<double> NetworkState::resident_totals() const {
  const auto& lay = *layout_;
  std::vector<double> out(lay.n, 0.0);
  for (int i = 0; i < lay.n; ++i) {
    double total = 0;
    for (int q = lay.row_ptr[i]; q < lay.row_ptr[i + 1]; ++q) {
      total += s_h(q) + i_h(q) + r_h(q);
    }
    out[i] = total;
  }
  return out;
}

std::vector<double> NetworkState::present_totals() const {
  const auto& lay = *layout_;
  std::vector<double> out(lay.n, 0.0);
  for (int j = 0; j < lay.n; ++j) {
    double total = 0;
    for (int k = lay.dest_ptr[j]; k < lay.dest_ptr[j + 1]; ++k) {
      const int q = lay.by_dest[k];
      total += s_h(q) + i_h(q) + r_h(q);
    }
    out[j] = total;
  }
  return out;
}

std::vector<double> NetworkState::present_infected() const {
  const auto& lay = *layout_;
  std::vector<double> out(lay.n, 0.0);
  for (int j = 0; j < lay.n; ++j) {
    double total = 0;
    for (int k = lay.dest_ptr[j]; k < lay.dest_ptr[j + 1]; ++k) {
      total += i_h(lay.by_dest[k]);
    }
    out[j] = total;
  }
  return out;
}

}  // namespace metapop
