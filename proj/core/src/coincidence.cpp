#include "ocm/coincidence.hpp"

#include <algorithm>
#include <stdexcept>

namespace ocm {

CoincidenceCounter::CoincidenceCounter(int channel_count, int target_fold,
                                       int max_tracked_fold)
    : channel_count_(channel_count),
      target_fold_(target_fold),
      max_tracked_fold_(max_tracked_fold) {
  if (channel_count < 2) {
    throw std::invalid_argument("CoincidenceCounter: channel_count must be >= 2");
  }
  if (target_fold < 1 || target_fold > channel_count) {
    throw std::invalid_argument(
        "CoincidenceCounter: target_fold must be in [1, channel_count]");
  }
  if (max_tracked_fold < 1 || max_tracked_fold > kMaxTrackedFold) {
    throw std::invalid_argument(
        "CoincidenceCounter: max_tracked_fold must be in [1, 5]");
  }
  max_tracked_fold_ = std::min(max_tracked_fold_, channel_count_);

  binomial_.assign(static_cast<std::size_t>(channel_count_ + 1),
                   std::vector<std::uint64_t>(
                       static_cast<std::size_t>(max_tracked_fold_ + 1), 0));
  for (int n = 0; n <= channel_count_; ++n) {
    binomial_[static_cast<std::size_t>(n)][0] = 1;
    for (int r = 1; r <= std::min(n, max_tracked_fold_); ++r) {
      binomial_[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)] =
          binomial_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(r - 1)] +
          binomial_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(r)];
    }
  }

  subset_tables_.resize(static_cast<std::size_t>(max_tracked_fold_));
  for (int k = 1; k <= max_tracked_fold_; ++k) {
    subset_tables_[static_cast<std::size_t>(k - 1)].assign(
        binomial_[static_cast<std::size_t>(channel_count_)]
                 [static_cast<std::size_t>(k)],
        0);
  }
  fold_totals_.assign(static_cast<std::size_t>(channel_count_ + 1), 0);
  channel_fires_.assign(static_cast<std::size_t>(channel_count_), 0);
}

// Colex rank of a sorted channel subset: sum over position j of
// C(channel_j, j+1). Bijective onto [0, C(D, k)).
std::uint64_t CoincidenceCounter::subset_rank(
    std::span<const int> sorted_channels) const {
  std::uint64_t rank = 0;
  for (std::size_t j = 0; j < sorted_channels.size(); ++j) {
    const int c = sorted_channels[j];
    if (c >= static_cast<int>(j + 1)) {
      rank += binomial_[static_cast<std::size_t>(c)][j + 1];
    }
  }
  return rank;
}

void CoincidenceCounter::process(const PulseRecord& record) {
  if (any_processed_ && record.pulse_id < last_pulse_id_) {
    throw std::invalid_argument(
        "CoincidenceCounter: pulse ids must be non-decreasing");
  }
  any_processed_ = true;
  last_pulse_id_ = record.pulse_id;

  std::vector<int> fired = record.fired;
  std::sort(fired.begin(), fired.end());
  if (!fired.empty()) {
    if (fired.front() < 0 || fired.back() >= channel_count_) {
      throw std::invalid_argument("CoincidenceCounter: channel out of range");
    }
    if (std::adjacent_find(fired.begin(), fired.end()) != fired.end()) {
      throw std::invalid_argument(
          "CoincidenceCounter: repeated channel in one pulse");
    }
  }

  ++pulses_;
  const int k = static_cast<int>(fired.size());
  ++fold_totals_[static_cast<std::size_t>(k)];
  for (const int c : fired) ++channel_fires_[static_cast<std::size_t>(c)];
  if (k >= 1 && k <= max_tracked_fold_) {
    ++subset_tables_[static_cast<std::size_t>(k - 1)][subset_rank(fired)];
  }
  if (k == target_fold_) {
    events_.push_back({record.pulse_id, std::move(fired)});
  }
}

std::uint64_t CoincidenceCounter::subset_count(
    std::span<const int> channels) const {
  const int k = static_cast<int>(channels.size());
  if (k < 1 || k > max_tracked_fold_) {
    throw std::invalid_argument(
        "CoincidenceCounter: subset fold outside tracked range");
  }
  std::vector<int> sorted(channels.begin(), channels.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= channel_count_ ||
      std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("CoincidenceCounter: invalid channel subset");
  }
  return subset_tables_[static_cast<std::size_t>(k - 1)][subset_rank(sorted)];
}

std::vector<CoincidenceCounter::SubsetCount> CoincidenceCounter::nonzero_subsets(
    int fold) const {
  if (fold < 1 || fold > max_tracked_fold_) {
    throw std::invalid_argument(
        "CoincidenceCounter: fold outside tracked range");
  }
  std::vector<SubsetCount> out;
  std::vector<int> combo(static_cast<std::size_t>(fold));
  for (int j = 0; j < fold; ++j) combo[static_cast<std::size_t>(j)] = j;
  for (;;) {
    const std::uint64_t count =
        subset_tables_[static_cast<std::size_t>(fold - 1)][subset_rank(combo)];
    if (count != 0) out.push_back({combo, count});
    // Next combination in lexicographic order.
    int j = fold - 1;
    while (j >= 0 &&
           combo[static_cast<std::size_t>(j)] == channel_count_ - fold + j) {
      --j;
    }
    if (j < 0) break;
    ++combo[static_cast<std::size_t>(j)];
    for (int m = j + 1; m < fold; ++m) {
      combo[static_cast<std::size_t>(m)] = combo[static_cast<std::size_t>(m - 1)] + 1;
    }
  }
  return out;
}

double CoincidenceCounter::singles_rate(int channel) const {
  if (channel < 0 || channel >= channel_count_) {
    throw std::invalid_argument("CoincidenceCounter: channel out of range");
  }
  if (pulses_ == 0) return 0.0;
  return static_cast<double>(channel_fires_[static_cast<std::size_t>(channel)]) /
         static_cast<double>(pulses_);
}

void CoincidenceCounter::merge(const CoincidenceCounter& other) {
  if (other.channel_count_ != channel_count_ ||
      other.target_fold_ != target_fold_ ||
      other.max_tracked_fold_ != max_tracked_fold_) {
    throw std::invalid_argument(
        "CoincidenceCounter: cannot merge differently configured counters");
  }
  pulses_ += other.pulses_;
  for (std::size_t k = 0; k < subset_tables_.size(); ++k) {
    for (std::size_t r = 0; r < subset_tables_[k].size(); ++r) {
      subset_tables_[k][r] += other.subset_tables_[k][r];
    }
  }
  for (std::size_t k = 0; k < fold_totals_.size(); ++k) {
    fold_totals_[k] += other.fold_totals_[k];
  }
  for (std::size_t c = 0; c < channel_fires_.size(); ++c) {
    channel_fires_[c] += other.channel_fires_[c];
  }
  events_.insert(events_.end(), other.events_.begin(), other.events_.end());
  if (other.any_processed_) {
    last_pulse_id_ = std::max(last_pulse_id_, other.last_pulse_id_);
    any_processed_ = true;
  }
}

CoincidenceCounter extract_coincidences(std::span<const PulseRecord> records,
                                        int channel_count, int target_fold) {
  CoincidenceCounter counter(channel_count, target_fold,
                             std::min(channel_count,
                                      CoincidenceCounter::kMaxTrackedFold));
  for (const PulseRecord& record : records) counter.process(record);
  return counter;
}

FoldStatistics fold_statistics(std::span<const PulseRecord> records,
                               int channel_count) {
  if (channel_count < 2) {
    throw std::invalid_argument("fold_statistics: channel_count must be >= 2");
  }
  FoldStatistics stats;
  stats.fold_totals.assign(static_cast<std::size_t>(channel_count + 1), 0);
  stats.channel_fires.assign(static_cast<std::size_t>(channel_count), 0);
  std::vector<int> fired;
  for (const PulseRecord& record : records) {
    fired = record.fired;
    std::sort(fired.begin(), fired.end());
    if (!fired.empty()) {
      if (fired.front() < 0 || fired.back() >= channel_count ||
          std::adjacent_find(fired.begin(), fired.end()) != fired.end()) {
        throw std::invalid_argument("fold_statistics: invalid fired set");
      }
    }
    ++stats.pulses;
    ++stats.fold_totals[fired.size()];
    for (const int c : fired) ++stats.channel_fires[static_cast<std::size_t>(c)];
  }
  stats.singles_rates.assign(static_cast<std::size_t>(channel_count), 0.0);
  if (stats.pulses > 0) {
    for (int c = 0; c < channel_count; ++c) {
      stats.singles_rates[static_cast<std::size_t>(c)] =
          static_cast<double>(stats.channel_fires[static_cast<std::size_t>(c)]) /
          static_cast<double>(stats.pulses);
    }
  }
  return stats;
}

}  // namespace ocm
