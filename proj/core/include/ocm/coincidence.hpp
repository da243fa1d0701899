#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ocm/event_sim.hpp"

namespace ocm {

// Streaming coincidence analyzer for per-pulse channel fire records.
// Tracks, per pulse, which exact channel subset fired: one counter per
// subset for fold 1 through max_tracked_fold, plus per-fold totals and
// per-channel fire counts. Pulses whose fired set has exactly target_fold
// channels are also emitted as detection events. Higher folds are counted
// in fold_totals but never decomposed into sub-coincidences.
class CoincidenceCounter {
 public:
  static constexpr int kMaxTrackedFold = 5;

  CoincidenceCounter(int channel_count, int target_fold,
                     int max_tracked_fold = kMaxTrackedFold);

  // Feeds one pulse. Records must arrive with non-decreasing pulse_id;
  // fired channels may be unsorted but must be distinct and in range.
  void process(const PulseRecord& record);

  std::uint64_t pulses() const { return pulses_; }
  int channel_count() const { return channel_count_; }
  int target_fold() const { return target_fold_; }
  int max_tracked_fold() const { return max_tracked_fold_; }

  const std::vector<DetectionEvent>& events() const { return events_; }
  std::vector<DetectionEvent> take_events() { return std::move(events_); }

  // Number of pulses whose fired set was exactly this channel subset.
  std::uint64_t subset_count(std::span<const int> channels) const;

  struct SubsetCount {
    std::vector<int> channels;
    std::uint64_t count = 0;
  };
  // All fold-k subsets with nonzero counts, channels sorted, subsets in
  // lexicographic order.
  std::vector<SubsetCount> nonzero_subsets(int fold) const;

  // fold_totals()[k] is the number of pulses with exactly k fired
  // channels, k = 0..channel_count.
  const std::vector<std::uint64_t>& fold_totals() const { return fold_totals_; }
  const std::vector<std::uint64_t>& channel_fires() const { return channel_fires_; }
  double singles_rate(int channel) const;

  // Combines shard results: counts add, events append in argument order.
  // Configurations must match.
  void merge(const CoincidenceCounter& other);

 private:
  std::uint64_t subset_rank(std::span<const int> sorted_channels) const;

  int channel_count_;
  int target_fold_;
  int max_tracked_fold_;
  std::uint64_t pulses_ = 0;
  bool any_processed_ = false;
  std::uint64_t last_pulse_id_ = 0;
  std::vector<std::vector<std::uint64_t>> binomial_;
  std::vector<std::vector<std::uint64_t>> subset_tables_;
  std::vector<std::uint64_t> fold_totals_;
  std::vector<std::uint64_t> channel_fires_;
  std::vector<DetectionEvent> events_;
};

// Runs a counter over a whole record span and returns it with the
// target-fold events collected.
CoincidenceCounter extract_coincidences(std::span<const PulseRecord> records,
                                        int channel_count, int target_fold);

struct FoldStatistics {
  std::uint64_t pulses = 0;
  std::vector<std::uint64_t> fold_totals;
  std::vector<std::uint64_t> channel_fires;
  std::vector<double> singles_rates;
};

// Per-fold and per-channel summary of a record span. Rates are per
// processed record, so include empty pulses in the span when absolute
// per-pulse rates are wanted.
FoldStatistics fold_statistics(std::span<const PulseRecord> records,
                               int channel_count);

}  // namespace ocm
