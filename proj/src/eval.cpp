/* Copyright 2026 The DriveAgent Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "driveagent/eval.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "driveagent/errors.hpp"
#include "driveagent/geometry.hpp"

namespace driveagent {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  for (const auto& [category, counts] : other.per_category) {
    CategoryCounts& mine = per_category[category];
    mine.tp += counts.tp;
    mine.fp += counts.fp;
    mine.fn += counts.fn;
  }
  return *this;
}

const char* to_string(AggregationMode m) {
  return m == AggregationMode::Micro ? "micro" : "macro";
}

ConfusionCounts match_detections(const std::vector<LabeledDetection>& predicted,
                                 const std::vector<LabeledDetection>& gold, double radius) {
  ConfusionCounts result;

  std::map<Category, std::vector<std::size_t>> pred_by_cat;
  std::map<Category, std::vector<std::size_t>> gold_by_cat;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    pred_by_cat[predicted[i].category].push_back(i);
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    gold_by_cat[gold[i].category].push_back(i);
  }

  std::set<Category> categories;
  for (const auto& [category, _] : pred_by_cat) categories.insert(category);
  for (const auto& [category, _] : gold_by_cat) categories.insert(category);

  for (Category category : categories) {
    const auto& preds = pred_by_cat[category];
    const auto& golds = gold_by_cat[category];

    // All candidate pairs within the radius, matched greedily by distance.
    // Ties break toward the earlier prediction, then the earlier gold.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t pi = 0; pi < preds.size(); ++pi) {
      for (std::size_t gi = 0; gi < golds.size(); ++gi) {
        const double d = distance(predicted[preds[pi]].position, gold[golds[gi]].position);
        if (d <= radius) pairs.emplace_back(d, pi, gi);
      }
    }
    std::sort(pairs.begin(), pairs.end());

    std::vector<bool> pred_used(preds.size(), false);
    std::vector<bool> gold_used(golds.size(), false);
    CategoryCounts counts;
    for (const auto& [d, pi, gi] : pairs) {
      if (pred_used[pi] || gold_used[gi]) continue;
      pred_used[pi] = true;
      gold_used[gi] = true;
      ++counts.tp;
    }
    counts.fp = static_cast<int>(preds.size()) - counts.tp;
    counts.fn = static_cast<int>(golds.size()) - counts.tp;
    result.per_category[category] = counts;
  }
  return result;
}

MetricTriple metrics_from_counts(const CategoryCounts& counts) {
  MetricTriple m;
  const int pred_total = counts.tp + counts.fp;
  const int gold_total = counts.tp + counts.fn;
  m.precision = pred_total > 0 ? static_cast<double>(counts.tp) / pred_total : 0.0;
  m.recall = gold_total > 0 ? static_cast<double>(counts.tp) / gold_total : 0.0;
  const double sum = m.precision + m.recall;
  m.f1 = sum > 0.0 ? 2.0 * m.precision * m.recall / sum : 0.0;
  return m;
}

MetricTriple aggregate(const ConfusionCounts& counts, AggregationMode mode) {
  if (mode == AggregationMode::Micro) {
    CategoryCounts pooled;
    for (const auto& [_, c] : counts.per_category) {
      pooled.tp += c.tp;
      pooled.fp += c.fp;
      pooled.fn += c.fn;
    }
    return metrics_from_counts(pooled);
  }

  // Macro: unweighted mean over categories that actually appear, so rare
  // categories count as much as common ones.
  MetricTriple mean;
  int populated = 0;
  for (const auto& [_, c] : counts.per_category) {
    if (c.tp + c.fp + c.fn == 0) continue;
    const MetricTriple m = metrics_from_counts(c);
    mean.precision += m.precision;
    mean.recall += m.recall;
    mean.f1 += m.f1;
    ++populated;
  }
  if (populated > 0) {
    mean.precision /= populated;
    mean.recall /= populated;
    mean.f1 /= populated;
  }
  return mean;
}

DetectionMetrics compute_metrics(const ConfusionCounts& counts) {
  DetectionMetrics metrics;
  for (const auto& [category, c] : counts.per_category) {
    metrics.per_category[category] = metrics_from_counts(c);
  }
  metrics.micro = aggregate(counts, AggregationMode::Micro);
  metrics.macro = aggregate(counts, AggregationMode::Macro);
  return metrics;
}

TaskAccuracy reasoning_accuracy(const std::map<std::string, std::string>& predictions,
                                const std::map<std::string, std::string>& gold,
                                const std::string& task, const std::string& partition) {
  if (gold.empty()) {
    throw Error(ErrorCode::CaseMismatch, "no gold cases for " + task + "/" + partition);
  }
  if (predictions.size() != gold.size()) {
    throw Error(ErrorCode::CaseMismatch, "prediction and gold case counts differ");
  }
  TaskAccuracy result;
  result.task = task;
  result.partition = partition;
  result.total = static_cast<int>(gold.size());
  for (const auto& [id, verdict] : gold) {
    auto it = predictions.find(id);
    if (it == predictions.end()) {
      throw Error(ErrorCode::CaseMismatch, "prediction missing for case \"" + id + "\"");
    }
    if (it->second == verdict) ++result.correct;
  }
  result.accuracy = static_cast<double>(result.correct) / result.total;
  return result;
}

}  // namespace driveagent
