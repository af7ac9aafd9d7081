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

// Metrics harness: distance-gated greedy detection matching with per-category
// precision/recall/F1 (micro and macro aggregation) and exact-match
// reasoning accuracy per task partition.

#ifndef DRIVEAGENT_EVAL_HPP
#define DRIVEAGENT_EVAL_HPP

#include <map>
#include <string>
#include <vector>

#include "driveagent/trace.hpp"

namespace driveagent {

struct LabeledDetection {
  Category category{Category::FourWheelVehicle};
  Vec3 position;

  bool operator==(const LabeledDetection&) const = default;
};

struct CategoryCounts {
  int tp{0};
  int fp{0};
  int fn{0};

  bool operator==(const CategoryCounts&) const = default;
};

struct ConfusionCounts {
  std::map<Category, CategoryCounts> per_category;

  ConfusionCounts& operator+=(const ConfusionCounts& other);
  bool operator==(const ConfusionCounts&) const = default;
};

struct MetricTriple {
  double precision{0.0};
  double recall{0.0};
  double f1{0.0};

  bool operator==(const MetricTriple&) const = default;
};

enum class AggregationMode { Micro, Macro };

const char* to_string(AggregationMode m);

struct DetectionMetrics {
  std::map<Category, MetricTriple> per_category;
  MetricTriple micro;  // counts pooled, then P/R/F1
  MetricTriple macro;  // per-category P/R/F1 averaged over categories with any counts
};

/// Greedy per-category matching by ascending pair distance; pairs within
/// `radius` become tp, leftover predictions fp, leftover gold fn. Ties
/// resolve by input order.
ConfusionCounts match_detections(const std::vector<LabeledDetection>& predicted,
                                 const std::vector<LabeledDetection>& gold,
                                 double radius = 2.0);

/// P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R); zero denominators give 0.
MetricTriple metrics_from_counts(const CategoryCounts& counts);

DetectionMetrics compute_metrics(const ConfusionCounts& counts);
MetricTriple aggregate(const ConfusionCounts& counts, AggregationMode mode);

struct TaskAccuracy {
  std::string task;       // vehicle-lidar | vehicle-vision | environmental
  std::string partition;  // route or view label
  int correct{0};
  int total{0};
  double accuracy{0.0};

  bool operator==(const TaskAccuracy&) const = default;
};

/// Exact-match accuracy over verdicts keyed by case id. Throws CaseMismatch
/// when prediction and gold id sets differ.
TaskAccuracy reasoning_accuracy(const std::map<std::string, std::string>& predictions,
                                const std::map<std::string, std::string>& gold,
                                const std::string& task, const std::string& partition);

}  // namespace driveagent

#endif  // DRIVEAGENT_EVAL_HPP
