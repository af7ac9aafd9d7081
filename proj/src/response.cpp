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

#include "driveagent/response.hpp"

#include <algorithm>

#include "driveagent/errors.hpp"

namespace driveagent {

const char* to_string(InsightCategory c) {
  switch (c) {
    case InsightCategory::Safety: return "safety";
    case InsightCategory::Maintenance: return "maintenance";
    case InsightCategory::Efficiency: return "efficiency";
    case InsightCategory::Comfort: return "comfort";
  }
  return "unknown";
}

InsightCategory insight_category_from_string(const std::string& s) {
  if (s == "safety") return InsightCategory::Safety;
  if (s == "maintenance") return InsightCategory::Maintenance;
  if (s == "efficiency") return InsightCategory::Efficiency;
  if (s == "comfort") return InsightCategory::Comfort;
  throw Error(ErrorCode::FieldTypeMismatch, "unknown insight category \"" + s + "\"");
}

const ResponseParams& default_response_params() {
  static const ResponseParams params = [] {
    ResponseParams p;
    p.weights = {{InsightCategory::Safety, 3.0},
                 {InsightCategory::Maintenance, 2.0},
                 {InsightCategory::Efficiency, 1.0},
                 {InsightCategory::Comfort, 0.0}};
    p.catalog = {
        {InsightCategory::Safety,
         {{0, "emergency-brake", 0.9, 0.9}, {1, "slow-down", 0.6, 0.4}, {2, "yield", 0.5, 0.3}}},
        {InsightCategory::Maintenance,
         {{3, "pull-over-inspect", 0.7, 0.8}, {4, "schedule-service", 0.3, 0.1}}},
        {InsightCategory::Efficiency, {{5, "reroute", 0.4, 0.3}, {6, "adjust-speed", 0.3, 0.2}}},
        {InsightCategory::Comfort, {{7, "smooth-acceleration", 0.2, 0.1}}},
    };
    return p;
  }();
  return params;
}

namespace {

double weight_of(InsightCategory c, const ResponseParams& params) {
  auto it = params.weights.find(c);
  return it == params.weights.end() ? 0.0 : it->second;
}

// safety > maintenance > efficiency > comfort, independent of the
// configurable weights so tie-breaking stays stable.
int priority_rank(InsightCategory c) { return static_cast<int>(c); }

// Strict weak order: higher urgency first, then category priority, earlier
// t, smaller id, and finally the remaining fields so that ordering never
// depends on input order.
bool more_urgent(const Insight& a, const Insight& b, const ResponseParams& params) {
  double ua = score_urgency(a, params);
  double ub = score_urgency(b, params);
  if (ua != ub) return ua > ub;
  int ra = priority_rank(a.category);
  int rb = priority_rank(b.category);
  if (ra != rb) return ra < rb;
  if (a.t != b.t) return a.t < b.t;
  if (a.id != b.id) return a.id < b.id;
  if (a.description != b.description) return a.description < b.description;
  return a.magnitude < b.magnitude;
}

}  // namespace

double score_urgency(const Insight& insight, const ResponseParams& params) {
  return weight_of(insight.category, params) + std::min(insight.magnitude, 1.0);
}

std::pair<Insight, std::vector<Insight>> select_top(const std::vector<Insight>& insights,
                                                    const ResponseParams& params) {
  if (insights.empty()) {
    throw Error(ErrorCode::EmptyInsightSet, "at least one insight required");
  }
  std::vector<Insight> sorted = insights;
  std::sort(sorted.begin(), sorted.end(),
            [&](const Insight& a, const Insight& b) { return more_urgent(a, b, params); });
  Insight top = sorted.front();
  sorted.erase(sorted.begin());
  return {top, sorted};
}

const std::vector<CandidateResponse>& enumerate_candidates(const Insight& top,
                                                           const ResponseParams& params) {
  auto it = params.catalog.find(top.category);
  if (it == params.catalog.end() || it->second.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("response catalog has no candidates for ") +
                    to_string(top.category));
  }
  return it->second;
}

double score_response(const CandidateResponse& candidate, const Insight& top,
                      const ResponseParams& params) {
  double need = weight_of(top.category, params) / 3.0 + std::min(top.magnitude, 1.0);
  return candidate.risk_reduction * std::min(1.0, need) - 0.5 * candidate.intrusiveness;
}

FinalResponse generate_response(const std::vector<Insight>& insights,
                                const ResponseParams& params) {
  auto [top, secondary] = select_top(insights, params);

  const auto& candidates = enumerate_candidates(top, params);
  const CandidateResponse* best = &candidates.front();
  double best_score = score_response(*best, top, params);
  for (const CandidateResponse& candidate : candidates) {
    double score = score_response(candidate, top, params);
    if (score > best_score) {  // strict: ties keep catalog order
      best = &candidate;
      best_score = score;
    }
  }

  FinalResponse r;
  r.top_insight = top;
  r.chosen_response = *best;
  r.secondary = std::move(secondary);
  return r;
}

}  // namespace driveagent
