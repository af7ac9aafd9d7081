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

// Stage 4: urgency scoring of accumulated insights, top-issue selection and
// utility-ranked maneuver choice from a fixed candidate catalog.

#ifndef DRIVEAGENT_RESPONSE_HPP
#define DRIVEAGENT_RESPONSE_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace driveagent {

enum class InsightCategory { Safety, Maintenance, Efficiency, Comfort };

const char* to_string(InsightCategory c);
InsightCategory insight_category_from_string(const std::string& s);

/// One analysis finding awaiting prioritization. magnitude is a nonnegative
/// physical size (meters or threshold exceedance); anything above 1
/// saturates during scoring.
struct Insight {
  int id{0};
  std::string description;
  InsightCategory category{InsightCategory::Comfort};
  double magnitude{0.0};
  double t{0.0};

  bool operator==(const Insight&) const = default;
};

/// Catalog maneuver. risk_reduction and intrusiveness both live in [0, 1];
/// intrusiveness penalizes disruptive actions during ranking.
struct CandidateResponse {
  int id{0};
  std::string action;
  double risk_reduction{0.0};
  double intrusiveness{0.0};

  bool operator==(const CandidateResponse&) const = default;
};

/// Output tuple: top insight, chosen maneuver, and the remaining insights in
/// descending urgency order. top_insight never appears in secondary, and
/// secondary plus top_insight is exactly the input set.
struct FinalResponse {
  Insight top_insight;
  CandidateResponse chosen_response;
  std::vector<Insight> secondary;

  bool operator==(const FinalResponse&) const = default;
};

struct ResponseParams {
  std::map<InsightCategory, double> weights;
  std::map<InsightCategory, std::vector<CandidateResponse>> catalog;
};

/// Built-in table: weights safety=3, maintenance=2, efficiency=1, comfort=0;
/// catalog safety {emergency-brake, slow-down, yield}, maintenance
/// {pull-over-inspect, schedule-service}, efficiency {reroute, adjust-speed},
/// comfort {smooth-acceleration}.
const ResponseParams& default_response_params();

/// Urgency Psi = W(category) + min(magnitude, 1). The clamp keeps any number
/// of low-priority findings from outranking a single safety finding.
double score_urgency(const Insight& insight,
                     const ResponseParams& params = default_response_params());

/// Splits the insights into the single most urgent one and the rest sorted
/// by descending urgency. Ties resolve by category priority (safety first),
/// then earlier t, then smaller id. Throws EmptyInsightSet.
std::pair<Insight, std::vector<Insight>> select_top(
    const std::vector<Insight>& insights,
    const ResponseParams& params = default_response_params());

/// Ordered maneuver candidates for the insight's category. Non-empty for
/// every category.
const std::vector<CandidateResponse>& enumerate_candidates(
    const Insight& top, const ResponseParams& params = default_response_params());

/// Utility: risk_reduction * min(1, W(c)/3 + min(magnitude, 1))
///          - 0.5 * intrusiveness.
double score_response(const CandidateResponse& candidate, const Insight& top,
                      const ResponseParams& params = default_response_params());

/// Composes select_top, enumerate_candidates and the score_response argmax;
/// score ties keep catalog order. Throws EmptyInsightSet.
FinalResponse generate_response(const std::vector<Insight>& insights,
                                const ResponseParams& params = default_response_params());

}  // namespace driveagent

#endif  // DRIVEAGENT_RESPONSE_HPP
