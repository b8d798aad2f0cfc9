// Copyright 2026 The PromptStack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "promptstack/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace promptstack {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyWeights: return "EmptyWeights";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kZeroSum: return "ZeroSum";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kSupportMismatch: return "SupportMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnknownContext: return "UnknownContext";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kSamplerFailure: return "SamplerFailure";
    case ErrorCode::kAllInfiniteDivergence: return "AllInfiniteDivergence";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kAuthMissing: return "AuthMissing";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kHttpError: return "HttpError";
    case ErrorCode::kRetriesExhausted: return "RetriesExhausted";
    case ErrorCode::kUnclassifiedRateExceeded: return "UnclassifiedRateExceeded";
    case ErrorCode::kConfigParse: return "ConfigParse";
    case ErrorCode::kValidation: return "Validation";
  }
  return "UnknownError";
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw Error(ErrorCode::kInvalidDistribution, "empty probability vector");
  }
  double sum = 0.0;
  for (size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= 0.0)) {  // also rejects NaN
      throw Error(ErrorCode::kInvalidDistribution,
                  "negative or non-finite entry at index " + std::to_string(i),
                  static_cast<long>(i));
    }
    sum += probs_[i];
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    throw Error(ErrorCode::kInvalidDistribution,
                "entries sum to " + std::to_string(sum) + ", expected 1");
  }
}

Distribution Distribution::FromWeights(std::span<const double> weights) {
  if (weights.empty()) {
    throw Error(ErrorCode::kEmptyWeights, "weight vector is empty");
  }
  double sum = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw Error(ErrorCode::kNegativeWeight,
                  "weight at index " + std::to_string(i) + " is negative",
                  static_cast<long>(i));
    }
    sum += weights[i];
  }
  if (sum <= 0.0) {
    throw Error(ErrorCode::kZeroSum, "weights sum to zero");
  }
  std::vector<double> probs(weights.size());
  for (size_t i = 0; i < weights.size(); ++i) probs[i] = weights[i] / sum;
  return Distribution(std::move(probs));
}

Distribution Distribution::PointMass(int support_size, int index) {
  if (support_size < 1 || index < 0 || index >= support_size) {
    throw Error(ErrorCode::kInvalidDistribution,
                "point mass index " + std::to_string(index) +
                    " out of range for support " + std::to_string(support_size));
  }
  std::vector<double> probs(static_cast<size_t>(support_size), 0.0);
  probs[static_cast<size_t>(index)] = 1.0;
  return Distribution(std::move(probs));
}

Distribution Distribution::Uniform(int support_size) {
  if (support_size < 1) {
    throw Error(ErrorCode::kInvalidDistribution, "support size must be >= 1");
  }
  return Distribution(std::vector<double>(static_cast<size_t>(support_size),
                                          1.0 / support_size));
}

bool Distribution::ApproxEquals(const Distribution& other,
                                double tolerance) const {
  if (support_size() != other.support_size()) return false;
  for (int i = 0; i < support_size(); ++i) {
    if (std::abs(probs_[static_cast<size_t>(i)] -
                 other.probs_[static_cast<size_t>(i)]) > tolerance) {
      return false;
    }
  }
  return true;
}

double KlDivergence(const Distribution& p, const Distribution& q) {
  if (p.support_size() != q.support_size()) {
    throw Error(ErrorCode::kSupportMismatch,
                "supports differ: " + std::to_string(p.support_size()) +
                    " vs " + std::to_string(q.support_size()));
  }
  double sum = 0.0;
  for (int i = 0; i < p.support_size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

double TotalVariation(const Distribution& p, const Distribution& q) {
  if (p.support_size() != q.support_size()) {
    throw Error(ErrorCode::kSupportMismatch,
                "supports differ: " + std::to_string(p.support_size()) +
                    " vs " + std::to_string(q.support_size()));
  }
  double sum = 0.0;
  for (int i = 0; i < p.support_size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

const char* SpaceKindName(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kSenderPrompt: return "sender_prompt";
    case SpaceKind::kReceiverPrompt: return "receiver_prompt";
    case SpaceKind::kMessage: return "message";
    case SpaceKind::kDecision: return "decision";
    case SpaceKind::kSenderInfo: return "sender_info";
    case SpaceKind::kReceiverInfo: return "receiver_info";
  }
  return "unknown";
}

LabeledSpace::LabeledSpace(SpaceKind kind, std::vector<std::string> labels)
    : kind_(kind), labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw Error(ErrorCode::kValidation,
                std::string(SpaceKindName(kind_)) + " space must be non-empty");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& label : labels_) {
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::kValidation,
                  std::string(SpaceKindName(kind_)) + " label duplicated: " + label);
    }
  }
}

const std::string& LabeledSpace::label(int id) const {
  if (!Contains(id)) {
    throw Error(ErrorCode::kUnknownContext,
                std::string(SpaceKindName(kind_)) + " id " + std::to_string(id) +
                    " out of range [0, " + std::to_string(size()) + ")");
  }
  return labels_[static_cast<size_t>(id)];
}

SpaceIndex LabeledSpace::at(int id) const { return {kind_, id, label(id)}; }

std::optional<int> LabeledSpace::Find(std::string_view label) const {
  for (int i = 0; i < size(); ++i) {
    if (labels_[static_cast<size_t>(i)] == label) return i;
  }
  return std::nullopt;
}

UtilityTable::UtilityTable(int num_messages, int num_decisions, double fill)
    : num_messages_(num_messages),
      num_decisions_(num_decisions),
      values_(static_cast<size_t>(num_messages) * num_decisions, fill) {
  if (num_messages < 1 || num_decisions < 1) {
    throw Error(ErrorCode::kValidation, "utility table dimensions must be >= 1");
  }
  if (!std::isfinite(fill)) {
    throw Error(ErrorCode::kValidation, "utility fill value must be finite");
  }
}

UtilityTable UtilityTable::FromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows[0].empty()) {
    throw Error(ErrorCode::kValidation, "utility table must be non-empty");
  }
  UtilityTable table(static_cast<int>(rows.size()),
                     static_cast<int>(rows[0].size()));
  for (size_t m = 0; m < rows.size(); ++m) {
    if (rows[m].size() != rows[0].size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "ragged utility row at message " + std::to_string(m));
    }
    for (size_t d = 0; d < rows[m].size(); ++d) {
      table.Set(static_cast<int>(m), static_cast<int>(d), rows[m][d]);
    }
  }
  return table;
}

double UtilityTable::operator()(int message, int decision) const {
  if (message < 0 || message >= num_messages_ || decision < 0 ||
      decision >= num_decisions_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "utility index (" + std::to_string(message) + ", " +
                    std::to_string(decision) + ") out of range");
  }
  return values_[static_cast<size_t>(message) * num_decisions_ + decision];
}

void UtilityTable::Set(int message, int decision, double value) {
  if (message < 0 || message >= num_messages_ || decision < 0 ||
      decision >= num_decisions_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "utility index (" + std::to_string(message) + ", " +
                    std::to_string(decision) + ") out of range");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kValidation, "utility entries must be finite");
  }
  values_[static_cast<size_t>(message) * num_decisions_ + decision] = value;
}

double ExpectedUtility(const Distribution& message_dist,
                       std::span<const Distribution> response,
                       const UtilityTable& utility) {
  if (message_dist.support_size() != utility.num_messages() ||
      static_cast<int>(response.size()) != utility.num_messages()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "message dimension mismatch between distribution, response "
                "profile, and utility table");
  }
  double total = 0.0;
  for (int m = 0; m < utility.num_messages(); ++m) {
    const Distribution& decisions = response[static_cast<size_t>(m)];
    if (decisions.support_size() != utility.num_decisions()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "decision dimension mismatch at message " + std::to_string(m));
    }
    double inner = 0.0;
    for (int d = 0; d < utility.num_decisions(); ++d) {
      inner += decisions[d] * utility(m, d);
    }
    total += message_dist[m] * inner;
  }
  return total;
}

}  // namespace promptstack
