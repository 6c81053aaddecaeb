#pragma once

#include "aad/attention.hpp"
#include "aad/behavioral.hpp"
#include "aad/decoding.hpp"
#include "aad/simulation.hpp"
#include "aad/stats.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

// JSON forms of the library's artifacts. Doubles are written in shortest
// round-trip form, so every artifact reloads to an equal value.
namespace aad {

using Json = nlohmann::ordered_json;

// {rate, lambda, tau_min_ms, tau_max_ms, channels, weights}; weights are
// row-major over (lag, channel).
Json decoder_to_json(const Decoder& decoder);
Decoder decoder_from_json(const Json& j);

Json cv_report_to_json(const CrossValidationReport& report);
CrossValidationReport cv_report_from_json(const Json& j);

Json attention_result_to_json(const AttentionResult& result);
AttentionResult attention_result_from_json(const Json& j);

Json accuracy_summary_to_json(const AccuracySummary& summary);

Json metadata_to_json(const TrialMetadata& meta);
TrialMetadata metadata_from_json(const Json& j);

// Strict: "version" must be 1 and unknown keys are rejected. snr_db may be
// the strings "inf" / "-inf".
Json simulation_config_to_json(const sim::SimulationConfig& cfg);
sim::SimulationConfig simulation_config_from_json(const Json& j);

Json session_plan_to_json(const behavioral::SessionPlan& plan);
behavioral::SessionPlan session_plan_from_json(const Json& j);

Json anova_to_json(const stats::AnovaResult& result);
Json pairwise_to_json(const stats::PairwiseResult& result);

// Pretty-printed with a trailing newline.
std::string dump(const Json& j);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace aad
