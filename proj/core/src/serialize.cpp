#include "aad/serialize.hpp"

#include "aad/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace aad {
namespace {

template <typename T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("expected a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError("unknown key '" + key + "'");
  }
}

Json real_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double real_from(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError(std::string("'") + key + "' must be a number, \"inf\" or \"-inf\"");
  }
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

Json sentence_to_json(const behavioral::MatrixSentence& s) {
  return Json{{"words", s.words}, {"text", s.render()}};
}

behavioral::MatrixSentence sentence_from_json(const Json& j) {
  behavioral::MatrixSentence s;
  const auto words = get<std::vector<int>>(j, "words");
  if (words.size() != behavioral::kCategoryCount) throw FormatError("sentence needs five word indices");
  for (std::size_t c = 0; c < words.size(); ++c) {
    if (words[c] < 0 || words[c] >= static_cast<int>(behavioral::kWordsPerCategory)) {
      throw FormatError("word index out of range");
    }
    s.words[c] = static_cast<std::uint8_t>(words[c]);
  }
  return s;
}

}  // namespace

Json decoder_to_json(const Decoder& decoder) {
  std::vector<double> row_major;
  row_major.reserve(static_cast<std::size_t>(decoder.weights.size()));
  for (Eigen::Index j = 0; j < decoder.weights.rows(); ++j) {
    for (Eigen::Index c = 0; c < decoder.weights.cols(); ++c) row_major.push_back(decoder.weights(j, c));
  }
  return Json{{"rate", decoder.rate},
              {"lambda", decoder.lambda},
              {"tau_min_ms", decoder.lags.tau_min_ms},
              {"tau_max_ms", decoder.lags.tau_max_ms},
              {"channels", decoder.channels()},
              {"weights", row_major}};
}

Decoder decoder_from_json(const Json& j) {
  Decoder d;
  d.rate = get<double>(j, "rate");
  d.lambda = get<double>(j, "lambda");
  d.lags = LagSpec::from_ms(get<double>(j, "tau_min_ms"), get<double>(j, "tau_max_ms"), d.rate);
  const auto channels = get<Eigen::Index>(j, "channels");
  const auto w = get<std::vector<double>>(j, "weights");
  const Eigen::Index lags = d.lags.count();
  if (channels < 1 || static_cast<Eigen::Index>(w.size()) != lags * channels) {
    throw FormatError("decoder weights hold " + std::to_string(w.size()) + " values, expected " +
                      std::to_string(lags) + " lags x " + std::to_string(channels) + " channels");
  }
  d.weights.resize(lags, channels);
  for (Eigen::Index l = 0; l < lags; ++l) {
    for (Eigen::Index c = 0; c < channels; ++c) d.weights(l, c) = w[static_cast<std::size_t>(l * channels + c)];
  }
  if (!d.weights.allFinite()) throw FormatError("decoder weights must be finite");
  return d;
}

Json cv_report_to_json(const CrossValidationReport& report) {
  return Json{{"grid", report.grid},
              {"mean_r", report.mean_r},
              {"per_trial_r", report.trial_r},
              {"undefined", report.undefined},
              {"selected_lambda", report.selected_lambda},
              {"selected_index", report.selected_index}};
}

CrossValidationReport cv_report_from_json(const Json& j) {
  CrossValidationReport r;
  r.grid = get<std::vector<double>>(j, "grid");
  r.mean_r = get<std::vector<double>>(j, "mean_r");
  r.trial_r = get<std::vector<std::vector<double>>>(j, "per_trial_r");
  r.undefined = get<std::vector<std::vector<bool>>>(j, "undefined");
  r.selected_lambda = get<double>(j, "selected_lambda");
  r.selected_index = get<std::size_t>(j, "selected_index");
  return r;
}

Json metadata_to_json(const TrialMetadata& meta) {
  return Json{{"layout_id", meta.layout_id},
              {"level_id", meta.level_id},
              {"target_gender", meta.target_gender}};
}

TrialMetadata metadata_from_json(const Json& j) {
  TrialMetadata meta;
  meta.layout_id = get<int>(j, "layout_id");
  meta.level_id = get<int>(j, "level_id");
  meta.target_gender = get<std::string>(j, "target_gender");
  return meta;
}

Json attention_result_to_json(const AttentionResult& result) {
  return Json{{"r_values", result.r_values},
              {"undefined", result.undefined},
              {"detected", result.detected},
              {"true_target", result.true_target},
              {"correct", result.correct},
              {"tie", result.tie},
              {"metadata", metadata_to_json(result.metadata)}};
}

AttentionResult attention_result_from_json(const Json& j) {
  AttentionResult r;
  r.r_values = get<std::array<double, kStreamCount>>(j, "r_values");
  r.undefined = get<std::array<bool, kStreamCount>>(j, "undefined");
  r.detected = get<std::size_t>(j, "detected");
  r.true_target = get<std::size_t>(j, "true_target");
  r.correct = get<bool>(j, "correct");
  r.tie = get<bool>(j, "tie");
  r.metadata = metadata_from_json(j.at("metadata"));
  return r;
}

Json accuracy_summary_to_json(const AccuracySummary& summary) {
  Json breakdown = Json::object();
  for (const auto& [key, cells] : summary.breakdown) {
    Json entry = Json::object();
    for (const auto& [value, cell] : cells) {
      entry[value] = Json{{"n_trials", cell.n_trials},
                          {"n_correct", cell.n_correct},
                          {"accuracy", cell.accuracy}};
    }
    breakdown[key] = entry;
  }
  return Json{{"n_trials", summary.n_trials},
              {"n_correct", summary.n_correct},
              {"accuracy", summary.accuracy},
              {"wilson_95", {summary.interval.low, summary.interval.high}},
              {"breakdown", breakdown}};
}

Json simulation_config_to_json(const sim::SimulationConfig& cfg) {
  return Json{{"version", 1},
              {"channels", cfg.channels},
              {"duration_s", cfg.duration_s},
              {"rate", cfg.rate},
              {"snr_db", real_or_string(cfg.snr_db)},
              {"leakage", cfg.leakage},
              {"seed", cfg.seed},
              {"n_training_trials", cfg.n_training_trials},
              {"n_test_trials", cfg.n_test_trials},
              {"trf_length_ms", cfg.trf_length_ms},
              {"tau_min_ms", cfg.tau_min_ms},
              {"tau_max_ms", cfg.tau_max_ms},
              {"lambda_grid", cfg.lambda_grid},
              {"final_fit", cfg.final_fit == FinalFit::Joint ? "joint" : "average"}};
}

sim::SimulationConfig simulation_config_from_json(const Json& j) {
  reject_unknown(j, {"version", "channels", "duration_s", "rate", "snr_db", "leakage", "seed",
                     "n_training_trials", "n_test_trials", "trf_length_ms", "tau_min_ms",
                     "tau_max_ms", "lambda_grid", "final_fit"});
  if (!j.contains("version") || j.at("version") != 1) {
    throw ConfigError("simulation config needs \"version\": 1");
  }
  sim::SimulationConfig cfg;
  try {
    if (j.contains("channels")) cfg.channels = j.at("channels").get<Eigen::Index>();
    if (j.contains("duration_s")) cfg.duration_s = j.at("duration_s").get<double>();
    if (j.contains("rate")) cfg.rate = j.at("rate").get<double>();
    if (j.contains("snr_db")) cfg.snr_db = real_from(j, "snr_db");
    if (j.contains("leakage")) cfg.leakage = j.at("leakage").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_training_trials")) cfg.n_training_trials = j.at("n_training_trials").get<std::size_t>();
    if (j.contains("n_test_trials")) cfg.n_test_trials = j.at("n_test_trials").get<std::size_t>();
    if (j.contains("trf_length_ms")) cfg.trf_length_ms = j.at("trf_length_ms").get<double>();
    if (j.contains("tau_min_ms")) cfg.tau_min_ms = j.at("tau_min_ms").get<double>();
    if (j.contains("tau_max_ms")) cfg.tau_max_ms = j.at("tau_max_ms").get<double>();
    if (j.contains("lambda_grid")) cfg.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
    if (j.contains("final_fit")) {
      const auto fit = j.at("final_fit").get<std::string>();
      if (fit == "joint") {
        cfg.final_fit = FinalFit::Joint;
      } else if (fit == "average") {
        cfg.final_fit = FinalFit::AveragePrelims;
      } else {
        throw ConfigError("final_fit must be \"joint\" or \"average\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("simulation config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

Json session_plan_to_json(const behavioral::SessionPlan& plan) {
  Json trials = Json::array();
  for (const auto& t : plan.trials) {
    Json talkers = Json::array();
    for (const int id : t.talkers) {
      talkers.push_back(Json{{"id", id}, {"gender", std::string(1, behavioral::talker_gender(id))}});
    }
    trials.push_back(Json{{"target", sentence_to_json(t.target)},
                          {"maskers", {sentence_to_json(t.maskers[0]), sentence_to_json(t.maskers[1])}},
                          {"talkers", talkers},
                          {"layout_index", t.layout_index},
                          {"layout", {{"target_azimuth", t.layout.target_azimuth},
                                      {"masker_azimuths", t.layout.masker_azimuths}}}});
  }
  return Json{{"session_id", plan.session_id},
              {"level", {{"target_db_spl", plan.level.target_db_spl},
                         {"masker_db_spl", plan.level.masker_db_spl},
                         {"tmr_db", plan.level.tmr_db()}}},
              {"trials", trials}};
}

behavioral::SessionPlan session_plan_from_json(const Json& j) {
  behavioral::SessionPlan plan;
  plan.session_id = get<int>(j, "session_id");
  const Json& level = j.at("level");
  plan.level.target_db_spl = get<double>(level, "target_db_spl");
  plan.level.masker_db_spl = get<double>(level, "masker_db_spl");
  for (const Json& t : j.at("trials")) {
    behavioral::BehavioralTrial trial;
    trial.target = sentence_from_json(t.at("target"));
    const Json& maskers = t.at("maskers");
    if (maskers.size() != 2) throw FormatError("trial needs two maskers");
    trial.maskers = {sentence_from_json(maskers[0]), sentence_from_json(maskers[1])};
    const Json& talkers = t.at("talkers");
    if (talkers.size() != 3) throw FormatError("trial needs three talkers");
    for (std::size_t i = 0; i < 3; ++i) trial.talkers[i] = get<int>(talkers[i], "id");
    trial.layout_index = get<std::size_t>(t, "layout_index");
    trial.layout.target_azimuth = get<int>(t.at("layout"), "target_azimuth");
    trial.layout.masker_azimuths = get<std::array<int, 2>>(t.at("layout"), "masker_azimuths");
    trial.level = plan.level;
    plan.trials.push_back(trial);
  }
  return plan;
}

Json anova_to_json(const stats::AnovaResult& result) {
  return Json{{"f_stat", result.f_stat},
              {"df_between", result.df_between},
              {"df_within", result.df_within},
              {"p_value", result.p_value},
              {"ms_between", result.ms_between},
              {"ms_within", result.ms_within},
              {"text", stats::format_anova(result)}};
}

Json pairwise_to_json(const stats::PairwiseResult& result) {
  return Json{{"group_a", result.group_a},
              {"group_b", result.group_b},
              {"t_stat", real_or_string(result.t_stat)},
              {"df", result.df},
              {"p_raw", result.p_raw},
              {"p_adjusted", result.p_adjusted}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << dump(j);
  if (!out) throw FormatError("write to '" + path.string() + "' failed");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace aad
