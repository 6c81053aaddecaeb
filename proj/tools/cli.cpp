#include "cli.hpp"

#include "aad/attention.hpp"
#include "aad/behavioral.hpp"
#include "aad/config.hpp"
#include "aad/dataset.hpp"
#include "aad/decoding.hpp"
#include "aad/error.hpp"
#include "aad/serialize.hpp"
#include "aad/signal.hpp"
#include "aad/signal_io.hpp"
#include "aad/simulation.hpp"
#include "aad/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <type_traits>

namespace aad::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw InvalidInput("cannot parse " + what + " value '" + text + "'");
  }
  return v;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(parse_real(part, what));
  return values;
}

// Config values for text-valued flags may be given as strings, numbers or
// (nested) arrays; arrays join with ',' and inner arrays with ':'.
std::string json_to_text(const Json& j, char sep = ',') {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) return shortest(j.get<double>());
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_array()) {
    std::string text;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) text += sep;
      text += json_to_text(j[i], ':');
    }
    return text;
  }
  throw ConfigError("unsupported config value " + j.dump());
}

// One subcommand's flags, mirrored as run-config keys (flag name with '-'
// replaced by '_'). Values from --config fill flags absent from the command
// line.
class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& description)
      : app_(parent.add_subcommand(name, description)) {
    app_->add_option("--config", config_path_, "JSON run configuration (\"version\": 1)");
  }

  CLI::App* app() const { return app_; }
  bool parsed() const { return app_->parsed(); }

  template <class T>
  CLI::Option* param(const std::string& flag, T& value, const std::string& description,
                     bool is_path = false) {
    CLI::Option* opt = app_->add_option("--" + flag, value, description);
    if constexpr (!std::is_same_v<T, std::vector<std::string>>) opt->capture_default_str();
    add(flag, opt, value, is_path);
    return opt;
  }

  CLI::Option* flag(const std::string& flag, bool& value, const std::string& description) {
    CLI::Option* opt = app_->add_flag("--" + flag, value, description);
    add(flag, opt, value, false);
    return opt;
  }

  void apply_config() {
    if (config_path_.empty()) return;
    std::vector<std::string> allowed;
    for (const auto& p : params_) allowed.push_back(p.key);
    const Json config = load_run_config(config_path_, allowed);
    for (const auto& p : params_) {
      if (!config.contains(p.key) || p.option->count() > 0) continue;
      try {
        p.load(config.at(p.key));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config key '" + p.key + "': " + e.what());
      }
    }
  }

  // Every non-path parameter after merging, for the manifest.
  Json effective() const {
    Json j = Json::object();
    j["version"] = kConfigVersion;
    for (const auto& p : params_) {
      if (!p.is_path) j[p.key] = p.save();
    }
    return j;
  }

  void require(const std::string& flag, bool present) const {
    if (!present) throw UsageError(app_->get_name() + ": --" + flag + " is required");
  }

 private:
  struct Param {
    std::string key;
    CLI::Option* option;
    bool is_path;
    std::function<void(const Json&)> load;
    std::function<Json()> save;
  };

  template <class T>
  void add(const std::string& flag, CLI::Option* opt, T& value, bool is_path) {
    std::string key = flag;
    std::replace(key.begin(), key.end(), '-', '_');
    Param p{key, opt, is_path, nullptr, nullptr};
    p.load = [&value](const Json& j) {
      if constexpr (std::is_same_v<T, std::string>) {
        value = json_to_text(j);
      } else {
        value = j.get<T>();
      }
    };
    p.save = [&value]() { return Json(value); };
    params_.push_back(std::move(p));
  }

  CLI::App* app_;
  std::string config_path_;
  std::vector<Param> params_;
};

std::vector<double> resolve_grid(const std::string& grid) {
  if (grid == "default") return default_lambda_grid();
  return parse_reals(grid, "--grid");
}

FinalFit parse_final_fit(const std::string& text) {
  if (text == "joint") return FinalFit::Joint;
  if (text == "average") return FinalFit::AveragePrelims;
  throw InvalidInput("--final-fit must be 'joint' or 'average', got '" + text + "'");
}

// Hashes of every regular file below `dir`, keyed by `prefix` + relative path.
void hash_tree(const fs::path& dir, const std::string& prefix, FileHashes& into) {
  if (!fs::is_directory(dir)) return;
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    into[prefix + fs::relative(f, dir).generic_string()] = file_hash(f);
  }
}

void hash_files(const fs::path& dir, const std::vector<std::string>& names, FileHashes& into,
                const std::string& prefix = "") {
  for (const auto& name : names) into[prefix + name] = file_hash(dir / name);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

void write_manifest(const fs::path& out_dir, std::string_view subcommand, const Json& config,
                    std::optional<std::uint64_t> seed, const FileHashes& inputs,
                    const FileHashes& outputs) {
  write_json(out_dir / "manifest.json", make_manifest(subcommand, config, seed, inputs, outputs));
}

// ---------------------------------------------------------------- outputs

std::string results_jsonl(const std::vector<AttentionResult>& results) {
  std::string text;
  for (const auto& r : results) {
    text += attention_result_to_json(r).dump();
    text += '\n';
  }
  return text;
}

void print_accuracy_table(std::ostream& out, const AccuracySummary& summary) {
  char line[128];
  std::snprintf(line, sizeof(line), "%-16s %6s %8s %9s\n", "condition", "trials", "correct",
                "accuracy");
  out << line;
  const auto row = [&](const std::string& name, std::size_t n, std::size_t k, double acc) {
    std::snprintf(line, sizeof(line), "%-16s %6zu %8zu %9.3f\n", name.c_str(), n, k, acc);
    out << line;
  };
  for (const auto& [key, values] : summary.breakdown) {
    for (const auto& [value, acc] : values) row(key + "=" + value, acc.n_trials, acc.n_correct, acc.accuracy);
  }
  row("all", summary.n_trials, summary.n_correct, summary.accuracy);
  std::snprintf(line, sizeof(line), "wilson 95%%: [%.3f, %.3f]\n", summary.interval.low,
                summary.interval.high);
  out << line;
}

struct TrainOutput {
  CrossValidationReport cv;
  Decoder decoder;
};

TrainOutput train_corpus(const TrainingCorpus& corpus, const LagSpec& lags,
                         const std::vector<double>& grid, FinalFit fit) {
  TrainOutput t;
  t.cv = select_lambda(corpus, lags, grid);
  t.decoder = fit_final_decoder(corpus, lags, t.cv.selected_lambda, fit);
  return t;
}

std::vector<std::string> write_training_outputs(const fs::path& dir, const TrainOutput& t) {
  write_json(dir / "decoder.json", decoder_to_json(t.decoder));
  write_json(dir / "cv_report.json", cv_report_to_json(t.cv));
  return {"decoder.json", "cv_report.json"};
}

AccuracySummary decode_trials(const Decoder& decoder, const std::vector<CocktailTrial>& trials,
                              std::vector<AttentionResult>& results) {
  results.resize(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) results[i] = detect_attention(decoder, trials[i]);
  return detection_accuracy(results);
}

std::vector<std::string> write_decode_outputs(const fs::path& dir,
                                              const std::vector<AttentionResult>& results,
                                              const AccuracySummary& summary) {
  write_text(dir / "results.jsonl", results_jsonl(results));
  write_json(dir / "summary.json", accuracy_summary_to_json(summary));
  return {"results.jsonl", "summary.json"};
}

// ------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::vector<std::string> inputs;
  std::string kind = "eeg";
  double rate = kWorkingRate;
  double low_hz = kDefaultBandLowHz;
  double high_hz = kDefaultBandHighHz;
  std::string out = ".";
};

void setup(Command& c, PreprocessArgs& a) {
  c.param("input", a.inputs, "signal files (.csv or binary)", true);
  c.param("kind", a.kind, "'eeg' (band-pass each channel) or 'stimulus' (envelope)");
  c.param("rate", a.rate, "output sample rate in Hz");
  c.param("low-hz", a.low_hz, "pass-band lower edge in Hz");
  c.param("high-hz", a.high_hz, "pass-band upper edge in Hz");
  c.param("out", a.out, "output directory", true);
}

int run_preprocess(const Command& c, const PreprocessArgs& a, std::ostream& out, std::ostream& err) {
  c.require("input", !a.inputs.empty());
  if (a.kind != "eeg" && a.kind != "stimulus") {
    throw InvalidInput("--kind must be 'eeg' or 'stimulus', got '" + a.kind + "'");
  }
  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  const BandSpec band{a.low_hz, a.high_hz};
  FileHashes inputs, outputs;
  std::set<std::string> names;
  for (const auto& input : a.inputs) {
    const fs::path path = input;
    const std::string name = path.filename().string();
    if (!names.insert(name).second) throw InvalidInput("duplicate input file name '" + name + "'");
    inputs[name] = file_hash(path);
    if (a.kind == "stimulus") {
      const Envelope env = preprocess_stimulus(io::read_signal(path), band, a.rate);
      if (env.degenerate) err << "warning: " << name << ": constant envelope\n";
      io::write_signal(out_dir / name, env.signal);
    } else {
      const PreprocessedRecording pre = preprocess_recording(io::read_recording(path), band, a.rate);
      if (!pre.degenerate_channels.empty()) {
        err << "warning: " << name << ": " << pre.degenerate_channels.size()
            << " constant channel(s)\n";
      }
      io::write_recording(out_dir / name, pre.recording);
    }
    outputs[name] = file_hash(out_dir / name);
    out << "wrote " << (out_dir / name).string() << '\n';
  }
  write_manifest(out_dir, "preprocess", c.effective(), std::nullopt, inputs, outputs);
  return kOk;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string corpus;
  std::string grid = "default";
  double tau_min_ms = 0.0;
  double tau_max_ms = 250.0;
  double rate = 0.0;
  std::string final_fit = "joint";
  std::string out = ".";
};

void setup(Command& c, TrainArgs& a) {
  c.param("corpus", a.corpus, "training corpus directory", true);
  c.param("grid", a.grid, "'default' or comma-separated λ values");
  c.param("tau-min-ms", a.tau_min_ms, "first lag in ms");
  c.param("tau-max-ms", a.tau_max_ms, "last lag in ms");
  c.param("rate", a.rate, "expected corpus sample rate in Hz (0: accept any)");
  c.param("final-fit", a.final_fit, "'joint' or 'average'");
  c.param("out", a.out, "output directory", true);
}

int run_train(const Command& c, const TrainArgs& a, std::ostream& out) {
  c.require("corpus", !a.corpus.empty());
  const std::vector<double> grid = resolve_grid(a.grid);
  const FinalFit fit = parse_final_fit(a.final_fit);
  const TrainingCorpus corpus = io::read_training_corpus(a.corpus);
  const double rate = corpus.trials.front().recording.rate;
  if (a.rate > 0.0 && a.rate != rate) {
    throw InvalidInput("corpus rate " + shortest(rate) + " Hz differs from --rate " + shortest(a.rate));
  }
  const TrainOutput t = train_corpus(corpus, LagSpec::from_ms(a.tau_min_ms, a.tau_max_ms, rate), grid, fit);

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  FileHashes inputs, outputs;
  hash_tree(a.corpus, "corpus/", inputs);
  hash_files(out_dir, write_training_outputs(out_dir, t), outputs);
  write_manifest(out_dir, "train", c.effective(), std::nullopt, inputs, outputs);
  out << "selected lambda " << shortest(t.cv.selected_lambda) << " (mean r "
      << shortest(t.cv.mean_r[t.cv.selected_index]) << ")\n";
  return kOk;
}

// ----------------------------------------------------------------- decode

struct DecodeArgs {
  std::string decoder;
  std::string trials;
  std::string out = ".";
};

void setup(Command& c, DecodeArgs& a) {
  c.param("decoder", a.decoder, "decoder.json from train", true);
  c.param("trials", a.trials, "trial directory", true);
  c.param("out", a.out, "output directory", true);
}

int run_decode(const Command& c, const DecodeArgs& a, std::ostream& out) {
  c.require("decoder", !a.decoder.empty());
  c.require("trials", !a.trials.empty());
  const Decoder decoder = decoder_from_json(read_json(a.decoder));
  const std::vector<CocktailTrial> trials = io::read_trials(a.trials);
  std::vector<AttentionResult> results;
  const AccuracySummary summary = decode_trials(decoder, trials, results);

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  FileHashes inputs, outputs;
  inputs["decoder.json"] = file_hash(a.decoder);
  hash_tree(a.trials, "trials/", inputs);
  hash_files(out_dir, write_decode_outputs(out_dir, results, summary), outputs);
  write_manifest(out_dir, "decode", c.effective(), std::nullopt, inputs, outputs);
  print_accuracy_table(out, summary);
  return kOk;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
  std::uint64_t seed = 1;
  Eigen::Index channels = 64;
  double duration_s = 30.0;
  double rate = kWorkingRate;
  std::string snr_db = "20";
  double leakage = 0.2;
  std::size_t train_trials = 20;
  std::size_t test_trials = 18;
  double trf_length_ms = 250.0;
  double tau_min_ms = 0.0;
  double tau_max_ms = 250.0;
  std::string grid = "default";
  std::string final_fit = "joint";
  std::string format = "bin";
  bool data_only = false;
  std::string out = ".";
};

void setup(Command& c, SimulateArgs& a) {
  c.param("seed", a.seed, "base seed");
  c.param("channels", a.channels, "EEG channels");
  c.param("duration-s", a.duration_s, "trial length in seconds");
  c.param("rate", a.rate, "sample rate in Hz");
  c.param("snr-db", a.snr_db, "signal-to-noise ratio in dB ('inf', '-inf' allowed; use --snr-db=-inf)");
  c.param("leakage", a.leakage, "gain of the unattended streams");
  c.param("train-trials", a.train_trials, "single-talker training trials");
  c.param("test-trials", a.test_trials, "three-talker test trials");
  c.param("trf-length-ms", a.trf_length_ms, "forward kernel length in ms");
  c.param("tau-min-ms", a.tau_min_ms, "first decoder lag in ms");
  c.param("tau-max-ms", a.tau_max_ms, "last decoder lag in ms");
  c.param("grid", a.grid, "'default' or comma-separated λ values");
  c.param("final-fit", a.final_fit, "'joint' or 'average'");
  c.param("format", a.format, "signal file format: 'bin' or 'csv'");
  c.flag("data-only", a.data_only, "write the data sets only; skip training and decoding");
  c.param("out", a.out, "output directory", true);
}

int run_simulate(const Command& c, const SimulateArgs& a, std::ostream& out) {
  sim::SimulationConfig cfg;
  cfg.seed = a.seed;
  cfg.channels = a.channels;
  cfg.duration_s = a.duration_s;
  cfg.rate = a.rate;
  cfg.snr_db = parse_real(a.snr_db, "--snr-db");
  cfg.leakage = a.leakage;
  cfg.n_training_trials = a.train_trials;
  cfg.n_test_trials = a.test_trials;
  cfg.trf_length_ms = a.trf_length_ms;
  cfg.tau_min_ms = a.tau_min_ms;
  cfg.tau_max_ms = a.tau_max_ms;
  cfg.lambda_grid = resolve_grid(a.grid);
  cfg.final_fit = parse_final_fit(a.final_fit);
  cfg.validate();

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  FileHashes outputs;
  write_json(out_dir / "config.json", simulation_config_to_json(cfg));
  outputs["config.json"] = file_hash(out_dir / "config.json");

  const sim::ForwardTRF trf = sim::make_trf(cfg);
  const TrainingCorpus corpus = sim::generate_training_corpus(cfg, trf);
  hash_files(out_dir / "train", io::write_training_corpus(out_dir / "train", corpus, a.format),
             outputs, "train/");
  const std::vector<CocktailTrial> trials = sim::generate_test_trials(cfg, trf);
  hash_files(out_dir / "test", io::write_trials(out_dir / "test", trials, a.format), outputs,
             "test/");

  if (!a.data_only) {
    const TrainOutput t = train_corpus(corpus, cfg.lags(), cfg.lambda_grid, cfg.final_fit);
    hash_files(out_dir, write_training_outputs(out_dir, t), outputs);
    std::vector<AttentionResult> results;
    const AccuracySummary summary = decode_trials(t.decoder, trials, results);
    hash_files(out_dir, write_decode_outputs(out_dir, results, summary), outputs);
    out << "selected lambda " << shortest(t.cv.selected_lambda) << '\n';
    print_accuracy_table(out, summary);
  } else {
    out << "wrote " << corpus.size() << " training and " << trials.size() << " test trials to "
        << out_dir.string() << '\n';
  }
  write_manifest(out_dir, "simulate", c.effective(), cfg.seed, {}, outputs);
  return kOk;
}

// ------------------------------------------------------------- behavioral

struct GenArgs {
  std::uint64_t seed = 1;
  std::string levels = "75,65,55";
  double tmr_db = 10.0;
  std::size_t reps = 10;
  std::string layouts = "default";
  std::string out = ".";
};

void setup(Command& c, GenArgs& a) {
  c.param("seed", a.seed, "shuffle and sentence seed");
  c.param("levels", a.levels, "comma-separated target levels in dB SPL, one session each");
  c.param("tmr-db", a.tmr_db, "target-to-masker ratio in dB");
  c.param("reps", a.reps, "trials per layout in each session");
  c.param("layouts", a.layouts,
          "'default' or comma-separated target:masker1:masker2 azimuths, e.g. 0:-90:90");
  c.param("out", a.out, "output directory", true);
}

std::vector<behavioral::SpeakerLayout> parse_layouts(const std::string& text) {
  if (text == "default") return behavioral::default_layouts();
  std::vector<behavioral::SpeakerLayout> layouts;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3) throw InvalidInput("layout '" + item + "' needs target:masker1:masker2");
    std::array<int, 3> az{};
    for (std::size_t i = 0; i < 3; ++i) {
      const double v = parse_real(parts[i], "--layouts");
      if (v != std::round(v)) throw InvalidInput("azimuth '" + parts[i] + "' is not an integer");
      az[i] = static_cast<int>(v);
    }
    behavioral::SpeakerLayout layout{az[0], {az[1], az[2]}};
    layout.validate();
    layouts.push_back(layout);
  }
  return layouts;
}

int run_behavioral_gen(const Command& c, const GenArgs& a, std::ostream& out) {
  const auto levels = behavioral::levels_for(parse_reals(a.levels, "--levels"), a.tmr_db);
  const auto layouts = parse_layouts(a.layouts);
  behavioral::Rng rng(a.seed);
  const auto sessions = behavioral::build_sessions(levels, layouts, a.reps, rng);

  Json j{{"version", kConfigVersion}, {"sessions", Json::array()}};
  for (const auto& s : sessions) j["sessions"].push_back(session_plan_to_json(s));
  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  write_json(out_dir / "sessions.json", j);
  FileHashes outputs;
  hash_files(out_dir, {"sessions.json"}, outputs);
  write_manifest(out_dir, "behavioral gen", c.effective(), a.seed, {}, outputs);
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.trials.size();
  out << sessions.size() << " sessions, " << n << " trials\n";
  return kOk;
}

struct ScoreArgs {
  std::string plan;
  std::string responses;
  std::string out = ".";
};

void setup(Command& c, ScoreArgs& a) {
  c.param("plan", a.plan, "sessions.json from 'behavioral gen'", true);
  c.param("responses", a.responses, "responses JSON", true);
  c.param("out", a.out, "output directory", true);
}

// Responses: {"version": 1, "responses": [{"session_id", "trial", "response"}, ...]}
// where "response" is the five chosen words.
int run_behavioral_score(const Command& c, const ScoreArgs& a, std::ostream& out) {
  c.require("plan", !a.plan.empty());
  c.require("responses", !a.responses.empty());
  const Json plan_json = read_json(a.plan);
  const Json resp_json = read_json(a.responses);
  std::map<int, behavioral::SessionPlan> sessions;
  std::map<int, std::vector<std::optional<behavioral::MatrixSentence>>> answers;
  try {
    for (const auto& s : plan_json.at("sessions")) {
      auto plan = session_plan_from_json(s);
      const int id = plan.session_id;
      answers[id].resize(plan.trials.size());
      if (!sessions.emplace(id, std::move(plan)).second) {
        throw InvalidInput("duplicate session id " + std::to_string(id));
      }
    }
    if (resp_json.at("version") != kConfigVersion) throw ConfigError("responses need \"version\": 1");
    for (const auto& r : resp_json.at("responses")) {
      const int id = r.at("session_id").get<int>();
      const auto trial = r.at("trial").get<std::size_t>();
      const auto it = answers.find(id);
      if (it == answers.end() || trial >= it->second.size()) {
        throw InvalidInput("response for unknown trial " + std::to_string(id) + "/" +
                           std::to_string(trial));
      }
      if (it->second[trial]) {
        throw InvalidInput("two responses for trial " + std::to_string(id) + "/" + std::to_string(trial));
      }
      it->second[trial] = behavioral::parse_sentence(r.at("response").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("behavioral score: ") + e.what());
  }

  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  FileHashes inputs, outputs;
  inputs["plan.json"] = file_hash(a.plan);
  inputs["responses.json"] = file_hash(a.responses);

  Json report{{"sessions", Json::array()}};
  for (const auto& [id, plan] : sessions) {
    Json trials = Json::array();
    std::string csv = "fraction\n";
    double total = 0.0;
    std::size_t scored = 0;
    for (std::size_t i = 0; i < plan.trials.size(); ++i) {
      const auto& answer = answers[id][i];
      if (!answer) continue;
      const auto score = behavioral::score_response(plan.trials[i], *answer);
      trials.push_back(Json{{"trial", i},
                            {"layout_index", plan.trials[i].layout_index},
                            {"response", answer->render()},
                            {"correct", score.correct},
                            {"fraction", score.fraction}});
      csv += shortest(score.fraction) + "\n";
      total += score.fraction;
      ++scored;
    }
    const std::string csv_name = "session_" + std::to_string(id) + ".csv";
    write_text(out_dir / csv_name, csv);
    outputs[csv_name] = file_hash(out_dir / csv_name);
    const double mean = scored ? total / static_cast<double>(scored) : 0.0;
    report["sessions"].push_back(Json{{"session_id", id},
                                      {"scored", scored},
                                      {"unanswered", plan.trials.size() - scored},
                                      {"mean_fraction", mean},
                                      {"trials", trials}});
    char line[96];
    std::snprintf(line, sizeof(line), "session %d: %zu scored, mean %.3f\n", id, scored, mean);
    out << line;
  }
  write_json(out_dir / "scores.json", report);
  outputs["scores.json"] = file_hash(out_dir / "scores.json");
  write_manifest(out_dir, "behavioral score", c.effective(), std::nullopt, inputs, outputs);
  return kOk;
}

// ------------------------------------------------------------------ stats

struct AnovaArgs {
  std::vector<std::string> groups;
  std::string pairwise = "pooled";
  std::string out = ".";
};

void setup(Command& c, AnovaArgs& a) {
  c.param("groups", a.groups, "one CSV file per group, one value per line", true);
  c.param("pairwise", a.pairwise, "pairwise variance: 'pooled' or 'msw'");
  c.param("out", a.out, "output directory", true);
}

// One value per line; blank lines, '#' comments and a single leading header
// line are skipped.
stats::Group read_group(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  stats::Group values;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw FormatError(path.filename().string() + ":" + std::to_string(line_no) +
                        ": not a number: '" + text + "'");
    }
    header_allowed = false;
    values.push_back(v);
  }
  return values;
}

int run_stats_anova(const Command& c, const AnovaArgs& a, std::ostream& out) {
  c.require("groups", !a.groups.empty());
  stats::PairwiseVariance variance;
  if (a.pairwise == "pooled") {
    variance = stats::PairwiseVariance::Pooled;
  } else if (a.pairwise == "msw") {
    variance = stats::PairwiseVariance::AnovaMsw;
  } else {
    throw InvalidInput("--pairwise must be 'pooled' or 'msw', got '" + a.pairwise + "'");
  }
  std::vector<stats::Group> groups;
  FileHashes inputs;
  Json group_info = Json::array();
  for (const auto& g : a.groups) {
    const fs::path path = g;
    groups.push_back(read_group(path));
    inputs[path.filename().string()] = file_hash(path);
    const auto& v = groups.back();
    const double mean = v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    group_info.push_back(Json{{"name", path.stem().string()}, {"n", v.size()}, {"mean", mean}});
  }
  const stats::AnovaResult anova = stats::anova_oneway(groups);
  const auto pairs = stats::pairwise_bonferroni(groups, variance);

  Json report{{"groups", group_info}, {"anova", anova_to_json(anova)},
              {"pairwise_variance", a.pairwise}, {"pairwise", Json::array()}};
  for (const auto& p : pairs) report["pairwise"].push_back(pairwise_to_json(p));
  const fs::path out_dir = a.out;
  fs::create_directories(out_dir);
  write_json(out_dir / "anova.json", report);
  FileHashes outputs;
  hash_files(out_dir, {"anova.json"}, outputs);
  write_manifest(out_dir, "stats anova", c.effective(), std::nullopt, inputs, outputs);

  out << stats::format_anova(anova) << '\n';
  for (const auto& p : pairs) {
    char line[128];
    std::snprintf(line, sizeof(line), "  %s vs %s: t=%.3f, p=%.4g, adjusted p=%.4g\n",
                  group_info[p.group_a]["name"].get<std::string>().c_str(),
                  group_info[p.group_b]["name"].get<std::string>().c_str(), p.t_stat, p.p_raw,
                  p.p_adjusted);
    out << line;
  }
  return kOk;
}

// ----------------------------------------------------------------- errors

const CLI::App* deepest_parsed(const CLI::App* app) {
  for (const CLI::App* sub : app->get_subcommands()) return deepest_parsed(sub);
  return app;
}

std::string suggestion(const CLI::App& app) {
  const CLI::App* at = deepest_parsed(&app);
  const auto extras = at->remaining();
  if (extras.empty()) return {};
  const std::string& bad = extras.front();
  std::vector<std::string> candidates;
  if (bad.rfind("--", 0) == 0) {
    for (const CLI::Option* opt : at->get_options()) {
      for (const auto& name : opt->get_lnames()) candidates.push_back("--" + name);
    }
  } else {
    for (const CLI::App* sub : at->get_subcommands([](const CLI::App*) { return true; })) {
      candidates.push_back(sub->get_name());
    }
  }
  std::string best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (const auto& cand : candidates) {
    const std::size_t d = levenshtein(bad, cand);
    if (d < best_d) {
      best_d = d;
      best = cand;
    }
  }
  if (best.empty() || best_d > std::max<std::size_t>(2, bad.size() / 3)) return {};
  return best;
}

}  // namespace

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Auditory attention decoding from EEG", "aad"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  PreprocessArgs pre;
  TrainArgs train;
  DecodeArgs decode;
  SimulateArgs simulate;
  GenArgs gen;
  ScoreArgs score;
  AnovaArgs anova;

  Command c_pre(app, "preprocess", "Band-pass EEG or extract stimulus envelopes");
  setup(c_pre, pre);
  Command c_train(app, "train", "Fit a decoder with leave-one-out λ selection");
  setup(c_train, train);
  Command c_decode(app, "decode", "Classify the attended talker in each trial");
  setup(c_decode, decode);
  Command c_sim(app, "simulate", "Generate synthetic data and run the pipeline on it");
  setup(c_sim, simulate);

  CLI::App* behavioral = app.add_subcommand("behavioral", "Matrix-sentence listening protocol");
  behavioral->require_subcommand(1);
  Command c_gen(*behavioral, "gen", "Generate session plans");
  setup(c_gen, gen);
  Command c_score(*behavioral, "score", "Score responses against a session plan");
  setup(c_score, score);

  CLI::App* stats_cmd = app.add_subcommand("stats", "Statistics");
  stats_cmd->require_subcommand(1);
  Command c_anova(*stats_cmd, "anova", "One-way ANOVA with Bonferroni pairwise tests");
  setup(c_anova, anova);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (const std::string hint = suggestion(app); !hint.empty()) {
      err << "did you mean '" << hint << "'?\n";
    }
    err << "run with --help for usage\n";
    return kUsageError;
  }

  try {
    if (c_pre.parsed()) {
      c_pre.apply_config();
      return run_preprocess(c_pre, pre, out, err);
    }
    if (c_train.parsed()) {
      c_train.apply_config();
      return run_train(c_train, train, out);
    }
    if (c_decode.parsed()) {
      c_decode.apply_config();
      return run_decode(c_decode, decode, out);
    }
    if (c_sim.parsed()) {
      c_sim.apply_config();
      return run_simulate(c_sim, simulate, out);
    }
    if (c_gen.parsed()) {
      c_gen.apply_config();
      return run_behavioral_gen(c_gen, gen, out);
    }
    if (c_score.parsed()) {
      c_score.apply_config();
      return run_behavioral_score(c_score, score, out);
    }
    if (c_anova.parsed()) {
      c_anova.apply_config();
      return run_stats_anova(c_anova, anova, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nrun with --help for usage\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  err << "error: no subcommand\n";
  return kUsageError;
}

}  // namespace aad::cli
