#include "aad/dataset.hpp"

#include "aad/error.hpp"
#include "aad/serialize.hpp"
#include "aad/signal_io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace aad::io {
namespace fs = std::filesystem;
namespace {

// id -> role -> path, for files named <id>.<role>.<ext>.
std::map<std::string, std::map<std::string, fs::path>> scan(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("'" + dir.string() + "' is not a directory");
  std::map<std::string, std::map<std::string, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const auto first = name.find('.');
    const auto last = name.rfind('.');
    if (first == std::string::npos || first == last) continue;
    files[name.substr(0, first)][name.substr(first + 1, last - first - 1)] = entry.path();
  }
  return files;
}

const fs::path& require(const std::map<std::string, fs::path>& roles, const std::string& id,
                        const std::string& role) {
  const auto it = roles.find(role);
  if (it == roles.end()) throw FormatError("trial '" + id + "' has no ." + role + " file");
  return it->second;
}

void check_ext(const std::string& ext) {
  if (ext != "bin" && ext != "csv") throw InvalidInput("signal format must be 'bin' or 'csv'");
}

}  // namespace

std::string trial_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trial_%03zu", index);
  return buf;
}

std::vector<std::string> write_training_corpus(const fs::path& dir, const TrainingCorpus& corpus,
                                               const std::string& ext) {
  check_ext(ext);
  fs::create_directories(dir);
  std::vector<std::string> written;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const std::string id = trial_id(k);
    const std::string eeg = id + ".eeg." + ext;
    const std::string env = id + ".env." + ext;
    write_recording(dir / eeg, corpus.trials[k].recording);
    write_signal(dir / env, corpus.trials[k].envelope.signal);
    written.push_back(eeg);
    written.push_back(env);
  }
  return written;
}

TrainingCorpus read_training_corpus(const fs::path& dir) {
  TrainingCorpus corpus;
  for (const auto& [id, roles] : scan(dir)) {
    if (!roles.count("eeg") && !roles.count("env")) continue;
    TrainingTrial trial;
    trial.recording = read_recording(require(roles, id, "eeg"));
    trial.envelope = read_envelope(require(roles, id, "env"));
    corpus.trials.push_back(std::move(trial));
  }
  if (corpus.trials.empty()) throw FormatError("no training trials in '" + dir.string() + "'");
  corpus.validate();
  return corpus;
}

std::vector<std::string> write_trials(const fs::path& dir, const std::vector<CocktailTrial>& trials,
                                      const std::string& ext) {
  check_ext(ext);
  fs::create_directories(dir);
  static const char* const kRoles[] = {"target", "masker1", "masker2"};
  std::vector<std::string> written;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const CocktailTrial& trial = trials[i];
    if (trial.true_target != 0) {
      throw InvalidInput("stored trials keep the attended stream first");
    }
    const std::string id = trial_id(i);
    const std::string eeg = id + ".eeg." + ext;
    write_recording(dir / eeg, trial.recording);
    written.push_back(eeg);
    for (std::size_t s = 0; s < kStreamCount; ++s) {
      const std::string name = id + "." + kRoles[s] + "." + ext;
      write_signal(dir / name, trial.candidates[s].signal);
      written.push_back(name);
    }
    const std::string meta = id + ".meta.json";
    write_json(dir / meta, metadata_to_json(trial.metadata));
    written.push_back(meta);
  }
  return written;
}

std::vector<CocktailTrial> read_trials(const fs::path& dir) {
  std::vector<CocktailTrial> trials;
  for (const auto& [id, roles] : scan(dir)) {
    if (!roles.count("eeg")) continue;
    CocktailTrial trial;
    trial.recording = read_recording(require(roles, id, "eeg"));
    trial.candidates[0] = read_envelope(require(roles, id, "target"));
    trial.candidates[1] = read_envelope(require(roles, id, "masker1"));
    trial.candidates[2] = read_envelope(require(roles, id, "masker2"));
    if (const auto it = roles.find("meta"); it != roles.end()) {
      trial.metadata = metadata_from_json(read_json(it->second));
    }
    trial.validate();
    trials.push_back(std::move(trial));
  }
  if (trials.empty()) throw FormatError("no trials in '" + dir.string() + "'");
  return trials;
}

}  // namespace aad::io
