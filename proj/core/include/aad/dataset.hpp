#pragma once

#include "aad/attention.hpp"
#include "aad/decoding.hpp"

#include <filesystem>
#include <string>
#include <vector>

// Directory layouts for training corpora and cocktail-party trial sets.
//
// Training corpus: for each trial id, <id>.eeg.<ext> (recording) and
// <id>.env.<ext> (envelope). Trials are ordered by id.
//
// Trial set: for each trial id, <id>.eeg.<ext>, <id>.target.<ext>,
// <id>.masker1.<ext>, <id>.masker2.<ext> and optionally <id>.meta.json.
//
// <ext> is "bin" or "csv" (see signal_io.hpp).
namespace aad::io {

std::string trial_id(std::size_t index);  // "trial_000", "trial_001", ...

// Returns the names of the files written, in order.
std::vector<std::string> write_training_corpus(const std::filesystem::path& dir,
                                               const TrainingCorpus& corpus,
                                               const std::string& ext = "bin");
TrainingCorpus read_training_corpus(const std::filesystem::path& dir);

std::vector<std::string> write_trials(const std::filesystem::path& dir,
                                      const std::vector<CocktailTrial>& trials,
                                      const std::string& ext = "bin");
std::vector<CocktailTrial> read_trials(const std::filesystem::path& dir);

}  // namespace aad::io
