#include "aad/behavioral.hpp"

#include "aad/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace aad::behavioral {

std::string MatrixSentence::render() const {
  std::string out;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (words[c] >= kWordsPerCategory) throw InvalidInput("word index out of range");
    if (c) out += ' ';
    out += kMatrixWords[c][words[c]];
  }
  return out;
}

MatrixSentence parse_sentence(std::string_view text) {
  std::istringstream in{std::string(text)};
  MatrixSentence sentence;
  std::string word;
  std::size_t c = 0;
  while (in >> word) {
    if (c == kCategoryCount) throw InvalidInput("sentence has more than five words");
    const auto& row = kMatrixWords[c];
    const auto it = std::find(row.begin(), row.end(), word);
    if (it == row.end()) {
      throw InvalidInput("'" + word + "' is not a " + std::string(kCategoryNames[c]) + " word");
    }
    sentence.words[c] = static_cast<std::uint8_t>(it - row.begin());
    ++c;
  }
  if (c != kCategoryCount) throw InvalidInput("sentence needs five words");
  return sentence;
}

char talker_gender(int talker_id) {
  if (talker_id < 0 || talker_id >= kTalkerCount) throw InvalidInput("talker id out of range");
  return talker_id < kTalkersPerGender ? 'F' : 'M';
}

void SpeakerLayout::validate() const {
  const std::array<int, 3> all = {target_azimuth, masker_azimuths[0], masker_azimuths[1]};
  for (const int a : all) {
    if (std::find(kAzimuths.begin(), kAzimuths.end(), a) == kAzimuths.end()) {
      throw InvalidInput("azimuth " + std::to_string(a) + " is not a speaker position");
    }
  }
  if (all[0] == all[1] || all[0] == all[2] || all[1] == all[2]) {
    throw InvalidInput("speaker layout reuses an azimuth");
  }
}

std::vector<SpeakerLayout> default_layouts() {
  std::vector<SpeakerLayout> layouts;
  for (const int target : kAzimuths) {
    std::vector<int> free;
    for (const int a : kAzimuths) {
      if (a != target) free.push_back(a);
    }
    // free is ascending: front is nearest −90°, back nearest +90°.
    layouts.push_back({target, {free.front(), free.back()}});
  }
  return layouts;
}

std::vector<LevelCondition> levels_for(const std::vector<double>& target_levels_db, double tmr_db) {
  std::vector<LevelCondition> levels;
  for (const double t : target_levels_db) {
    if (!std::isfinite(t)) throw InvalidInput("level must be finite");
    levels.push_back({t, t - tmr_db});
  }
  return levels;
}

std::vector<LevelCondition> ci_levels() { return levels_for({75.0, 65.0, 55.0}, 10.0); }

std::vector<LevelCondition> nh_levels() { return levels_for({75.0, 65.0, 55.0}, 0.0); }

MatrixSentence gen_sentence(Rng& rng) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(kWordsPerCategory) - 1);
  MatrixSentence s;
  for (auto& w : s.words) w = static_cast<std::uint8_t>(pick(rng));
  return s;
}

BehavioralTrial gen_trial(const SpeakerLayout& layout, const LevelCondition& level, Rng& rng) {
  layout.validate();
  BehavioralTrial trial;
  trial.layout = layout;
  trial.level = level;
  trial.target = gen_sentence(rng);

  // Maskers take two distinct words from the seven the target left unused.
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    std::array<std::uint8_t, kWordsPerCategory - 1> rest{};
    std::size_t n = 0;
    for (std::uint8_t w = 0; w < kWordsPerCategory; ++w) {
      if (w != trial.target.words[c]) rest[n++] = w;
    }
    std::uniform_int_distribution<std::size_t> first(0, rest.size() - 1);
    std::swap(rest[0], rest[first(rng)]);
    std::uniform_int_distribution<std::size_t> second(1, rest.size() - 1);
    std::swap(rest[1], rest[second(rng)]);
    trial.maskers[0].words[c] = rest[0];
    trial.maskers[1].words[c] = rest[1];
  }

  std::array<int, kTalkerCount> pool{};
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < trial.talkers.size(); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    trial.talkers[i] = pool[i];
  }
  return trial;
}

SessionPlan build_session(int session_id, const LevelCondition& level,
                          const std::vector<SpeakerLayout>& layouts, std::size_t reps, Rng& rng) {
  if (layouts.empty()) throw InvalidInput("session needs at least one layout");
  if (reps == 0) throw InvalidInput("session needs at least one repetition");
  std::vector<std::size_t> order;
  for (std::size_t l = 0; l < layouts.size(); ++l) {
    for (std::size_t r = 0; r < reps; ++r) order.push_back(l);
  }
  std::shuffle(order.begin(), order.end(), rng);

  SessionPlan plan;
  plan.session_id = session_id;
  plan.level = level;
  plan.trials.reserve(order.size());
  for (const std::size_t l : order) {
    BehavioralTrial trial = gen_trial(layouts[l], level, rng);
    trial.layout_index = l;
    plan.trials.push_back(std::move(trial));
  }
  return plan;
}

std::vector<SessionPlan> build_sessions(const std::vector<LevelCondition>& levels,
                                        const std::vector<SpeakerLayout>& layouts,
                                        std::size_t reps, Rng& rng) {
  std::vector<SessionPlan> sessions;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    sessions.push_back(build_session(static_cast<int>(i), levels[i], layouts, reps, rng));
  }
  return sessions;
}

WordScore score_response(const BehavioralTrial& trial, const MatrixSentence& response) {
  WordScore score;
  std::size_t hits = 0;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    score.correct[c] = response.words[c] == trial.target.words[c];
    if (score.correct[c]) ++hits;
  }
  score.fraction = static_cast<double>(hits) / static_cast<double>(kCategoryCount);
  return score;
}

}  // namespace aad::behavioral
