#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace aad::behavioral {

inline constexpr std::size_t kCategoryCount = 5;
inline constexpr std::size_t kWordsPerCategory = 8;

enum class Category : std::uint8_t { Name, Verb, Number, Adjective, Noun };

inline constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "Name", "Verb", "Number", "Adjective", "Noun"};

// Matrix-sentence word table, indexed [category][word].
inline constexpr std::array<std::array<std::string_view, kWordsPerCategory>, kCategoryCount>
    kMatrixWords = {{
        {"Jane", "Gene", "Pat", "Bob", "Sue", "Mike", "Lynn", "Jill"},
        {"Took", "Gave", "Lost", "Found", "Bought", "Sold", "Held", "Saw"},
        {"Two", "Three", "Four", "Five", "Six", "Seven", "Eight", "Nine"},
        {"New", "Old", "Big", "Small", "Red", "Blue", "Cold", "Hot"},
        {"Toys", "Hats", "Shoes", "Cards", "Pens", "Socks", "Bags", "Gloves"},
    }};

// 8^5 distinct sentences.
inline constexpr std::size_t kSentenceSpace = 32768;

using Rng = std::mt19937_64;

struct MatrixSentence {
  std::array<std::uint8_t, kCategoryCount> words{};  // one index in [0, 8) per category

  std::string render() const;
  bool operator==(const MatrixSentence&) const = default;
};

// Parses "Jane Took Two New Toys" back into indices; throws InvalidInput on
// unknown words or category order violations.
MatrixSentence parse_sentence(std::string_view text);

// Talker pool: ids 0–17 are female, 18–35 male.
inline constexpr int kTalkersPerGender = 18;
inline constexpr int kTalkerCount = 2 * kTalkersPerGender;
char talker_gender(int talker_id);

inline constexpr std::array<int, 5> kAzimuths = {-90, -45, 0, 45, 90};

struct SpeakerLayout {
  int target_azimuth = 0;
  std::array<int, 2> masker_azimuths{};

  void validate() const;
  bool operator==(const SpeakerLayout&) const = default;
};

// Target at each of the five azimuths; maskers at the unoccupied positions
// nearest −90° and +90°.
std::vector<SpeakerLayout> default_layouts();

struct LevelCondition {
  double target_db_spl = 65.0;
  double masker_db_spl = 55.0;

  double tmr_db() const noexcept { return target_db_spl - masker_db_spl; }
  bool operator==(const LevelCondition&) const = default;
};

// Masker level = target level − tmr_db, one condition per target level.
std::vector<LevelCondition> levels_for(const std::vector<double>& target_levels_db, double tmr_db);
// 75/65/55 dB SPL targets at 10 dB TMR.
std::vector<LevelCondition> ci_levels();
// 75/65/55 dB SPL targets at 0 dB TMR.
std::vector<LevelCondition> nh_levels();

struct BehavioralTrial {
  MatrixSentence target;
  std::array<MatrixSentence, 2> maskers;
  std::array<int, 3> talkers{};  // target, masker 1, masker 2
  std::size_t layout_index = 0;
  SpeakerLayout layout;
  LevelCondition level;
  bool operator==(const BehavioralTrial&) const = default;
};

MatrixSentence gen_sentence(Rng& rng);

// Target and two maskers whose words differ from each other in every
// category; three distinct talkers.
BehavioralTrial gen_trial(const SpeakerLayout& layout, const LevelCondition& level, Rng& rng);

struct SessionPlan {
  int session_id = 0;
  LevelCondition level;
  std::vector<BehavioralTrial> trials;
  bool operator==(const SessionPlan&) const = default;
};

// reps trials per layout, shuffled.
SessionPlan build_session(int session_id, const LevelCondition& level,
                          const std::vector<SpeakerLayout>& layouts, std::size_t reps, Rng& rng);

// One session per level, in the given order.
std::vector<SessionPlan> build_sessions(const std::vector<LevelCondition>& levels,
                                        const std::vector<SpeakerLayout>& layouts,
                                        std::size_t reps, Rng& rng);

struct WordScore {
  std::array<bool, kCategoryCount> correct{};
  double fraction = 0.0;  // correct words / 5
};

// Category-by-category comparison against the target sentence.
WordScore score_response(const BehavioralTrial& trial, const MatrixSentence& response);

}  // namespace aad::behavioral
