#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sentiscope/label.hpp"
#include "sentiscope/tweet.hpp"

namespace sentiscope {

inline constexpr const char* kNationalRegion = "US";

struct SentimentCounts {
  std::uint64_t pro = 0;
  std::uint64_t anti = 0;
  std::uint64_t neutral = 0;

  std::uint64_t total() const { return pro + anti + neutral; }
  void add(SentimentLabel label, std::uint64_t n = 1);
  SentimentCounts& operator+=(const SentimentCounts& other);
  bool operator==(const SentimentCounts&) const = default;
};

struct StateInfo {
  std::int64_t population = 0;
  double gun_ownership_pct = 0.0;  // fraction in [0, 1]
  bool operator==(const StateInfo&) const = default;
};

struct PopulationTable {
  std::map<std::string, StateInfo> states;
  std::int64_t national_population = 0;

  const StateInfo& at(const std::string& code) const;  // UnknownState
  bool contains(const std::string& code) const { return states.contains(code); }
  // Positive populations, fractions in range, national >= every state.
  void validate() const;
  bool operator==(const PopulationTable&) const = default;
};

// national_population is the sum of the state populations.
PopulationTable make_population_table(std::map<std::string, StateInfo> states);

struct RegionFrame {
  std::string state_code;  // or kNationalRegion
  CorpusWindow window;
};

// pro / max(anti, 1)
double pgpss1(const SentimentCounts& c);
// pgpss1 scaled by the region's share of the frame's tweets.
double pgpss2(const SentimentCounts& c, std::uint64_t frame_total);
// pgpss2 scaled by the region's share of the national population.
double pgpss3(const SentimentCounts& c, std::uint64_t frame_total, const PopulationTable& pop,
              const std::string& state);

// Divide by the maximum; all zeros stay zeros.
std::map<std::string, double> normalize_scores(const std::map<std::string, double>& values);

struct StateScores {
  std::string code;
  double raw1 = 0, raw2 = 0, raw3 = 0;
  double norm1 = 0, norm2 = 0, norm3 = 0;

  double raw(int variant) const;
  double norm(int variant) const;
  bool operator==(const StateScores&) const = default;
};

struct PGPSSResult {
  CorpusWindow window;
  std::vector<StateScores> states;  // sorted by code

  const StateScores* find(const std::string& code) const;
  nlohmann::json to_json() const;
  static PGPSSResult from_json(const nlohmann::json& j);
  std::string to_csv() const;
  bool operator==(const PGPSSResult&) const = default;
};

// Scores every state of `pop`; states missing from `counts` score zero.
// Throws UnknownState for a count keyed by a state outside the table.
PGPSSResult score_all_states(const std::map<std::string, SentimentCounts>& counts, const CorpusWindow& window,
                             const PopulationTable& pop);

// "pgpss1" -> 1 etc.; 0 when unrecognised.
int parse_score_variant(const std::string& name);

}  // namespace sentiscope
