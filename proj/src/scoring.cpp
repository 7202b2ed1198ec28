#include "sentiscope/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "sentiscope/error.hpp"
#include "sentiscope/timeutil.hpp"

namespace sentiscope {

void SentimentCounts::add(SentimentLabel label, std::uint64_t n) {
  switch (label) {
    case SentimentLabel::ProGun: pro += n; break;
    case SentimentLabel::AntiGun: anti += n; break;
    case SentimentLabel::Neutral: neutral += n; break;
  }
}

SentimentCounts& SentimentCounts::operator+=(const SentimentCounts& other) {
  pro += other.pro;
  anti += other.anti;
  neutral += other.neutral;
  return *this;
}

const StateInfo& PopulationTable::at(const std::string& code) const {
  const auto it = states.find(code);
  if (it == states.end()) throw UnknownState("unknown state '" + code + "'");
  return it->second;
}

void PopulationTable::validate() const {
  for (const auto& [code, info] : states) {
    if (info.population <= 0) throw InvalidArgument("state " + code + ": population must be positive");
    if (!(info.gun_ownership_pct >= 0.0 && info.gun_ownership_pct <= 1.0))
      throw InvalidArgument("state " + code + ": gun_ownership_pct must be a fraction in [0,1]");
    if (info.population > national_population)
      throw InvalidArgument("state " + code + ": population exceeds national population");
  }
}

PopulationTable make_population_table(std::map<std::string, StateInfo> states) {
  PopulationTable table{std::move(states), 0};
  for (const auto& [code, info] : table.states) table.national_population += info.population;
  table.validate();
  return table;
}

double pgpss1(const SentimentCounts& c) {
  return static_cast<double>(c.pro) / static_cast<double>(std::max<std::uint64_t>(c.anti, 1));
}

double pgpss2(const SentimentCounts& c, std::uint64_t frame_total) {
  if (frame_total == 0) throw ZeroFrameTotal("frame total is zero");
  if (c.total() > frame_total)
    throw InvalidArgument("region total " + std::to_string(c.total()) + " exceeds frame total " +
                          std::to_string(frame_total));
  return pgpss1(c) * (static_cast<double>(c.total()) / static_cast<double>(frame_total));
}

double pgpss3(const SentimentCounts& c, std::uint64_t frame_total, const PopulationTable& pop,
              const std::string& state) {
  const StateInfo& info = pop.at(state);
  if (pop.national_population <= 0) throw InvalidArgument("national population must be positive");
  return pgpss2(c, frame_total) *
         (static_cast<double>(info.population) / static_cast<double>(pop.national_population));
}

std::map<std::string, double> normalize_scores(const std::map<std::string, double>& values) {
  double max = 0.0;
  for (const auto& [k, v] : values) {
    if (!(v >= 0.0)) throw InvalidArgument("score for " + k + " is negative or NaN");
    max = std::max(max, v);
  }
  std::map<std::string, double> out;
  for (const auto& [k, v] : values) out.emplace(k, max > 0.0 ? v / max : 0.0);
  return out;
}

double StateScores::raw(int variant) const {
  return variant == 1 ? raw1 : variant == 2 ? raw2 : raw3;
}

double StateScores::norm(int variant) const {
  return variant == 1 ? norm1 : variant == 2 ? norm2 : norm3;
}

const StateScores* PGPSSResult::find(const std::string& code) const {
  const auto it = std::lower_bound(states.begin(), states.end(), code,
                                   [](const StateScores& s, const std::string& c) { return s.code < c; });
  return it != states.end() && it->code == code ? &*it : nullptr;
}

nlohmann::json PGPSSResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : states)
    rows.push_back({{"code", s.code},
                    {"raw1", s.raw1},
                    {"raw2", s.raw2},
                    {"raw3", s.raw3},
                    {"norm1", s.norm1},
                    {"norm2", s.norm2},
                    {"norm3", s.norm3}});
  return {{"window", {{"start", format_iso8601(window.start)}, {"end", format_iso8601(window.end)}}},
          {"states", rows}};
}

PGPSSResult PGPSSResult::from_json(const nlohmann::json& j) {
  try {
    PGPSSResult r;
    const auto start = parse_iso8601(j.at("window").at("start").get<std::string>());
    const auto end = parse_iso8601(j.at("window").at("end").get<std::string>());
    if (!start || !end) throw CorruptPayload("bad PGPSS window");
    r.window = make_window(*start, *end);
    for (const auto& s : j.at("states"))
      r.states.push_back({s.at("code").get<std::string>(), s.at("raw1").get<double>(), s.at("raw2").get<double>(),
                          s.at("raw3").get<double>(), s.at("norm1").get<double>(), s.at("norm2").get<double>(),
                          s.at("norm3").get<double>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptPayload(std::string("PGPSS result: ") + e.what());
  }
}

std::string PGPSSResult::to_csv() const {
  std::ostringstream out;
  out << "code,raw1,raw2,raw3,norm1,norm2,norm3\n";
  const auto num = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  for (const auto& s : states)
    out << s.code << ',' << num(s.raw1) << ',' << num(s.raw2) << ',' << num(s.raw3) << ',' << num(s.norm1) << ','
        << num(s.norm2) << ',' << num(s.norm3) << '\n';
  return out.str();
}

PGPSSResult score_all_states(const std::map<std::string, SentimentCounts>& counts, const CorpusWindow& window,
                             const PopulationTable& pop) {
  std::uint64_t frame_total = 0;
  for (const auto& [code, c] : counts) {
    pop.at(code);
    frame_total += c.total();
  }
  PGPSSResult result{window, {}};
  std::map<std::string, double> r1, r2, r3;
  for (const auto& [code, info] : pop.states) {
    const auto it = counts.find(code);
    const SentimentCounts c = it == counts.end() ? SentimentCounts{} : it->second;
    // An empty frame has nothing to score; every state is zero.
    r1[code] = frame_total == 0 ? 0.0 : pgpss1(c);
    r2[code] = frame_total == 0 ? 0.0 : pgpss2(c, frame_total);
    r3[code] = frame_total == 0 ? 0.0 : pgpss3(c, frame_total, pop, code);
  }
  const auto n1 = normalize_scores(r1), n2 = normalize_scores(r2), n3 = normalize_scores(r3);
  for (const auto& [code, info] : pop.states)
    result.states.push_back({code, r1[code], r2[code], r3[code], n1.at(code), n2.at(code), n3.at(code)});
  return result;
}

int parse_score_variant(const std::string& name) {
  if (name == "pgpss1") return 1;
  if (name == "pgpss2") return 2;
  if (name == "pgpss3") return 3;
  return 0;
}

}  // namespace sentiscope
