#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "sentiscope/corpusgen.hpp"
#include "sentiscope/features.hpp"
#include "sentiscope/rng.hpp"
#include "sentiscope/tweet.hpp"

namespace test {

inline sentiscope::Tweet tweet(std::string id, std::string text, std::int64_t ts = 1355497320) {
  sentiscope::Tweet t;
  t.id = std::move(id);
  t.text = std::move(text);
  t.timestamp = ts;
  t.lang = "en";
  return t;
}

inline std::vector<sentiscope::Tweet> tweets_from(const std::vector<std::string>& texts) {
  std::vector<sentiscope::Tweet> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back(tweet("d" + std::to_string(i), texts[i]));
  return out;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("sentiscope_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string data_path(const std::string& name) { return std::string(SENTISCOPE_DATA_DIR) + "/" + name; }

// Random sparse count matrix; some rows may be empty.
inline sentiscope::DocumentTermMatrix random_dtm(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                                 double density = 0.3) {
  sentiscope::CounterRng rng(seed, 99);
  sentiscope::DocumentTermMatrix m(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<sentiscope::TermCount> e;
    for (std::uint32_t c = 0; c < cols; ++c)
      if (rng.uniform() < density) e.push_back({c, static_cast<std::uint32_t>(1 + rng.below(3))});
    m.add_row(std::move(e));
  }
  return m;
}

// Default generator without geotags; labels and texts only.
inline sentiscope::GeneratorSpec plain_spec(std::size_t per_class, double signal_rate, std::uint64_t seed) {
  auto spec = sentiscope::default_generator_spec();
  spec.n_per_class = {per_class, per_class, per_class};
  spec.signal_rate = signal_rate;
  spec.geotag_rate = 0.0;
  spec.seed = seed;
  return spec;
}

inline std::vector<sentiscope::Tweet> tweets_of(const std::vector<sentiscope::TweetRecord>& records) {
  std::vector<sentiscope::Tweet> out;
  for (const auto& r : records) out.push_back(r.tweet);
  return out;
}

inline std::vector<sentiscope::SentimentLabel> labels_of(const std::vector<sentiscope::TweetRecord>& records) {
  std::vector<sentiscope::SentimentLabel> out;
  for (const auto& r : records) out.push_back(*r.label);
  return out;
}

}  // namespace test
