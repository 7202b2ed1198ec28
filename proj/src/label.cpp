#include "sentiscope/label.hpp"

#include <algorithm>
#include <cctype>

namespace sentiscope {

std::optional<SentimentLabel> label_from_int(long long value) {
  if (value < 0 || value >= static_cast<long long>(kNumClasses)) return std::nullopt;
  return static_cast<SentimentLabel>(value);
}

std::string_view label_name(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::ProGun:
      return "ProGun";
    case SentimentLabel::AntiGun:
      return "AntiGun";
    case SentimentLabel::Neutral:
      return "Neutral";
  }
  return "?";
}

std::optional<SentimentLabel> parse_label(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "0" || s == "pro" || s == "progun" || s == "pro_gun" || s == "pro-gun")
    return SentimentLabel::ProGun;
  if (s == "1" || s == "anti" || s == "antigun" || s == "anti_gun" || s == "anti-gun")
    return SentimentLabel::AntiGun;
  if (s == "2" || s == "neutral" || s == "neu") return SentimentLabel::Neutral;
  return std::nullopt;
}

}  // namespace sentiscope
