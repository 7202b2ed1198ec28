#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sentiscope {

// Declaration order doubles as the prediction tie-break and the on-disk
// integer encoding.
enum class SentimentLabel : std::uint8_t { ProGun = 0, AntiGun = 1, Neutral = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<SentimentLabel, kNumClasses> kAllLabels{
    SentimentLabel::ProGun, SentimentLabel::AntiGun, SentimentLabel::Neutral};

constexpr int to_int(SentimentLabel label) { return static_cast<int>(label); }
constexpr std::size_t to_index(SentimentLabel label) { return static_cast<std::size_t>(label); }

std::optional<SentimentLabel> label_from_int(long long value);
std::string_view label_name(SentimentLabel label);
// Accepts "pro", "anti", "neutral", the full names and "0"/"1"/"2".
std::optional<SentimentLabel> parse_label(std::string_view text);

}  // namespace sentiscope
