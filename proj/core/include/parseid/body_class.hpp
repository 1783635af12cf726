#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace parseid {

inline constexpr std::uint8_t kBackgroundLabel = 0;
inline constexpr std::uint8_t kMaxLipLabel = 19;

// The fifteen parsing classes retained after merging the LIP taxonomy.
// Enumerator values are the LIP ids of the surviving classes, so a merged
// mask stores the same numbers a raw LIP mask would.
enum class BodyClass : std::uint8_t {
  hat = 1,
  hair = 2,
  glove = 3,
  sunglasses = 4,
  upper_clothes = 5,
  socks = 8,
  pants = 9,
  scarf = 11,
  face = 13,
  left_arm = 14,
  right_arm = 15,
  left_leg = 16,
  right_leg = 17,
  left_shoe = 18,
  right_shoe = 19,
};

inline constexpr std::size_t kBodyClassCount = 15;

inline constexpr std::array<BodyClass, kBodyClassCount> kBodyClasses = {
    BodyClass::hat,       BodyClass::hair,      BodyClass::glove,
    BodyClass::sunglasses, BodyClass::upper_clothes, BodyClass::socks,
    BodyClass::pants,     BodyClass::scarf,     BodyClass::face,
    BodyClass::left_arm,  BodyClass::right_arm, BodyClass::left_leg,
    BodyClass::right_leg, BodyClass::left_shoe, BodyClass::right_shoe,
};

// Dense index in [0, 15) following kBodyClasses order.
constexpr std::size_t class_index(BodyClass c) noexcept {
  for (std::size_t i = 0; i < kBodyClasses.size(); ++i) {
    if (kBodyClasses[i] == c) return i;
  }
  return kBodyClassCount;
}

constexpr std::uint8_t label_of(BodyClass c) noexcept {
  return static_cast<std::uint8_t>(c);
}

// Maps a raw LIP label (0..19) onto the merged label set: dress, coat and
// jumpsuit become upper clothes; skirt becomes pants; background stays 0.
// Applying it to an already merged label is the identity.
constexpr std::uint8_t merge_lip_label(std::uint8_t lip) noexcept {
  switch (lip) {
    case 6:   // dress
    case 7:   // coat
    case 10:  // jumpsuit
      return label_of(BodyClass::upper_clothes);
    case 12:  // skirt
      return label_of(BodyClass::pants);
    default:
      return lip;
  }
}

// Class for a merged, non-background label.
std::optional<BodyClass> class_from_label(std::uint8_t merged_label) noexcept;

std::string_view class_name(BodyClass c) noexcept;
std::optional<BodyClass> class_from_name(std::string_view name) noexcept;

}  // namespace parseid
