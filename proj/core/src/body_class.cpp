#include "parseid/body_class.hpp"

#include <array>
#include <utility>

namespace parseid {
namespace {

constexpr std::array<std::pair<BodyClass, std::string_view>, kBodyClassCount> kNames = {{
    {BodyClass::hat, "hat"},
    {BodyClass::hair, "hair"},
    {BodyClass::glove, "glove"},
    {BodyClass::sunglasses, "sunglasses"},
    {BodyClass::upper_clothes, "upper_clothes"},
    {BodyClass::socks, "socks"},
    {BodyClass::pants, "pants"},
    {BodyClass::scarf, "scarf"},
    {BodyClass::face, "face"},
    {BodyClass::left_arm, "left_arm"},
    {BodyClass::right_arm, "right_arm"},
    {BodyClass::left_leg, "left_leg"},
    {BodyClass::right_leg, "right_leg"},
    {BodyClass::left_shoe, "left_shoe"},
    {BodyClass::right_shoe, "right_shoe"},
}};

}  // namespace

std::optional<BodyClass> class_from_label(std::uint8_t merged_label) noexcept {
  for (BodyClass c : kBodyClasses) {
    if (label_of(c) == merged_label) return c;
  }
  return std::nullopt;
}

std::string_view class_name(BodyClass c) noexcept {
  return kNames[class_index(c)].second;
}

std::optional<BodyClass> class_from_name(std::string_view name) noexcept {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

}  // namespace parseid
