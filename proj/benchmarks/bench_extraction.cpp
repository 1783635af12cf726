#include <benchmark/benchmark.h>

#include "parseid/color_features.hpp"
#include "parseid/features.hpp"
#include "parseid/texture_features.hpp"
#include "synth.hpp"

namespace {

using namespace parseid;

const std::vector<synth::SynthImage>& images() {
  static const auto v = [] {
    synth::DatasetSpec spec;
    spec.identities = 8;
    spec.views = 2;
    return synth::make_dataset(spec);
  }();
  return v;
}

void BM_ExtractFeatures(benchmark::State& state) {
  std::vector<PersonImage> people;
  for (const auto& img : images()) people.push_back(synth::to_person_image(img));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_features(people[i++ % people.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMicrosecond);

void BM_RgbToLab(benchmark::State& state) {
  const auto& rgb = images().front().rgb;
  for (auto _ : state) benchmark::DoNotOptimize(rgb_to_lab(rgb.data()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rgb.data().size()));
}
BENCHMARK(BM_RgbToLab)->Unit(benchmark::kMicrosecond);

void BM_StretchLightness(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(0, 255);
  std::vector<std::uint8_t> values(2000);
  for (auto& x : values) x = static_cast<std::uint8_t>(v(rng));
  const ChannelHistogram h = build_histogram(values);
  for (auto _ : state) benchmark::DoNotOptimize(stretch_lightness(h));
}
BENCHMARK(BM_StretchLightness);

void BM_LbpHistograms(benchmark::State& state) {
  const auto person = synth::to_person_image(images().front());
  const GrayImage gray = grayscale(person.rgb);
  const auto sets = class_pixel_sets(person);
  const auto& upper = sets.at(BodyClass::upper_clothes);
  for (auto _ : state) benchmark::DoNotOptimize(lbp_histograms(gray, upper, person.mask));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(upper.size()));
}
BENCHMARK(BM_LbpHistograms)->Unit(benchmark::kMicrosecond);

}  // namespace
