// Regenerates the bundled texture presets from the committed swatches.
//   parseid-make-presets --write-swatches DIR   (once, to create the PNGs)
//   parseid-make-presets DIR OUT.json
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "parseid/image_io.hpp"
#include "parseid/query_builder.hpp"
#include "synth.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  CLI::App app{"Build texture presets from swatch images", "parseid-make-presets"};
  fs::path dir;
  fs::path out;
  bool write_swatches = false;
  app.add_option("swatches", dir, "Swatch directory (<name>.png, <name>_mask.png)")->required();
  app.add_option("out", out, "Preset JSON to write");
  app.add_flag("--write-swatches", write_swatches, "Render the swatch PNGs into the directory");
  CLI11_PARSE(app, argc, argv);

  try {
    if (write_swatches) {
      fs::create_directories(dir);
      for (const char* name : parseid::synth::kSwatchNames) {
        const auto s = parseid::synth::make_swatch(name);
        parseid::write_rgb_png(dir / (std::string(name) + ".png"), s.rgb);
        parseid::write_label_png(dir / (std::string(name) + "_mask.png"), s.mask);
      }
    }
    if (out.empty()) return 0;
    parseid::TexturePresetTable table;
    for (const char* name : parseid::synth::kSwatchNames) {
      const auto rgb = parseid::read_rgb(dir / (std::string(name) + ".png"));
      const auto mask = parseid::read_label_png(dir / (std::string(name) + "_mask.png"));
      table.add(name, parseid::synth::preset_from_swatch(rgb, mask));
    }
    std::ofstream f(out);
    f << table.to_json().dump(2) << "\n";
    if (!f) throw std::runtime_error("cannot write " + out.string());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
