#include "cli.hpp"

#include <algorithm>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "parseid/error.hpp"
#include "parseid/evaluation.hpp"
#include "parseid/feature_store.hpp"
#include "parseid/naming.hpp"
#include "parseid/parallel.hpp"
#include "parseid/query_builder.hpp"
#include "parseid/record_json.hpp"
#include "parseid/search_service.hpp"
#include "parseid/texture_features.hpp"

namespace parseid::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ExtractArgs {
  fs::path images;
  fs::path masks;
  fs::path store;
  std::size_t jobs = default_parallelism();
  bool no_stretch = false;
  bool force = false;
  std::string naming;
};

struct EvaluateArgs {
  fs::path test;
  fs::path query;
  fs::path store;
  fs::path clear_queries;
  bool cross_camera = true;
  std::vector<std::size_t> ranks = {1, 5, 10};
  fs::path out;
  fs::path csv;
  fs::path weights;
  std::string naming;
  bool strict = false;
  std::size_t jobs = default_parallelism();
};

struct SearchArgs {
  fs::path store;
  std::vector<std::string> attrs;
  std::size_t k = 10;
  fs::path out;
  fs::path presets;
  fs::path weights;
  int spread = kDefaultSpread;
  std::size_t jobs = 1;
};

struct ServeArgs {
  fs::path store;
  std::string listen = "127.0.0.1:8080";
  fs::path static_dir;
  fs::path weights;
  fs::path presets;
  std::size_t max_k = 100;
  std::size_t jobs = 1;
};

struct InspectArgs {
  fs::path store;
  std::string image_id;
  bool as_json = false;
};

ScoringConfig weights_or_default(const fs::path& path) {
  return path.empty() ? ScoringConfig{} : load_weights(path);
}

NamingRule naming_or_default(const std::string& pattern) {
  return pattern.empty() ? NamingRule::market1501() : NamingRule::from_pattern(pattern);
}

TexturePresetTable presets_or_default(const fs::path& path) {
  if (!path.empty()) return TexturePresetTable::load(path);
  const fs::path bundled = default_preset_path();
  std::error_code ec;
  return fs::exists(bundled, ec) ? TexturePresetTable::load(bundled) : TexturePresetTable{};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
  if (!f) throw ConfigError("cannot write " + path.string());
}

int run_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  const fs::path masks = a.masks.empty() ? a.images.parent_path() / "masks" : a.masks;
  if (!fs::is_directory(a.images)) {
    err << "error: image directory not found: " << a.images.string() << "\n";
    return 2;
  }
  if (!fs::is_directory(masks)) {
    err << "error: mask directory not found: " << masks.string() << "\n";
    return 2;
  }
  BuildOptions options;
  options.parallelism = a.jobs;
  options.extractor.color.stretch_lightness = !a.no_stretch;
  options.naming = naming_or_default(a.naming);
  options.skip_unchanged = !a.force;

  FeatureStore store = FeatureStore::open(a.store, extractor_version(options.extractor));
  const BuildSummary summary = build_from_dataset(a.images, masks, store, options);
  store.flush();

  json failures = json::array();
  for (const auto& [path, reason] : summary.failures) {
    failures.push_back({{"path", path}, {"reason", reason}});
    err << "warning: " << path << ": " << reason << "\n";
  }
  out << json{{"ok", summary.ok},
              {"failed", summary.failed},
              {"skipped", summary.skipped},
              {"store_size", store.size()},
              {"extractor_version", store.version()},
              {"failures", failures}}
             .dump(2)
      << "\n";
  return 0;
}

std::vector<FeatureRecord> records_for(const FeatureStore& store, const std::vector<ImageRef>& refs,
                                       std::vector<std::string>& missing) {
  std::vector<FeatureRecord> records;
  records.reserve(refs.size());
  for (const ImageRef& ref : refs) {
    std::optional<FeatureRecord> rec = store.get(ref.image_id);
    if (!rec) {
      missing.push_back(ref.image_id);
      continue;
    }
    rec->person_id = ref.person_id;
    rec->camera_id = ref.camera_id;
    records.push_back(std::move(*rec));
  }
  return records;
}

int run_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const std::optional<fs::path> clear =
      a.clear_queries.empty() ? std::nullopt : std::optional<fs::path>(a.clear_queries);
  const Split split = load_split(a.test, a.query, naming_or_default(a.naming), clear, a.strict);
  const FeatureStore store = FeatureStore::open_existing(a.store);

  std::vector<std::string> missing;
  const std::vector<FeatureRecord> queries = records_for(store, split.queries, missing);
  const std::vector<FeatureRecord> gallery = records_for(store, split.gallery, missing);
  if (!missing.empty()) {
    err << "error: " << missing.size() << " images have no stored features (first: "
        << missing.front() << "); run `parseid extract` on the query and test directories\n";
    return 1;
  }
  if (gallery.empty()) {
    err << "error: gallery is empty\n";
    return 1;
  }

  EvalConfig config;
  config.scoring = weights_or_default(a.weights);
  config.rank.cross_camera = a.cross_camera;
  config.ranks = a.ranks;
  config.workers = a.jobs;
  const EvalSummary summary = evaluate(queries, gallery, config);

  json report = summary_to_json(summary);
  report["n_excluded_queries"] = split.excluded_queries;
  report["cross_camera"] = config.rank.cross_camera;
  report["gallery_size"] = gallery.size();
  if (!a.out.empty()) write_text(a.out, report.dump(2) + "\n");
  if (!a.csv.empty()) {
    std::ostringstream csv;
    write_per_query_csv(csv, summary);
    write_text(a.csv, csv.str());
  }
  out << report.dump(2) << "\n";
  return 0;
}

int run_search(const SearchArgs& a, std::ostream& out, std::ostream&) {
  if (a.k == 0) throw QueryError("k must be at least 1");
  const TexturePresetTable presets = presets_or_default(a.presets);
  AttributeQuery query;
  for (const std::string& text : a.attrs) query.entries.push_back(parse_attribute(text));
  validate_query(query, presets);

  const FeatureStore store = FeatureStore::open_existing(a.store);
  const std::vector<FeatureRecord> gallery = store.get_all();
  const ScoringConfig scoring = weights_or_default(a.weights);
  const RankingResult ranking =
      search_by_attributes(query, gallery, a.k, presets, scoring, a.spread, a.jobs);
  const FeatureRecord synthesized = synthesize_record(query, presets, a.spread);

  json body = search_response_json(synthesized, ranking, gallery, scoring);
  body["query"] = record_to_json(synthesized);
  if (a.out.empty()) {
    out << body.dump(2) << "\n";
  } else {
    write_text(a.out, body.dump(2) + "\n");
    out << "wrote " << ranking.ranked.size() << " results to " << a.out.string() << "\n";
  }
  return 0;
}

std::pair<std::string, int> split_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw ConfigError("listen address must be HOST:PORT");
  const std::string host = listen.substr(0, colon);
  int port = -1;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
  }
  if (host.empty() || port < 0 || port > 65535) {
    throw ConfigError("bad listen address '" + listen + "'");
  }
  return {host, port};
}

int run_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  ServiceConfig config;
  std::tie(config.host, config.port) = split_listen(a.listen);
  config.store = a.store;
  if (!a.weights.empty()) config.weights = a.weights;
  if (!a.static_dir.empty()) config.static_dir = a.static_dir;
  if (!a.presets.empty()) config.presets = a.presets;
  config.max_k = a.max_k;
  config.workers = a.jobs;
  config.validate();

  // Block termination signals before any thread starts so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  SearchService service(FeatureStore::open_existing(config.store),
                        weights_or_default(a.weights), presets_or_default(a.presets),
                        config.max_k, ExtractorOptions{}, config.workers);
  const int port = service.bind(config.host, config.port, config.static_dir);
  if (port < 0) {
    err << "error: cannot listen on " << a.listen << "\n";
    return 1;
  }
  out << "listening on http://" << config.host << ":" << port << std::endl;

  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  const bool ok = service.serve();
  // serve() can also return without a signal; wake the waiter.
  if (waiter.joinable()) pthread_kill(waiter.native_handle(), SIGTERM);
  return ok ? 0 : 1;
}

std::string bit_pattern(const BinaryHistogram& h) {
  std::string s(kBins, '.');
  for (int i = 0; i < kBins; ++i) {
    if (h.test(i)) s[static_cast<std::size_t>(i)] = '#';
  }
  return s;
}

std::string top_lbp(const LbpHistogram& h, std::size_t n) {
  if (h.empty()) return "-";
  std::vector<std::pair<double, int>> bins;
  for (const std::uint8_t code : minimal_codes()) bins.emplace_back(h.bin(code), code);
  std::stable_sort(bins.begin(), bins.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  std::ostringstream s;
  for (std::size_t i = 0; i < n && i < bins.size() && bins[i].first > 0.0; ++i) {
    if (i > 0) s << ' ';
    s << bins[i].second << ':' << std::fixed << std::setprecision(1) << bins[i].first * 100.0 << '%';
  }
  return s.str();
}

int run_inspect(const InspectArgs& a, std::ostream& out, std::ostream& err) {
  const FeatureStore store = FeatureStore::open_existing(a.store);
  const std::optional<FeatureRecord> rec = store.get(a.image_id);
  if (!rec) {
    err << "error: no record '" << a.image_id << "' in " << a.store.string() << "\n";
    return 1;
  }
  if (a.as_json) {
    out << record_to_json(*rec).dump(2) << "\n";
    return 0;
  }
  out << "image       " << rec->image_id << "\n";
  if (rec->person_id) out << "person      " << *rec->person_id << "\n";
  if (rec->camera_id) out << "camera      " << *rec->camera_id << "\n";
  out << "extractor   " << rec->extractor_version << "\n";
  out << "source      " << rec->image_path << "\n";
  out << "classes     " << rec->classes.size() << "\n";
  for (const ClassFeatures& f : rec->classes) {
    out << "\n" << class_name(f.body_class) << "  (" << f.n_pixels << " px"
        << (f.color.over_highlighted ? ", over-highlighted" : "") << ")\n";
    out << std::fixed << std::setprecision(1) << "  Lab mean  " << f.color.mean.L << ' '
        << f.color.mean.a << ' ' << f.color.mean.b << "\n";
    for (const Channel c : kChannels) {
      out << "  " << kChannelNames[static_cast<std::size_t>(c)] << " bits    "
          << bit_pattern(f.color.hist(c)) << "\n";
    }
    out << "  LBP inner   " << top_lbp(f.inner, 3) << "\n";
    out << "  LBP contour " << top_lbp(f.contour, 3) << "\n";
  }
  return 0;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parsing-based person re-identification tools", "parseid"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "parseid 0.1.0");

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Extract features for image/mask pairs into a store");
  extract->add_option("--images", ex.images, "Directory of person images")->required();
  extract->add_option("--masks", ex.masks, "Directory of LIP label masks (default: <images>/../masks)");
  extract->add_option("--store", ex.store, "Feature store directory")->required();
  extract->add_option("-j,--jobs", ex.jobs, "Worker threads")->check(CLI::PositiveNumber);
  extract->add_flag("--no-stretch", ex.no_stretch, "Disable lightness histogram stretching");
  extract->add_flag("--force", ex.force, "Re-extract unchanged pairs");
  extract->add_option("--naming", ex.naming, "Regex with person and camera capture groups");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Rank queries against the test set");
  evaluate_cmd->add_option("--test", ev.test, "Gallery image directory")->required();
  evaluate_cmd->add_option("--query", ev.query, "Query image directory")->required();
  evaluate_cmd->add_option("--store", ev.store, "Feature store holding both sets")->required();
  evaluate_cmd->add_option("--clear-queries", ev.clear_queries,
                           "File of query ids to leave out (queries with parsing errors)");
  evaluate_cmd->add_flag("--cross-camera,!--no-cross-camera", ev.cross_camera,
                         "Drop same-person same-camera gallery items (default on)");
  evaluate_cmd->add_option("--ranks", ev.ranks, "Ranks to report")->delimiter(',')
      ->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--out", ev.out, "Write report JSON here");
  evaluate_cmd->add_option("--csv", ev.csv, "Write per-query CSV here");
  evaluate_cmd->add_option("--weights", ev.weights, "Weights file");
  evaluate_cmd->add_option("--naming", ev.naming, "Regex with person and camera capture groups");
  evaluate_cmd->add_flag("--strict", ev.strict, "Fail on file names the naming rule rejects");
  evaluate_cmd->add_option("-j,--jobs", ev.jobs, "Worker threads")->check(CLI::PositiveNumber);

  SearchArgs se;
  auto* search = app.add_subcommand("search", "Search a store by clothing attributes");
  search->add_option("--store", se.store, "Feature store directory")->required();
  search->add_option("--attr", se.attrs, "class=#rrggbb[:preset], repeatable")->required();
  search->add_option("-k", se.k, "Number of results");
  search->add_option("--out", se.out, "Write results JSON here");
  search->add_option("--presets", se.presets, "Texture preset file");
  search->add_option("--weights", se.weights, "Weights file");
  search->add_option("--spread", se.spread, "Bins set on each side of the color")
      ->check(CLI::Range(0, 63));
  search->add_option("-j,--jobs", se.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ServeArgs sv;
  sv.store = env_or("PARSEID_STORE", "");
  sv.listen = env_or("PARSEID_LISTEN", sv.listen);
  auto* serve = app.add_subcommand("serve", "Run the HTTP search service");
  auto* serve_store = serve->add_option("--store", sv.store, "Feature store directory (env PARSEID_STORE)");
  if (sv.store.empty()) serve_store->required();
  serve->add_option("--listen", sv.listen, "HOST:PORT (env PARSEID_LISTEN)");
  serve->add_option("--static", sv.static_dir, "Static asset directory");
  serve->add_option("--weights", sv.weights, "Weights file");
  serve->add_option("--presets", sv.presets, "Texture preset file");
  serve->add_option("--max-k", sv.max_k, "Upper bound on k")->check(CLI::PositiveNumber);
  serve->add_option("-j,--jobs", sv.jobs, "Worker threads per search")->check(CLI::PositiveNumber);

  InspectArgs in;
  auto* inspect = app.add_subcommand("inspect", "Print the stored features of one image");
  inspect->add_option("store", in.store, "Feature store directory")->required();
  inspect->add_option("image_id", in.image_id, "Image id")->required();
  inspect->add_flag("--json", in.as_json, "Print the record as JSON");

  if (!args.empty()) args.erase(args.begin());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (extract->parsed()) return run_extract(ex, out, err);
    if (evaluate_cmd->parsed()) return run_evaluate(ev, out, err);
    if (search->parsed()) return run_search(se, out, err);
    if (serve->parsed()) return run_serve(sv, out, err);
    if (inspect->parsed()) return run_inspect(in, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace parseid::cli
