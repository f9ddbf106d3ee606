#include "config_json.hpp"

#include <fstream>
#include <sstream>

#include "mdp/config.hpp"
#include "mdp/error.hpp"

namespace mdp {
namespace detail {

namespace {
using Reader = ObjectReader<ConfigError>;
}

json gen_config_to_json(const corpus::GenConfig& c) {
  return {
      {"duration_min_s", c.duration_min_s},
      {"duration_max_s", c.duration_max_s},
      {"fps_v", c.fps_v},
      {"fps_a", c.fps_a},
      {"raw_dim_v", c.raw_dim_v},
      {"raw_dim_a", c.raw_dim_a},
      {"latent_dim", c.latent_dim},
      {"latent_step", c.latent_step},
      {"smooth_w", c.smooth_w},
      {"noise_std", c.noise_std},
      {"genuine_diff_cap", c.genuine_diff_cap},
      {"n_train", c.n_train},
      {"n_test", c.n_test},
      {"forged_ratio", c.forged_ratio},
      {"modality_mix",
       {{"visual_only", c.modality_mix.visual_only},
        {"audio_only", c.modality_mix.audio_only},
        {"audio_visual", c.modality_mix.audio_visual}}},
      {"forgery",
       {{"k_segments", c.forgery.k_segments},
        {"dur_min_s", c.forgery.dur_min_s},
        {"dur_max_s", c.forgery.dur_max_s},
        {"shift", c.forgery.shift},
        {"decouple", c.forgery.decouple}}},
      {"seed", c.seed},
  };
}

namespace {

void read_gen_fields(Reader& r, corpus::GenConfig& c, const std::string& path) {
  r.optional("duration_min_s", c.duration_min_s);
  r.optional("duration_max_s", c.duration_max_s);
  r.optional("fps_v", c.fps_v);
  r.optional("fps_a", c.fps_a);
  r.optional("raw_dim_v", c.raw_dim_v);
  r.optional("raw_dim_a", c.raw_dim_a);
  r.optional("latent_dim", c.latent_dim);
  r.optional("latent_step", c.latent_step);
  r.optional("smooth_w", c.smooth_w);
  r.optional("noise_std", c.noise_std);
  r.optional("genuine_diff_cap", c.genuine_diff_cap);
  r.optional("n_train", c.n_train);
  r.optional("n_test", c.n_test);
  r.optional("forged_ratio", c.forged_ratio);
  r.optional("seed", c.seed);
  if (const json* mix = r.optional_object("modality_mix")) {
    Reader m(*mix, path + ".modality_mix");
    m.optional("visual_only", c.modality_mix.visual_only);
    m.optional("audio_only", c.modality_mix.audio_only);
    m.optional("audio_visual", c.modality_mix.audio_visual);
    m.reject_unknown();
  }
  if (const json* f = r.optional_object("forgery")) {
    Reader m(*f, path + ".forgery");
    m.optional("k_segments", c.forgery.k_segments);
    m.optional("dur_min_s", c.forgery.dur_min_s);
    m.optional("dur_max_s", c.forgery.dur_max_s);
    m.optional("shift", c.forgery.shift);
    m.optional("decouple", c.forgery.decouple);
    m.reject_unknown();
  }
}

}  // namespace

corpus::GenConfig gen_config_from_json(const json& doc, const std::string& path) {
  corpus::GenConfig c;
  Reader r(doc, path);
  read_gen_fields(r, c, path);
  r.reject_unknown();
  return c;
}

json train_config_to_json(const train::TrainConfig& c) {
  return {
      {"lr", c.lr},
      {"batch_size", c.batch_size},
      {"phi", c.phi},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"T", c.steps},
      {"d", c.d},
      {"dp_kind", objective::to_string(c.dp_kind)},
      {"dp_reduce", objective::to_string(c.dp_reduce)},
      {"use_cma", c.use_cma},
      {"use_dp", c.use_dp},
      {"theta", c.theta},
  };
}

namespace {

void read_train_fields(Reader& r, train::TrainConfig& c, const std::string& path) {
  r.optional("lr", c.lr);
  r.optional("batch_size", c.batch_size);
  r.optional("phi", c.phi);
  r.optional("epochs", c.epochs);
  r.optional("seed", c.seed);
  r.optional("use_cma", c.use_cma);
  r.optional("use_dp", c.use_dp);
  r.optional("theta", c.theta);
  std::string kind(objective::to_string(c.dp_kind));
  std::string reduce(objective::to_string(c.dp_reduce));
  r.optional("dp_kind", kind);
  r.optional("dp_reduce", reduce);
  try {
    c.dp_kind = objective::deviation_kind_from_string(kind);
    c.dp_reduce = objective::deviation_reduce_from_string(reduce);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

train::TrainConfig train_config_from_json(const json& doc, const std::string& path) {
  train::TrainConfig c;
  Reader r(doc, path);
  read_train_fields(r, c, path);
  r.optional("T", c.steps);
  r.optional("d", c.d);
  r.reject_unknown();
  return c;
}

}  // namespace detail

namespace train {

std::string train_config_to_json(const TrainConfig& cfg) {
  return detail::train_config_to_json(cfg).dump();
}

TrainConfig train_config_from_json(const std::string& text) {
  detail::json doc;
  try {
    doc = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  return detail::train_config_from_json(doc, "train");
}

}  // namespace train

// ------------------------------------------------------------ RunConfig --

namespace {

using detail::json;
using Reader = detail::ObjectReader<ConfigError>;

void apply_override(json& doc, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set '" + item + "': expected section.key=value");
  }
  const std::string key = item.substr(0, eq);
  const std::string raw = item.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError("--set '" + item + "': empty key component");
    parts.push_back(p);
  }
  if (parts.size() < 2) throw ConfigError("--set '" + item + "': expected section.key=value");
  json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& child = (*node)[parts[i]];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) {
      throw ConfigError("--set '" + item + "': '" + parts[i] + "' is not a section");
    }
    node = &child;
  }
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  (*node)[parts.back()] = value;
}

template <typename T>
std::vector<T> read_list(const json& v, const std::string& where) {
  if (!v.is_array()) Reader::fail(where, "expected an array");
  std::vector<T> out;
  for (const auto& e : v) {
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!e.is_string()) Reader::fail(where, "expected strings");
      } else {
        if (!e.is_number_unsigned()) Reader::fail(where, "expected non-negative integers");
      }
      out.push_back(e.get<T>());
    } catch (const json::exception& ex) {
      Reader::fail(where, ex.what());
    }
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, std::span<const std::string> overrides) {
  json doc;
  try {
    doc = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& item : overrides) apply_override(doc, item);

  RunConfig cfg;
  Reader top(doc, "");
  if (const json* data = top.optional_object("data")) {
    Reader r(*data, "data");
    detail::read_gen_fields(r, cfg.data, "data");
    std::string dir = cfg.data_dir.string();
    r.optional("dir", dir);
    cfg.data_dir = dir;
    r.reject_unknown();
  }
  if (const json* model = top.optional_object("model")) {
    Reader r(*model, "model");
    r.optional("T", cfg.train.steps);
    r.optional("d", cfg.train.d);
    r.reject_unknown();
  }
  if (const json* tr = top.optional_object("train")) {
    Reader r(*tr, "train");
    detail::read_train_fields(r, cfg.train, "train");
    r.reject_unknown();
  }
  if (const json* ev = top.optional_object("eval")) {
    Reader r(*ev, "eval");
    std::string preset = cfg.eval.preset;
    r.optional("preset", preset);
    cfg.eval = metrics::eval_preset(preset);
    r.optional("timeline", cfg.timeline);
    r.optional("svg", cfg.svg);
    r.reject_unknown();
  }
  if (const json* ab = top.optional_object("ablate")) {
    Reader r(*ab, "ablate");
    if (const json* v = r.optional_object("grid")) cfg.ablate.grid = read_list<std::string>(*v, "ablate.grid");
    if (const json* v = r.optional_object("dp_sweep")) {
      cfg.ablate.dp_sweep = read_list<std::string>(*v, "ablate.dp_sweep");
    }
    if (const json* v = r.optional_object("seeds")) {
      cfg.ablate.seeds = read_list<std::uint64_t>(*v, "ablate.seeds");
    }
    r.reject_unknown();
  }
  top.reject_unknown();

  corpus::validate(cfg.data);
  train::validate(cfg.train);
  metrics::validate(cfg.eval);
  for (const auto& v : cfg.ablate.grid) {
    if (v != "baseline" && v != "cma" && v != "dp" && v != "full") {
      throw ConfigError("ablate.grid: unknown variant '" + v +
                        "' (expected baseline, cma, dp or full)");
    }
  }
  for (const auto& k : cfg.ablate.dp_sweep) {
    try {
      objective::deviation_kind_from_string(k);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("ablate.dp_sweep: ") + e.what());
    }
  }
  if (cfg.ablate.seeds.empty()) throw ConfigError("ablate.seeds: must not be empty");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), overrides);
}

std::string run_config_to_json(const RunConfig& cfg) {
  json data = detail::gen_config_to_json(cfg.data);
  data["dir"] = cfg.data_dir.string();
  json train = detail::train_config_to_json(cfg.train);
  train.erase("T");
  train.erase("d");
  const json doc = {
      {"data", data},
      {"model", {{"T", cfg.train.steps}, {"d", cfg.train.d}}},
      {"train", train},
      {"eval", {{"preset", cfg.eval.preset}, {"timeline", cfg.timeline}, {"svg", cfg.svg}}},
      {"ablate",
       {{"grid", cfg.ablate.grid}, {"dp_sweep", cfg.ablate.dp_sweep}, {"seeds", cfg.ablate.seeds}}},
  };
  return doc.dump(2) + "\n";
}

}  // namespace mdp
