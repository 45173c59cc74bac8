#include "lesionforge/pipeline_config.hpp"

#include <set>

#include <json.hpp>

#include "lesionforge/error.hpp"

namespace lesionforge {
namespace {

using json = nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Config, where + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) fail(where, "unknown key '" + item.key() + "'");
  }
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(where, std::string(key) + " must be a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail(where, std::string(key) + " must be a boolean");
  return v.get<bool>();
}

Range get_range(const json& obj, const char* key, Range fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(where, std::string(key) + " must be [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<std::string> get_channels(const json& obj, const std::string& where) {
  if (!obj.contains("channels")) return {};
  const auto& v = obj.at("channels");
  if (!v.is_array()) fail(where, "channels must be an array of names");
  std::vector<std::string> out;
  for (const auto& name : v) {
    if (!name.is_string()) fail(where, "channels must be an array of names");
    out.push_back(name.get<std::string>());
  }
  return out;
}

GammaSamplerSpec sampler_from_json(const json& obj, const std::string& where) {
  if (!obj.is_object() || !obj.contains("type") || !obj.at("type").is_string()) {
    fail(where, "sampler needs a string 'type'");
  }
  const auto type = obj.at("type").get<std::string>();
  GammaSamplerSpec spec;
  if (type == "mixture-uniform") {
    reject_unknown_keys(obj, {"type", "lo1", "hi1", "lo2", "hi2", "p"}, where);
    MixtureUniform s;
    s.lo1 = get_number(obj, "lo1", s.lo1, where);
    s.hi1 = get_number(obj, "hi1", s.hi1, where);
    s.lo2 = get_number(obj, "lo2", s.lo2, where);
    s.hi2 = get_number(obj, "hi2", s.hi2, where);
    s.p = get_number(obj, "p", s.p, where);
    spec = s;
  } else if (type == "uniform") {
    // Single interval: a mixture that always picks its first component.
    reject_unknown_keys(obj, {"type", "lo", "hi"}, where);
    MixtureUniform s;
    s.lo1 = s.lo2 = get_number(obj, "lo", 0.7, where);
    s.hi1 = s.hi2 = get_number(obj, "hi", 1.5, where);
    s.p = 1.0;
    spec = s;
  } else if (type == "log-normal") {
    reject_unknown_keys(obj, {"type", "mu", "sigma"}, where);
    LogNormal s;
    s.mu = get_number(obj, "mu", s.mu, where);
    s.sigma = get_number(obj, "sigma", s.sigma, where);
    spec = s;
  } else if (type == "beta") {
    reject_unknown_keys(obj, {"type", "alpha", "beta", "lo", "hi"}, where);
    BetaOnInterval s;
    s.alpha = get_number(obj, "alpha", s.alpha, where);
    s.beta = get_number(obj, "beta", s.beta, where);
    s.lo = get_number(obj, "lo", s.lo, where);
    s.hi = get_number(obj, "hi", s.hi, where);
    spec = s;
  } else {
    fail(where, "unknown sampler type '" + type + "'");
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    fail(where, "sampler " + e.detail());
  }
  return spec;
}

json sampler_to_json(const GammaSamplerSpec& spec) {
  return std::visit(
      overloaded{
          [](const MixtureUniform& s) {
            return json{{"type", "mixture-uniform"}, {"lo1", s.lo1}, {"hi1", s.hi1},
                        {"lo2", s.lo2},              {"hi2", s.hi2}, {"p", s.p}};
          },
          [](const LogNormal& s) {
            return json{{"type", "log-normal"}, {"mu", s.mu}, {"sigma", s.sigma}};
          },
          [](const BetaOnInterval& s) {
            return json{{"type", "beta"}, {"alpha", s.alpha}, {"beta", s.beta},
                        {"lo", s.lo},     {"hi", s.hi}};
          },
      },
      spec);
}

EmptyMaskPolicy get_policy(const json& obj, const std::string& where) {
  if (!obj.contains("empty_mask")) return EmptyMaskPolicy::TreatAsGlobal;
  const auto& v = obj.at("empty_mask");
  if (v == "treat-as-global") return EmptyMaskPolicy::TreatAsGlobal;
  if (v == "error") return EmptyMaskPolicy::Error;
  fail(where, "empty_mask must be 'treat-as-global' or 'error'");
}

AugmentOpSpec op_from_json(const json& obj, std::size_t position) {
  const std::string where = "ops[" + std::to_string(position) + "]";
  if (!obj.is_object() || !obj.contains("kind") || !obj.at("kind").is_string()) {
    fail(where, "op needs a string 'kind'");
  }
  const auto kind = obj.at("kind").get<std::string>();
  AugmentOpSpec op;
  try {
    op = default_op(kind);
  } catch (const Error& e) {
    fail(where, e.detail());
  }
  op.probability = get_number(obj, "probability", op.probability, where);

  std::visit(
      overloaded{
          [&](LocalGammaOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "sampler", "channels",
                                      "per_channel", "empty_mask"}, where);
            if (obj.contains("sampler")) p.sampler = sampler_from_json(obj.at("sampler"), where);
            p.channels = get_channels(obj, where);
            p.per_channel = get_bool(obj, "per_channel", p.per_channel, where);
            p.empty_mask = get_policy(obj, where);
          },
          [&](GlobalGammaOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "sampler", "channels",
                                      "per_channel"}, where);
            if (obj.contains("sampler")) p.sampler = sampler_from_json(obj.at("sampler"), where);
            p.channels = get_channels(obj, where);
            p.per_channel = get_bool(obj, "per_channel", p.per_channel, where);
          },
          [&](GaussianNoiseOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "sigma", "relative", "channels"},
                                where);
            p.sigma = get_range(obj, "sigma", p.sigma, where);
            p.relative = get_bool(obj, "relative", p.relative, where);
            p.channels = get_channels(obj, where);
          },
          [&](RicianNoiseOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "sigma", "relative", "channels"},
                                where);
            p.sigma = get_range(obj, "sigma", p.sigma, where);
            p.relative = get_bool(obj, "relative", p.relative, where);
            p.channels = get_channels(obj, where);
          },
          [&](GaussianBlurOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "sigma_mm", "channels"}, where);
            p.sigma_mm = get_range(obj, "sigma_mm", p.sigma_mm, where);
            p.channels = get_channels(obj, where);
          },
          [&](BrightnessOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "shift", "scale", "relative",
                                      "channels"}, where);
            p.shift = get_range(obj, "shift", p.shift, where);
            p.scale = get_range(obj, "scale", p.scale, where);
            p.relative = get_bool(obj, "relative", p.relative, where);
            p.channels = get_channels(obj, where);
          },
          [&](ContrastOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "factor", "channels"}, where);
            p.factor = get_range(obj, "factor", p.factor, where);
            p.channels = get_channels(obj, where);
          },
          [&](MirrorOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "axes"}, where);
            if (obj.contains("axes")) {
              const auto& v = obj.at("axes");
              if (!v.is_array()) fail(where, "axes must be an array");
              p.axes.clear();
              for (const auto& a : v) {
                if (!a.is_number_integer()) fail(where, "axes must be integers");
                p.axes.push_back(a.get<int>());
              }
            }
          },
          [&](RandomPatchOp& p) {
            reject_unknown_keys(obj, {"kind", "probability", "size"}, where);
            if (obj.contains("size")) {
              const auto& v = obj.at("size");
              if (!v.is_array() || v.size() != 3) fail(where, "size must be [nx, ny, nz]");
              for (const auto& e : v) {
                if (!e.is_number_unsigned()) fail(where, "size entries must be positive integers");
              }
              p.size = {v[0].get<std::size_t>(), v[1].get<std::size_t>(),
                        v[2].get<std::size_t>()};
            }
          },
      },
      op.params);
  return op;
}

json op_to_json(const AugmentOpSpec& op) {
  json obj{{"kind", std::string(kind_name(op.params))}, {"probability", op.probability}};
  const auto range = [](const Range& r) { return json::array({r.lo, r.hi}); };
  std::visit(
      overloaded{
          [&](const LocalGammaOp& p) {
            obj["sampler"] = sampler_to_json(p.sampler);
            obj["channels"] = p.channels;
            obj["per_channel"] = p.per_channel;
            obj["empty_mask"] =
                p.empty_mask == EmptyMaskPolicy::TreatAsGlobal ? "treat-as-global" : "error";
          },
          [&](const GlobalGammaOp& p) {
            obj["sampler"] = sampler_to_json(p.sampler);
            obj["channels"] = p.channels;
            obj["per_channel"] = p.per_channel;
          },
          [&](const GaussianNoiseOp& p) {
            obj["sigma"] = range(p.sigma);
            obj["relative"] = p.relative;
            obj["channels"] = p.channels;
          },
          [&](const RicianNoiseOp& p) {
            obj["sigma"] = range(p.sigma);
            obj["relative"] = p.relative;
            obj["channels"] = p.channels;
          },
          [&](const GaussianBlurOp& p) {
            obj["sigma_mm"] = range(p.sigma_mm);
            obj["channels"] = p.channels;
          },
          [&](const BrightnessOp& p) {
            obj["shift"] = range(p.shift);
            obj["scale"] = range(p.scale);
            obj["relative"] = p.relative;
            obj["channels"] = p.channels;
          },
          [&](const ContrastOp& p) {
            obj["factor"] = range(p.factor);
            obj["channels"] = p.channels;
          },
          [&](const MirrorOp& p) { obj["axes"] = p.axes; },
          [&](const RandomPatchOp& p) {
            obj["size"] = json::array({p.size.nx, p.size.ny, p.size.nz});
          },
      },
      op.params);
  return obj;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view text) {
  const json doc = parse_document(text);
  reject_unknown_keys(doc, {"schema_version", "seed", "samples_per_study", "ops"}, "pipeline");
  if (doc.contains("schema_version") && doc.at("schema_version") != kSchemaVersion) {
    fail("pipeline", "unsupported schema_version " + doc.at("schema_version").dump());
  }
  PipelineConfig config;
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) fail("pipeline", "seed must be a non-negative integer");
    config.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("samples_per_study")) {
    if (!doc.at("samples_per_study").is_number_unsigned()) {
      fail("pipeline", "samples_per_study must be a positive integer");
    }
    config.samples_per_study = doc.at("samples_per_study").get<std::size_t>();
  }
  if (doc.contains("ops")) {
    if (!doc.at("ops").is_array()) fail("pipeline", "ops must be an array");
    for (std::size_t i = 0; i < doc.at("ops").size(); ++i) {
      config.ops.push_back(op_from_json(doc.at("ops")[i], i));
    }
  }
  validate(config);
  return config;
}

std::string serialize_pipeline_config(const PipelineConfig& config, int indent) {
  json ops = json::array();
  for (const auto& op : config.ops) ops.push_back(op_to_json(op));
  const json doc{{"schema_version", kSchemaVersion},
                 {"seed", config.seed},
                 {"samples_per_study", config.samples_per_study},
                 {"ops", std::move(ops)}};
  return doc.dump(indent);
}

GammaSamplerSpec parse_sampler_spec(std::string_view text) {
  return sampler_from_json(parse_document(text), "spec");
}

std::string serialize_sampler_spec(const GammaSamplerSpec& spec) {
  return sampler_to_json(spec).dump();
}

}  // namespace lesionforge
