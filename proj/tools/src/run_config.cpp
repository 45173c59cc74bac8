#include "lesionforge/cli/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lesionforge/error.hpp"
#include "lesionforge/pipeline_config.hpp"

namespace lesionforge::cli {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorKind::Config, "run config: " + what);
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("expected an object");
  static const std::set<std::string> allowed{
      "schema_version", "manifest", "output_dir", "seed", "workers",
      "output_datatype", "gzip_level", "pipeline"};
  for (const auto& item : doc.items()) {
    if (!allowed.contains(item.key())) fail("unknown key '" + item.key() + "'");
  }
  if (doc.contains("schema_version") && doc.at("schema_version") != kSchemaVersion) {
    fail("unsupported schema_version " + doc.at("schema_version").dump());
  }

  RunConfig config;
  if (!doc.contains("manifest") || !doc.at("manifest").is_string()) {
    fail("'manifest' must be a path string");
  }
  config.manifest = doc.at("manifest").get<std::string>();
  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) fail("'output_dir' must be a path string");
    config.output_dir = doc.at("output_dir").get<std::string>();
  }
  if (doc.contains("workers")) {
    if (!doc.at("workers").is_number_unsigned() || doc.at("workers").get<std::size_t>() == 0) {
      fail("'workers' must be a positive integer");
    }
    config.workers = doc.at("workers").get<std::size_t>();
  }
  if (doc.contains("output_datatype")) {
    const auto& v = doc.at("output_datatype");
    if (v == "float32") {
      config.output_datatype = nifti::OutputDatatype::Float32;
    } else if (v == "float64") {
      config.output_datatype = nifti::OutputDatatype::Float64;
    } else {
      fail("'output_datatype' must be \"float32\" or \"float64\"");
    }
  }
  if (doc.contains("gzip_level")) {
    const auto& v = doc.at("gzip_level");
    if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 9) {
      fail("'gzip_level' must be an integer in [0, 9]");
    }
    config.gzip_level = v.get<int>();
  }
  if (doc.contains("pipeline")) {
    config.pipeline = parse_pipeline_config(doc.at("pipeline").dump());
  }
  config.seed = config.pipeline.seed;
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) fail("'seed' must be a non-negative integer");
    config.seed = doc.at("seed").get<std::uint64_t>();
  }
  config.pipeline.seed = config.seed;
  return config;
}

std::string serialize_run_config(const RunConfig& config) {
  PipelineConfig pipeline = config.pipeline;
  pipeline.seed = config.seed;
  const json doc{
      {"schema_version", kSchemaVersion},
      {"manifest", config.manifest},
      {"output_dir", config.output_dir},
      {"seed", config.seed},
      {"workers", config.workers},
      {"output_datatype",
       config.output_datatype == nifti::OutputDatatype::Float64 ? "float64" : "float32"},
      {"gzip_level", config.gzip_level},
      {"pipeline", json::parse(serialize_pipeline_config(pipeline))},
  };
  return doc.dump(2);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_run_config(text.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

}  // namespace lesionforge::cli
