#include "protctx/config.hpp"

#include <fstream>
#include <sstream>

namespace protctx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field \"") + key + "\" has the wrong type");
  }
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return empty;
  if (!it->is_object()) throw ConfigError(std::string("config section \"") + key + "\" must be an object");
  return *it;
}

std::optional<fs::path> path_field(const json& obj, const char* key, const fs::path& base) {
  auto s = get_or<std::string>(obj, key, "");
  if (s.empty()) return std::nullopt;
  fs::path p(s);
  return p.is_absolute() ? p : base / p;
}

BackendConfig backend_from(const json& obj, const fs::path& base) {
  BackendConfig b;
  const auto kind = get_or<std::string>(obj, "kind", "mock");
  if (kind == "mock") {
    b.kind = BackendKind::Mock;
  } else if (kind == "http") {
    b.kind = BackendKind::Http;
  } else {
    throw ConfigError("backend kind must be mock or http, got " + kind);
  }
  if (auto url = get_or<std::string>(obj, "endpoint_url", ""); !url.empty()) b.endpoint_url = url;
  if (auto m = get_or<std::string>(obj, "model_name", ""); !m.empty()) b.model_name = m;
  b.temperature = get_or(obj, "temperature", b.temperature);
  b.max_output_tokens = get_or(obj, "max_output_tokens", b.max_output_tokens);
  b.api_key_env_var = get_or(obj, "api_key_env_var", b.api_key_env_var);
  b.request_timeout_s = get_or(obj, "request_timeout", b.request_timeout_s);
  b.max_retries = get_or(obj, "max_retries", b.max_retries);
  b.retry_backoff_s = get_or(obj, "retry_backoff", b.retry_backoff_s);
  b.max_in_flight = get_or(obj, "max_in_flight", b.max_in_flight);
  if (auto p = path_field(obj, "fixtures", base)) b.mock_fixture_path = p->string();
  const auto miss = get_or<std::string>(obj, "on_fixture_miss", "echo");
  if (miss == "echo") {
    b.mock_miss = MockMissPolicy::Echo;
  } else if (miss == "error") {
    b.mock_miss = MockMissPolicy::Error;
  } else {
    throw ConfigError("on_fixture_miss must be echo or error");
  }
  return b;
}

}  // namespace

RunConfig RunConfig::from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  RunConfig c;
  const json& paths = section(doc, "paths");
  c.paths.fasta = path_field(paths, "fasta", base_dir);
  c.paths.annotation_db = path_field(paths, "annotation_db", base_dir);
  c.paths.go_tsv = path_field(paths, "go_tsv", base_dir);
  c.paths.blast_dir = path_field(paths, "blast_dir", base_dir);
  c.paths.interproscan_dir = path_field(paths, "interproscan_dir", base_dir);
  c.paths.protrek_dir = path_field(paths, "protrek_dir", base_dir);
  c.paths.dataset = path_field(paths, "dataset", base_dir);
  c.paths.train_fasta = path_field(paths, "train_fasta", base_dir);
  c.paths.train_clusters = path_field(paths, "train_clusters", base_dir);
  c.paths.cache_dir = path_field(paths, "cache_dir", base_dir);
  if (auto out = path_field(paths, "out_dir", base_dir)) c.paths.out_dir = *out;

  try {
    c.mode = parse_prompt_mode(get_or<std::string>(doc, "mode", "context_only"));
    const json& policy = section(doc, "policy");
    c.policy.protrek_mode =
        parse_protrek_mode(get_or<std::string>(policy, "protrek_mode", "conditional"));
    c.policy.include_pfam = get_or(policy, "include_pfam", c.policy.include_pfam);
    c.policy.include_go = get_or(policy, "include_go", c.policy.include_go);
    c.policy.max_protrek_hits = get_or(policy, "max_protrek_hits", c.policy.max_protrek_hits);
    c.policy.sparse_entry_threshold =
        get_or(policy, "sparse_entry_threshold", c.policy.sparse_entry_threshold);

    const json& ds = section(doc, "dataset");
    c.dataset.hardness = get_or(ds, "hardness", c.dataset.hardness);
    c.dataset.cluster_threshold = get_or(ds, "cluster_threshold", c.dataset.cluster_threshold);
    c.dataset.theta = get_or(ds, "theta", c.dataset.theta);
    const auto target = get_or<std::string>(ds, "hardness_target", "representatives");
    if (target == "representatives") {
      c.dataset.target = HardnessTarget::Representatives;
    } else if (target == "all_members") {
      c.dataset.target = HardnessTarget::AllMembers;
    } else {
      throw ConfigError("hardness_target must be representatives or all_members");
    }
    if (auto ts = ds.find("time_split"); ts != ds.end() && !ts->is_null()) {
      TimeSplitOptions t;
      t.per_year = get_or(*ts, "per_year", t.per_year);
      t.first_year = get_or(*ts, "first_year", t.first_year);
      t.last_year = get_or(*ts, "last_year", t.last_year);
      c.dataset.time_split = t;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const json& align = section(doc, "alignment");
  c.alignment.match = get_or(align, "match", c.alignment.match);
  c.alignment.mismatch = get_or(align, "mismatch", c.alignment.mismatch);
  c.alignment.gap = get_or(align, "gap", c.alignment.gap);

  c.answer_backend = backend_from(section(doc, "answer_backend"), base_dir);
  c.judge_backend = backend_from(section(doc, "judge_backend"), base_dir);
  if (auto cap = doc.find("max_identity_cap"); cap != doc.end() && !cap->is_null()) {
    c.max_identity_cap = get_or(doc, "max_identity_cap", 1.0);
  }
  c.workers = get_or(doc, "workers", c.workers);
  c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
  if (c.dataset.time_split) c.dataset.time_split->seed = c.seed;
  return c;
}

RunConfig RunConfig::load(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + file.string());
  return from_json(doc, file.parent_path());
}

void RunConfig::validate() const {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  try {
    policy.validate();
    alignment.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  answer_backend.validate();
  judge_backend.validate();
  if (max_identity_cap && (*max_identity_cap < 0.0 || *max_identity_cap > 1.0)) {
    throw ConfigError("max_identity_cap must lie in [0, 1]");
  }
  if (!(dataset.cluster_threshold > 0.0 && dataset.cluster_threshold <= 1.0)) {
    throw ConfigError("cluster_threshold must lie in (0, 1]");
  }
  if (dataset.theta < 0.0 || dataset.theta > 1.0) throw ConfigError("theta must lie in [0, 1]");
  if (dataset.time_split && dataset.time_split->per_year < 0) {
    throw ConfigError("time_split.per_year must be >= 0");
  }

  auto must_exist = [](const std::optional<fs::path>& p, const char* name, bool dir) {
    if (!p) return;
    std::error_code ec;
    const bool ok = dir ? fs::is_directory(*p, ec) : fs::is_regular_file(*p, ec);
    if (!ok) throw ConfigError(std::string(name) + " does not exist: " + p->string());
  };
  must_exist(paths.fasta, "paths.fasta", false);
  must_exist(paths.annotation_db, "paths.annotation_db", false);
  must_exist(paths.go_tsv, "paths.go_tsv", false);
  must_exist(paths.blast_dir, "paths.blast_dir", true);
  must_exist(paths.interproscan_dir, "paths.interproscan_dir", true);
  must_exist(paths.protrek_dir, "paths.protrek_dir", true);
  must_exist(paths.dataset, "paths.dataset", false);
  must_exist(paths.train_fasta, "paths.train_fasta", false);
  must_exist(paths.train_clusters, "paths.train_clusters", false);
  for (const auto* b : {&answer_backend, &judge_backend}) {
    if (b->mock_fixture_path) {
      must_exist(fs::path(*b->mock_fixture_path), "backend fixtures", false);
    }
  }
}

}  // namespace protctx
