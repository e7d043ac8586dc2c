#include "protctx/pipeline.hpp"

#include "protctx/dataset.hpp"
#include "protctx/hash.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace protctx {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

std::string read_optional(const std::optional<fs::path>& dir, const std::string& name) {
  if (!dir) return {};
  const fs::path p = *dir / name;
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) return {};
  return read_file(p);
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (threads <= 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(loop);
}

constexpr std::string_view kContextKind = "context";

}  // namespace

// ---- ContextBuilder ----------------------------------------------------------

ContextBuilder::ContextBuilder(const RunConfig& config)
    : paths_(config.paths), cap_(config.max_identity_cap) {
  if (!paths_.fasta) throw ConfigError("paths.fasta is required");
  const std::string fasta = read_file(*paths_.fasta);
  records_ = parse_fasta(fasta, DuplicatePolicy::Strict, paths_.fasta->string());
  for (std::size_t i = 0; i < records_.size(); ++i) by_accession_.emplace(records_[i].accession, i);

  std::string db_text;
  std::string go_text;
  if (paths_.annotation_db) {
    db_text = read_file(*paths_.annotation_db);
    db_ = parse_annotation_db(db_text, paths_.annotation_db->string());
  }
  if (paths_.go_tsv) {
    go_text = read_file(*paths_.go_tsv);
    go_ = parse_go_tsv(go_text, paths_.go_tsv->string());
  }
  inputs_digest_ = sha256_hex(db_text) + sha256_hex(go_text);
  if (paths_.cache_dir) cache_.emplace(*paths_.cache_dir);
}

const ProteinRecord* ContextBuilder::record(std::string_view accession) const {
  auto it = by_accession_.find(std::string(accession));
  return it == by_accession_.end() ? nullptr : &records_[it->second];
}

ContextBuilder::EvidenceText ContextBuilder::read_evidence(const std::string& accession) const {
  return {read_optional(paths_.blast_dir, accession + ".tsv"),
          read_optional(paths_.interproscan_dir, accession + ".tsv"),
          read_optional(paths_.protrek_dir, accession + ".jsonl")};
}

std::string ContextBuilder::cache_input(const std::string& accession,
                                        const ContextPolicy& policy) const {
  const ProteinRecord* rec = record(accession);
  const EvidenceText ev = read_evidence(accession);
  std::string in;
  auto field = [&in](std::string_view s) {
    in += std::to_string(s.size());
    in += ':';
    in += s;
    in += '\n';
  };
  field(kPromptTemplateVersion);
  field(policy.fingerprint_text());
  field(cap_ ? std::to_string(*cap_) : "none");
  field(accession);
  field(rec ? rec->sequence : "");
  field(inputs_digest_);
  field(ev.blast);
  field(ev.interproscan);
  field(ev.protrek);
  return in;
}

std::optional<BuiltContext> ContextBuilder::build(const std::string& accession,
                                                  const ContextPolicy& policy) const {
  const ProteinRecord* rec = record(accession);
  if (!rec) return std::nullopt;

  std::string key_input;
  if (cache_) {
    key_input = cache_input(accession, policy);
    if (auto hit = cache_->get(kContextKind, key_input)) {
      BuiltContext built = context_from_json(*hit);
      built.cache_hit = true;
      return built;
    }
  }

  const EvidenceText ev = read_evidence(accession);
  const auto blast = parse_blast_tab(ev.blast, accession + ".tsv (blast)");
  const auto domains =
      parse_interproscan_tsv(ev.interproscan, {}, accession + ".tsv (interproscan)");
  const auto protrek = load_protrek_results(ev.protrek, accession + ".jsonl (protrek)");
  const EvidenceProfile profile = build_profile(*rec, blast, domains, protrek, db_, go_, cap_);

  BuiltContext built;
  built.context = construct_context(profile, policy);
  built.provenance = profile.provenance_notes;
  if (cache_) cache_->put(kContextKind, key_input, context_to_json(built));
  return built;
}

std::string context_to_json(const BuiltContext& built) {
  ojson j;
  j["pfam"] = built.context.pfam_entries;
  ojson go = ojson::array();
  for (const auto& g : built.context.go_entries) {
    go.push_back({{"id", g.id}, {"name", g.name}, {"definition", g.definition}});
  }
  j["go"] = go;
  j["protrek"] = built.context.protrek_entries;
  j["fallback_active"] = built.context.fallback_active;
  j["provenance"] = built.provenance;
  return j.dump();
}

BuiltContext context_from_json(std::string_view text) {
  BuiltContext b;
  try {
    const auto j = nlohmann::json::parse(text);
    b.context.pfam_entries = j.at("pfam").get<std::vector<std::string>>();
    for (const auto& g : j.at("go")) {
      b.context.go_entries.push_back({g.at("id").get<std::string>(),
                                      g.at("name").get<std::string>(),
                                      g.at("definition").get<std::string>()});
    }
    b.context.protrek_entries = j.at("protrek").get<std::vector<std::string>>();
    b.context.fallback_active = j.at("fallback_active").get<bool>();
    b.provenance = j.at("provenance").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("corrupt cached context: ") + e.what());
  }
  return b;
}

// ---- evidence source / cached backend ----------------------------------------

std::optional<Context> FileEvidenceSource::context_for(const std::string& accession,
                                                       const ContextPolicy& policy) {
  auto built = builder_.build(accession, policy);
  if (!built) return std::nullopt;
  return std::move(built->context);
}

std::optional<ProteinRecord> FileEvidenceSource::sequence_for(const std::string& accession) {
  const ProteinRecord* rec = builder_.record(accession);
  if (!rec) return std::nullopt;
  return *rec;
}

CachedBackend::CachedBackend(std::unique_ptr<Backend> inner, ContentCache cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

Exchange CachedBackend::complete(const PromptText& prompt) {
  const std::string kind = "llm/" + std::string(kPromptTemplateVersion);
  std::string input = inner_->id();
  input += '\0';
  input += prompt.text;
  if (auto hit = cache_.get(kind, input)) {
    Exchange ex;
    ex.prompt_digest = prompt_digest(prompt.text);
    ex.response_text = std::move(*hit);
    ex.backend_id = inner_->id();
    ex.cache_hit = true;
    return ex;
  }
  Exchange ex = inner_->complete(prompt);
  cache_.put(kind, input, ex.response_text);
  return ex;
}

// ---- subcommands -------------------------------------------------------------

int cmd_context(const RunConfig& config) {
  config.validate();
  const ContextBuilder builder(config);
  const auto& records = builder.records();

  struct Row {
    std::optional<BuiltContext> built;
    std::string error;
  };
  std::vector<Row> rows(records.size());
  parallel_for(records.size(), config.workers, [&](std::size_t i) {
    try {
      rows[i].built = builder.build(records[i].accession, config.policy);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });

  const fs::path ctx_dir = config.paths.out_dir / "contexts";
  fs::create_directories(ctx_dir);
  std::string manifest;
  std::size_t errors = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string& acc = records[i].accession;
    ojson j;
    j["accession"] = acc;
    if (!rows[i].built) {
      ++errors;
      spdlog::error("{}: {}", acc, rows[i].error);
      j["error"] = rows[i].error;
      manifest += j.dump() + "\n";
      continue;
    }
    const BuiltContext& b = *rows[i].built;
    hits += b.cache_hit ? 1 : 0;
    std::string text = render_context(b.context);
    if (text.empty()) text = std::string(kEmptyContextNote) + "\n";
    write_file(ctx_dir / (acc + ".txt"), text);

    ojson sections = ojson::array();
    if (!b.context.pfam_entries.empty()) sections.push_back("pfam");
    if (!b.context.go_entries.empty()) sections.push_back("go");
    if (!b.context.protrek_entries.empty()) sections.push_back("protrek");
    j["fingerprint"] = context_fingerprint(b.context);
    j["sections"] = sections;
    j["fallback_active"] = b.context.fallback_active;
    j["provenance"] = b.provenance;
    manifest += j.dump() + "\n";
  }
  write_file(config.paths.out_dir / "context_manifest.jsonl", manifest);
  spdlog::info("contexts: {} built, {} errors, {} cache hits", records.size() - errors, errors,
               hits);
  return errors > 0 ? kExitItemFailures : kExitClean;
}

namespace {

std::unique_ptr<Backend> backend_for(const BackendConfig& cfg,
                                     const std::optional<fs::path>& cache_dir) {
  auto inner = make_backend(cfg);
  if (!cache_dir) return inner;
  return std::make_unique<CachedBackend>(std::move(inner), ContentCache(*cache_dir / "llm"));
}

}  // namespace

int cmd_bench(const RunConfig& config) {
  config.validate();
  if (!config.paths.dataset) throw ConfigError("paths.dataset is required for bench");
  const auto items = from_jsonl(read_file(*config.paths.dataset), config.paths.dataset->string());
  const ContextBuilder builder(config);
  FileEvidenceSource evidence(builder);
  auto answer = backend_for(config.answer_backend, config.paths.cache_dir);
  auto judge = backend_for(config.judge_backend, config.paths.cache_dir);

  BenchSettings settings{config.mode, config.policy, config.workers};
  const BenchOutcome outcome = run_benchmark(items, settings, *answer, *judge, evidence);

  const fs::path& out = config.paths.out_dir;
  write_file(out / "bench_results.jsonl", bench_records_jsonl(outcome.records));
  write_file(out / "score_report.json",
             score_report_json(outcome.report, settings, answer->id(), judge->id(),
                               config.judge_backend.temperature));
  write_file(out / "score_report.txt", score_report_table(outcome.report));
  for (const auto& r : outcome.records) {
    if (!r.failure.empty()) spdlog::warn("{}: {}", r.item_id, r.failure);
  }
  spdlog::info("bench: {} items, {} failures", outcome.report.n_items, outcome.report.n_failures);
  return outcome.report.n_failures > 0 ? kExitItemFailures : kExitClean;
}

int cmd_ec_eval(const fs::path& predictions, const fs::path& gold, const fs::path& out_dir) {
  const auto pred = parse_ec_table(read_file(predictions), predictions.string());
  const auto truth = parse_ec_table(read_file(gold), gold.string());
  std::vector<ECSet> p;
  std::vector<ECSet> g;
  for (const auto& [id, set] : truth) {
    auto it = pred.find(id);
    if (it == pred.end()) throw Error("item " + id + " has no prediction");
    g.push_back(set);
    p.push_back(it->second);
  }
  for (const auto& [id, set] : pred) {
    if (!truth.contains(id)) throw Error("item " + id + " has no gold annotation");
  }

  std::string table = "level      tp      fp      fn  precision  recall      f1\n";
  std::string jsonl;
  char line[128];
  for (int level = 1; level <= 4; ++level) {
    const LevelMetrics m = micro_prf(p, g, level);
    std::snprintf(line, sizeof line, "%5d %7llu %7llu %7llu  %9.4f  %6.4f  %6.4f\n", level,
                  static_cast<unsigned long long>(m.tp), static_cast<unsigned long long>(m.fp),
                  static_cast<unsigned long long>(m.fn), m.precision, m.recall, m.f1);
    table += line;
    ojson j;
    j["level"] = m.level;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["fn"] = m.fn;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    jsonl += j.dump() + "\n";
  }
  write_file(out_dir / "ec_report.txt", table);
  write_file(out_dir / "ec_report.jsonl", jsonl);
  std::fputs(table.c_str(), stdout);
  return kExitClean;
}

int cmd_cluster_eval(const fs::path& embeddings, const fs::path& truth, DistanceMetric metric,
                     const fs::path& out_dir) {
  const auto emb = load_embeddings(read_file(embeddings), embeddings.string());
  const auto labels = parse_labeling(read_file(truth), truth.string());
  ARIReport report;
  try {
    report = ari_report(emb, labels, metric);
  } catch (const std::invalid_argument& e) {
    throw Error(e.what());
  }
  ojson j;
  j["k"] = report.k;
  j["ari"] = report.ari;
  j["linkage"] = to_string(report.linkage);
  j["metric"] = to_string(report.metric);
  j["n"] = report.n;
  char line[160];
  std::snprintf(line, sizeof line, "k=%zu n=%zu linkage=%s metric=%s ari=%.6f\n", report.k,
                report.n, std::string(to_string(report.linkage)).c_str(),
                std::string(to_string(report.metric)).c_str(), report.ari);
  write_file(out_dir / "ari_report.json", j.dump() + "\n");
  write_file(out_dir / "ari_report.txt", line);
  std::fputs(line, stdout);
  return kExitClean;
}

int cmd_dataset(const RunConfig& config) {
  config.validate();
  if (!config.paths.annotation_db) throw ConfigError("paths.annotation_db is required for dataset");
  const AnnotationDB db =
      parse_annotation_db(read_file(*config.paths.annotation_db),
                          config.paths.annotation_db->string());
  auto items = build_items(db);

  if (config.dataset.time_split) {
    TimeSplitOptions opts = *config.dataset.time_split;
    opts.seed = config.seed;
    const auto sample = time_split_sample(db, opts);
    const std::set<std::string> keep(sample.begin(), sample.end());
    std::erase_if(items, [&](const BenchmarkItem& it) { return !keep.contains(it.accession); });
  }

  if (config.dataset.hardness) {
    if (!config.paths.train_fasta) throw ConfigError("paths.train_fasta is required for hardness");
    if (!config.paths.fasta) throw ConfigError("paths.fasta is required for hardness");
    const auto train = parse_fasta(read_file(*config.paths.train_fasta), DuplicatePolicy::Strict,
                                   config.paths.train_fasta->string());
    const auto tests = parse_fasta(read_file(*config.paths.fasta), DuplicatePolicy::Strict,
                                   config.paths.fasta->string());
    const ClusterSet clusters =
        config.paths.train_clusters
            ? load_cluster_tsv(read_file(*config.paths.train_clusters),
                               config.dataset.cluster_threshold,
                               config.paths.train_clusters->string())
            : greedy_cluster(train, config.dataset.cluster_threshold, config.alignment);
    const TrainingReference reference(train, clusters, config.dataset.target);
    attach_hardness(items, tests, reference, config.dataset.theta, config.alignment);
  }

  write_file(config.paths.out_dir / "dataset.jsonl", to_jsonl(items));
  spdlog::info("dataset: {} items", items.size());
  return kExitClean;
}

}  // namespace protctx
