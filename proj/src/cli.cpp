#include "selectkit/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "selectkit/activation.hpp"
#include "selectkit/causal_tracing.hpp"
#include "selectkit/coherence.hpp"
#include "selectkit/embeddings.hpp"
#include "selectkit/erasure.hpp"
#include "selectkit/errors.hpp"
#include "selectkit/fixture_backend.hpp"
#include "selectkit/io.hpp"
#include "selectkit/list_completer.hpp"
#include "selectkit/metrics.hpp"
#include "selectkit/ngram.hpp"
#include "selectkit/prompts.hpp"
#include "selectkit/run_record.hpp"
#include "selectkit/selection.hpp"
#include "selectkit/text.hpp"

namespace selectkit {

namespace {

using nlohmann::json;

class UsageError : public Error {
 public:
  using Error::Error;
};

// Flag value if the flag was given, else the config value, else the default
// already stored in `flag_value`.
template <typename T>
T pick(const CLI::Option* opt, const T& flag_value, const json& cfg, const char* key) {
  if (opt->count() > 0) return flag_value;
  if (cfg.contains(key) && !cfg.at(key).is_null()) {
    try {
      return cfg.at(key).get<T>();
    } catch (const json::exception&) {
      throw UsageError(std::string("config key \"") + key + "\" has the wrong type");
    }
  }
  return flag_value;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    auto t = trim(cur);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    auto j = json::parse(read_file(path));
    if (!j.is_object()) throw UsageError("config must be a JSON object: " + path);
    return j;
  } catch (const json::exception& e) {
    throw UsageError("invalid config " + path + ": " + e.what());
  }
}

std::string cache_dir_default(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SELECT_CACHE_DIR"); env && *env) return env;
  return ".select-cache";
}

struct BackendFlags {
  std::string backend = "ngram";
  std::string corpus;
  std::string fixture;
  std::string candidates;
  std::string related_words;
  std::string cache_dir;
  std::string model = "default";
  CLI::Option* backend_opt = nullptr;
  CLI::Option* corpus_opt = nullptr;
  CLI::Option* fixture_opt = nullptr;
  CLI::Option* candidates_opt = nullptr;
  CLI::Option* related_opt = nullptr;
  CLI::Option* model_opt = nullptr;

  void add_to(CLI::App* app) {
    backend_opt = app->add_option("--backend", backend, "ngram, http or fixture")
                      ->check(CLI::IsMember({"ngram", "http", "fixture"}));
    corpus_opt = app->add_option("--corpus", corpus, "Training text for the n-gram backend");
    fixture_opt = app->add_option("--fixture", fixture, "Fixture backend JSON");
    candidates_opt = app->add_option("--candidates", candidates, "Candidate names, one per line");
    related_opt = app->add_option("--related-words", related_words, "Related words, one per line");
    app->add_option("--cache-dir", cache_dir, "Response cache for --backend http");
    model_opt = app->add_option("--model", model, "Model id sent to the http backend");
  }

  void merge(const json& cfg) {
    backend = pick(backend_opt, backend, cfg, "backend");
    corpus = pick(corpus_opt, corpus, cfg, "corpus");
    fixture = pick(fixture_opt, fixture, cfg, "fixture");
    candidates = pick(candidates_opt, candidates, cfg, "candidates");
    related_words = pick(related_opt, related_words, cfg, "related_words");
    model = pick(model_opt, model, cfg, "model");
    if (backend != "ngram" && backend != "http" && backend != "fixture") {
      throw UsageError("unknown backend: " + backend);
    }
  }

  void snapshot(json& j) const {
    j["backend"] = backend;
    if (!corpus.empty()) j["corpus"] = corpus;
    if (!fixture.empty()) j["fixture"] = fixture;
    if (!candidates.empty()) j["candidates"] = candidates;
    if (!related_words.empty()) j["related_words"] = related_words;
    if (backend == "http") j["model"] = model;
  }
};

struct BackendSet {
  std::shared_ptr<const ScoringBackend> scorer;
  std::shared_ptr<const ScoringBackend> completer;
  std::shared_ptr<ResponseCache> cache;
  std::string identity;
  bool lists_only = false;  // completer cannot write context templates

  Backends view() const { return {completer.get(), scorer.get(), scorer.get()}; }
};

BackendSet make_backends(const BackendFlags& f, const CliHooks& hooks, std::size_t max_items) {
  BackendSet set;
  std::optional<std::vector<std::string>> cands;
  std::optional<std::vector<std::string>> words;
  if (!f.candidates.empty()) cands = read_list_file(f.candidates);
  if (!f.related_words.empty()) words = read_list_file(f.related_words);

  std::shared_ptr<const NGramModel> model;
  if (f.backend == "ngram") {
    if (f.corpus.empty()) throw UsageError("--backend ngram needs --corpus");
    model = std::make_shared<const NGramModel>(train_ngram(read_file(f.corpus)));
    set.scorer = std::make_shared<NGramBackend>(model);
    set.lists_only = true;
  } else if (f.backend == "fixture") {
    if (f.fixture.empty()) throw UsageError("--backend fixture needs --fixture");
    set.scorer = std::make_shared<FixtureBackend>(FixtureBackend::load(f.fixture));
  } else {
    auto cfg = RemoteBackendConfig::from_env();
    cfg.model_id = f.model;
    set.cache = std::make_shared<ResponseCache>(std::filesystem::path(cache_dir_default(f.cache_dir)));
    auto transport = hooks.transport ? hooks.transport : std::make_shared<HttpTransport>();
    set.scorer = std::make_shared<RemoteBackend>(cfg, transport, set.cache);
  }

  if (model || cands || words) {
    set.completer = std::make_shared<ListCompleter>(cands, words, model, max_items,
                                                    model ? nullptr : set.scorer);
  } else {
    set.completer = set.scorer;
  }
  set.identity = set.scorer->identity();
  if (set.completer != set.scorer) set.identity += "|" + set.completer->identity();
  return set;
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------- mine

struct MineFlags {
  BackendFlags backend;
  std::string target;
  std::string category = "general";
  std::string config;
  std::string out;
  std::string hierarchy;
  std::string prompts_dir;
  std::uint64_t seed = 0;
  double uc_threshold = 1.0;
  int top_k = 3;
  int threads = 1;
  int num_candidates = 8;
  int num_related_words = 8;
  int num_templates = -1;
  bool strict_hierarchy = false;
  std::map<std::string, CLI::Option*> opts;
};

int cmd_mine(MineFlags& f, CLI::App* app, const CliHooks& hooks, std::ostream& out,
             std::ostream& err) {
  const auto cfg = read_config(f.config);
  f.backend.merge(cfg);
  f.target = pick(f.opts["target"], f.target, cfg, "target");
  if (trim(f.target).empty()) {
    err << "error: --target is required\n" << app->help();
    return 1;
  }
  f.category = pick(f.opts["category"], f.category, cfg, "category");
  f.hierarchy = pick(f.opts["hierarchy"], f.hierarchy, cfg, "hierarchy");
  f.prompts_dir = pick(f.opts["prompts_dir"], f.prompts_dir, cfg, "prompts_dir");
  f.seed = pick(f.opts["seed"], f.seed, cfg, "seed");
  f.uc_threshold = pick(f.opts["uc_threshold"], f.uc_threshold, cfg, "uc_threshold");
  f.top_k = pick(f.opts["top_k"], f.top_k, cfg, "top_k");
  f.threads = pick(f.opts["threads"], f.threads, cfg, "threads");
  f.num_candidates = pick(f.opts["num_candidates"], f.num_candidates, cfg, "num_candidates");
  f.num_related_words = pick(f.opts["num_related_words"], f.num_related_words, cfg, "num_related_words");
  f.num_templates = pick(f.opts["num_templates"], f.num_templates, cfg, "num_related_templates");
  f.strict_hierarchy = pick(f.opts["strict_hierarchy"], f.strict_hierarchy, cfg, "strict_hierarchy");

  Category category;
  try {
    category = parse_category(f.category);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto max_items = static_cast<std::size_t>(std::max(f.num_candidates, f.num_related_words));
  const auto backends = make_backends(f.backend, hooks, max_items);

  MiningConfig mc;
  mc.generation.category = category;
  mc.generation.num_candidates = f.num_candidates;
  mc.generation.num_related_words = f.num_related_words;
  mc.generation.num_related_templates =
      f.num_templates >= 0 ? f.num_templates : (backends.lists_only ? 0 : 6);
  mc.generation.require_hierarchy_siblings = f.strict_hierarchy;
  mc.policy.uc_threshold = f.uc_threshold;
  mc.policy.stage1_top_k = f.top_k;
  mc.threads = f.threads;
  try {
    mc.validate();
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }

  ConceptHierarchy hierarchy;
  if (!f.hierarchy.empty()) hierarchy = load_hierarchy(f.hierarchy);
  std::optional<PromptLibrary> prompts;
  if (!f.prompts_dir.empty()) prompts = PromptLibrary::with_overrides(f.prompts_dir);

  CandidateContext ctx;
  ctx.hierarchy = &hierarchy;
  ctx.prompts = prompts ? &*prompts : nullptr;
  ctx.provenance = !f.backend.candidates.empty() ? Provenance::user_supplied
                   : f.backend.backend == "fixture" ? Provenance::fixture
                                                    : Provenance::llm_generated;

  const Concept target(trim(f.target), category);
  auto result = mine_anchor(target, mc, backends.view(), ctx);
  for (const auto& t : result.timing) err << "[mine] " << t.phase << ' ' << t.ms << " ms\n";

  json snapshot{{"target", target.name()},
                {"category", std::string(to_string(category))},
                {"seed", f.seed},
                {"uc_threshold", f.uc_threshold},
                {"top_k", f.top_k},
                {"num_candidates", f.num_candidates},
                {"num_related_words", f.num_related_words},
                {"num_related_templates", mc.generation.num_related_templates},
                {"strict_hierarchy", f.strict_hierarchy}};
  if (!f.hierarchy.empty()) snapshot["hierarchy"] = f.hierarchy;
  if (!f.prompts_dir.empty()) snapshot["prompts_dir"] = f.prompts_dir;
  f.backend.snapshot(snapshot);

  CacheStats stats;
  if (backends.cache) stats = {backends.cache->hits(), backends.cache->misses()};
  const auto timing = result.timing;
  const auto record = make_run_record(snapshot, backends.identity, std::move(result), stats);

  if (f.out.empty()) {
    out << serialize_run_record(record);
    return 0;
  }
  write_run_record_file(record, f.out);
  write_run_meta(f.out, timing);
  std::vector<std::string> retain;
  for (const auto& c : record.result.retain_set) retain.push_back(c.name());
  out << "optimal_anchor: " << record.result.optimal_anchor.name() << '\n'
      << "retain_set: " << join(retain, ", ") << '\n'
      << "run_id: " << record.run_id << '\n'
      << "record: " << f.out << '\n';
  return 0;
}

// ---------------------------------------------------------------- score

struct ScoreFlags {
  BackendFlags backend;
  std::string target;
  std::string anchor;
  std::string category = "general";
  std::string words;
  std::string templates;
  std::string prompts;
  double rc = -1.0;
  double nc = -1.0;
  CLI::Option* rc_opt = nullptr;
  CLI::Option* nc_opt = nullptr;
};

std::vector<RelatedWord> score_words(ScoreFlags& f, const BackendSet& b, const Concept& target) {
  if (!f.words.empty()) {
    std::vector<RelatedWord> out;
    for (auto& w : split_list(f.words)) out.push_back({std::move(w), ""});
    return out;
  }
  GenerationConfig gc;
  gc.category = target.category();
  return generate_related_words(target, gc, *b.completer);
}

int cmd_score_activation(ScoreFlags& f, const CliHooks& hooks, std::ostream& out) {
  if (f.rc_opt->count() || f.nc_opt->count()) {
    if (!f.rc_opt->count() || !f.nc_opt->count()) throw UsageError("--rc and --nc go together");
    const auto c = crr_from_scores(f.rc, f.nc);
    print_json(out, {{"rc", c.related}, {"nc", c.neutral}, {"crr", c.ratio}, {"degenerate", c.degenerate}});
    return 0;
  }
  if (trim(f.target).empty()) throw UsageError("--target is required");
  f.backend.merge(json::object());
  const auto b = make_backends(f.backend, hooks, 8);
  const Concept target(trim(f.target), parse_category(f.category));
  const auto words = score_words(f, b, target);
  std::vector<MaskTemplate> templates;
  if (!f.templates.empty()) {
    for (const auto& t : read_list_file(f.templates)) templates.emplace_back(t);
  } else {
    for (const auto& t : seed_templates()) templates.emplace_back(t);
  }
  const auto report = activation_report(target, words, templates,
                                        concept_masked_prompts(templates, words), kNeutralTemplate,
                                        *b.scorer);
  json j{{"target", activation_to_json(report)}};
  if (!trim(f.anchor).empty()) {
    const Concept anchor(trim(f.anchor), target.category());
    const auto acts = word_activations(anchor, words, templates, *b.scorer);
    j["anchor"] = activation_to_json({anchor, acts, ws_from_activations(acts), std::nullopt});
    j["uc"] = uc_to_json(uc_from_activations(anchor, target, acts, report.per_word));
  }
  print_json(out, j);
  return 0;
}

int cmd_score_coherence(ScoreFlags& f, const CliHooks& hooks, std::ostream& out) {
  if (trim(f.target).empty() || trim(f.anchor).empty()) {
    throw UsageError("--target and --anchor are required");
  }
  f.backend.merge(json::object());
  const auto b = make_backends(f.backend, hooks, 8);
  const Category category = parse_category(f.category);
  const Concept target(trim(f.target), category);
  const Concept anchor(trim(f.anchor), category);
  std::vector<std::string> prompts;
  if (!f.prompts.empty()) {
    for (const auto& p : read_list_file(f.prompts)) {
      prompts.push_back(p.find(kConceptSlot) != std::string::npos ? replace_all(p, kConceptSlot, target.name())
                                                                  : p);
    }
  } else {
    prompts = coherence_prompts(coherence_templates(category), target);
  }
  print_json(out, coherence_to_json(cos_score(target, anchor, prompts, *b.scorer)));
  return 0;
}

// ---------------------------------------------------------------- erase

struct EraseFlags {
  std::string target;
  std::string anchor;
  std::string retain;
  std::string from_run;
  std::string weights;
  std::string embeddings;
  std::string out;
  std::string edited_out;
  int dim = 16;
  int d_out = 16;
  double lambda = 0.1;
  std::uint64_t seed = 0;
};

int cmd_erase(const EraseFlags& f, std::ostream& out) {
  std::string target = trim(f.target);
  std::string anchor = trim(f.anchor);
  std::vector<std::string> retain = split_list(f.retain);
  if (!f.from_run.empty()) {
    const auto rec = parse_run_record(read_file(f.from_run));
    target = rec.result.target.name();
    anchor = rec.result.optimal_anchor.name();
    retain.clear();
    for (const auto& c : rec.result.retain_set) retain.push_back(c.name());
  }
  if (target.empty() || anchor.empty()) throw UsageError("erase needs --target and --anchor, or --from-run");
  if (f.lambda < 0.0) throw UsageError("--lambda must be >= 0");

  const auto provider = f.embeddings.empty() ? EmbeddingProvider::hash_synthetic(f.dim, f.seed)
                                             : EmbeddingProvider::from_file(f.embeddings);
  EditProblem<double> p;
  p.W = f.weights.empty() ? random_normal_matrix(f.d_out, provider.dimension(), f.seed)
                          : read_matrix(f.weights);
  p.C1 = provider.stack({Concept(target)});
  p.Cstar = provider.stack({Concept(anchor)});
  std::vector<Concept> keep;
  for (const auto& r : retain) keep.emplace_back(r);
  p.C0 = provider.stack(keep);
  p.lambda = f.lambda;

  const auto sol = solve_closed_form(p);
  if (!f.out.empty()) write_matrix(f.out, sol.delta);
  if (!f.edited_out.empty()) write_matrix(f.edited_out, apply_edit(p.W, sol.delta));
  print_json(out, {{"target", target},
                   {"anchor", anchor},
                   {"retain", retain},
                   {"lambda", p.lambda},
                   {"e1", sol.e1},
                   {"e0", sol.e0},
                   {"total_loss", sol.total_loss},
                   {"conditioning", sol.conditioning},
                   {"rank", sol.rank},
                   {"delta_norm", sol.delta.norm()}});
  return 0;
}

// ---------------------------------------------------------------- trace

struct TraceFlags {
  std::string planted;
  std::string base;
  std::string edited;
  std::string concepts = "concept";
  std::string prompts;
  std::string heatmap;
  std::string embeddings;
  int layers = 8;
  int dim = 16;
  int threads = 1;
  std::uint64_t seed = 0;
  CLI::Option* planted_opt = nullptr;
};

int cmd_trace(const TraceFlags& f, std::ostream& out) {
  const bool planted_mode = f.planted_opt->count() > 0;
  const bool file_mode = !f.base.empty() || !f.edited.empty();
  if (planted_mode == file_mode) throw UsageError("trace needs either --planted or --base and --edited");
  if (file_mode && (f.base.empty() || f.edited.empty())) throw UsageError("--base and --edited go together");

  const auto concept_names = split_list(f.concepts);
  if (concept_names.empty()) throw UsageError("--concept is empty");
  std::vector<std::string> prompt_templates{"a photo of a {C}", "a painting of a {C}",
                                            "a {C} in the street"};
  if (!f.prompts.empty()) prompt_templates = read_list_file(f.prompts);

  std::vector<HeatmapRow> rows;
  json results = json::array();
  for (const auto& name : concept_names) {
    const Concept subject(name);
    std::vector<std::string> prompts;
    for (const auto& t : prompt_templates) prompts.push_back(replace_all(t, kConceptSlot, subject.name()));

    ContributionVector cv;
    if (planted_mode) {
      std::set<int> planted;
      for (const auto& s : split_list(f.planted)) {
        try {
          planted.insert(std::stoi(s));
        } catch (const std::exception&) {
          throw UsageError("--planted expects comma-separated layer indices");
        }
      }
      const auto m = make_planted_model(f.layers, planted, f.seed, f.dim);
      cv = trace_layers(m.base, m.edited, m.scorer, subject, prompts, f.threads);
    } else {
      LayeredModel base{read_layers(f.base), {}};
      LayeredModel edited{read_layers(f.edited), {}};
      const int dim = residual_linear_dim(base.layers);
      base.forward = residual_linear_forward(dim, f.seed);
      edited.forward = base.forward;
      const auto provider = f.embeddings.empty() ? EmbeddingProvider::hash_synthetic(dim, f.seed)
                                                 : EmbeddingProvider::from_file(f.embeddings);
      cv = trace_layers(base, edited, direction_scorer(provider.embed(subject)), subject, prompts,
                        f.threads);
    }
    json layers = json::array();
    for (const auto& l : cv.per_layer) {
      layers.push_back({{"layer", l.layer}, {"raw", l.raw}, {"normalized", l.normalized}});
    }
    results.push_back({{"concept", subject.name()}, {"layers", layers},
                       {"argmax", cv.per_layer[cv.argmax()].layer}});
    rows.push_back({subject.name(), std::move(cv)});
  }
  if (!f.heatmap.empty()) write_file_atomic(f.heatmap, heatmap_csv(rows));
  print_json(out, results);
  return 0;
}

// ---------------------------------------------------------------- report

struct ReportFlags {
  std::string in;
  std::string scale = "detect";
  std::string format = "csv";
  std::string out;
  bool fraction = false;
};

int cmd_report(const ReportFlags& f, std::ostream& out) {
  const Scale scale = f.scale == "percent" ? Scale::percent
                      : f.scale == "fraction" ? Scale::fraction
                                              : Scale::detect;
  const auto report = summarize_run(load_records(f.in, scale));
  const std::string text = f.format == "json" ? report_to_json(report, !f.fraction).dump(2) + "\n"
                                              : report_to_csv(report, !f.fraction);
  if (!f.out.empty()) write_file_atomic(f.out, text);
  out << text;
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const CliHooks& hooks) {
  CLI::App app{"Anchor mining, closed-form concept edits, layer tracing and reports", "select"};
  app.require_subcommand(1);

  MineFlags mine;
  auto* mine_cmd = app.add_subcommand("mine", "Pick an anchor concept and retain set for a target");
  mine.opts["target"] = mine_cmd->add_option("--target", mine.target, "Concept to erase");
  mine.opts["category"] = mine_cmd->add_option("--category", mine.category,
                                               "general, instance, celebrity, artist_style or nsfw");
  mine.backend.add_to(mine_cmd);
  mine_cmd->add_option("--config", mine.config, "JSON config; flags override it");
  mine_cmd->add_option("--out", mine.out, "Run record path; prints to stdout when absent");
  mine.opts["seed"] = mine_cmd->add_option("--seed", mine.seed, "Recorded in the run config");
  mine.opts["uc_threshold"] = mine_cmd->add_option("--uc-threshold", mine.uc_threshold, "Stage I U_c cutoff");
  mine.opts["top_k"] = mine_cmd->add_option("--top-k", mine.top_k, "Stage I survivors");
  mine.opts["hierarchy"] = mine_cmd->add_option("--hierarchy", mine.hierarchy, "child -> parent JSON");
  mine.opts["prompts_dir"] = mine_cmd->add_option("--prompts-dir", mine.prompts_dir, "Prompt overrides");
  mine.opts["threads"] = mine_cmd->add_option("--threads", mine.threads, "Scoring threads");
  mine.opts["num_candidates"] = mine_cmd->add_option("--num-candidates", mine.num_candidates);
  mine.opts["num_related_words"] = mine_cmd->add_option("--num-related-words", mine.num_related_words);
  mine.opts["num_templates"] = mine_cmd->add_option(
      "--num-templates", mine.num_templates, "Generated context templates (default 6, 0 for ngram)");
  mine.opts["strict_hierarchy"] = mine_cmd->add_flag(
      "--strict-hierarchy", mine.strict_hierarchy, "Reject candidates the hierarchy does not know");

  ScoreFlags score;
  auto* score_cmd = app.add_subcommand("score", "Score a single metric");
  score_cmd->require_subcommand(1);
  auto* act_cmd = score_cmd->add_subcommand("activation", "W_s, CRR and optionally U_c");
  auto* coh_cmd = score_cmd->add_subcommand("coherence", "CoS of an anchor substitution");
  for (auto* c : {act_cmd, coh_cmd}) {
    c->add_option("--target", score.target);
    c->add_option("--anchor", score.anchor);
    c->add_option("--category", score.category);
    score.backend.add_to(c);
  }
  act_cmd->add_option("--words", score.words, "Comma-separated related words");
  act_cmd->add_option("--templates", score.templates, "Mask templates, one per line");
  score.rc_opt = act_cmd->add_option("--rc", score.rc, "Related-context activation");
  score.nc_opt = act_cmd->add_option("--nc", score.nc, "Neutral-context activation");
  coh_cmd->add_option("--prompts", score.prompts, "Prompts, one per line ({C} or the target name)");

  EraseFlags erase;
  auto* erase_cmd = app.add_subcommand("erase", "Closed-form edit of a projection matrix");
  erase_cmd->add_option("--target", erase.target);
  erase_cmd->add_option("--anchor", erase.anchor);
  erase_cmd->add_option("--retain", erase.retain, "Comma-separated retain concepts");
  erase_cmd->add_option("--from-run", erase.from_run, "Take target, anchor and retain set from a run record");
  erase_cmd->add_option("--weights", erase.weights, "Matrix JSON; random normal when absent");
  erase_cmd->add_option("--embeddings", erase.embeddings, "Embedding JSON; hash vectors when absent");
  erase_cmd->add_option("--dim", erase.dim, "Hash embedding dimension");
  erase_cmd->add_option("--d-out", erase.d_out, "Rows of the random weight matrix");
  erase_cmd->add_option("--lambda", erase.lambda, "Preservation weight");
  erase_cmd->add_option("--seed", erase.seed);
  erase_cmd->add_option("--out", erase.out, "Write delta as matrix JSON");
  erase_cmd->add_option("--edited-out", erase.edited_out, "Write W + delta as matrix JSON");

  TraceFlags trace;
  auto* trace_cmd = app.add_subcommand("trace", "Per-layer contribution by single-layer swaps");
  trace.planted_opt = trace_cmd->add_option("--planted", trace.planted, "Planted layer indices, e.g. 3,5");
  trace_cmd->add_option("--layers", trace.layers, "Layers in the planted model");
  trace_cmd->add_option("--base", trace.base, "Base model JSON");
  trace_cmd->add_option("--edited", trace.edited, "Edited model JSON");
  trace_cmd->add_option("--concept", trace.concepts, "Comma-separated concepts (heatmap rows)");
  trace_cmd->add_option("--prompts", trace.prompts, "Prompt templates with {C}, one per line");
  trace_cmd->add_option("--embeddings", trace.embeddings, "Concept directions; hash vectors when absent");
  trace_cmd->add_option("--dim", trace.dim, "Planted model width");
  trace_cmd->add_option("--seed", trace.seed);
  trace_cmd->add_option("--threads", trace.threads);
  trace_cmd->add_option("--heatmap", trace.heatmap, "Write a concept x layer CSV");

  ReportFlags report;
  auto* report_cmd = app.add_subcommand("report", "H_o table from accuracy records");
  report_cmd->add_option("--in", report.in, "CSV or JSON records")->required();
  report_cmd->add_option("--scale", report.scale, "Input scale")
      ->check(CLI::IsMember({"detect", "fraction", "percent"}));
  report_cmd->add_option("--format", report.format)->check(CLI::IsMember({"csv", "json"}));
  report_cmd->add_option("--out", report.out);
  report_cmd->add_flag("--fraction", report.fraction, "Print fractions instead of percent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (mine_cmd->parsed()) return cmd_mine(mine, mine_cmd, hooks, out, err);
    if (act_cmd->parsed()) return cmd_score_activation(score, hooks, out);
    if (coh_cmd->parsed()) return cmd_score_coherence(score, hooks, out);
    if (erase_cmd->parsed()) return cmd_erase(erase, out);
    if (trace_cmd->parsed()) return cmd_trace(trace, out);
    if (report_cmd->parsed()) return cmd_report(report, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliHooks& hooks) {
  std::vector<const char*> argv{"select"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err, hooks);
}

}  // namespace selectkit
