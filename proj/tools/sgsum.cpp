// Command-line front end: train, summarize, evaluate, sweep, stats, oracle,
// graph-stats.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sgsum/sgsum.hpp"

namespace {

using sgsum::Error;
using json = nlohmann::ordered_json;

struct CommonOptions {
  std::string config_path;
  std::string profile = "paper";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string data;
  std::string val_data;
  std::string checkpoint;
  std::string out;
  bool skip_invalid = false;
};

// Profile, then config file, then --set overrides, then explicit flags.
sgsum::RunConfig resolve_config(const CommonOptions& o) {
  sgsum::RunConfig cfg = sgsum::profile(o.profile);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    SGSUM_CHECK(in.good(), "cannot read config ", o.config_path);
    const json j = json::parse(in, nullptr, false);
    SGSUM_CHECK(!j.is_discarded(), o.config_path, ": not valid JSON");
    cfg = sgsum::apply_json(cfg, j);
  }
  for (const auto& kv : o.overrides) cfg = sgsum::apply_override(cfg, kv);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.data.empty()) cfg.data_path = o.data;
  if (!o.val_data.empty()) cfg.val_data_path = o.val_data;
  if (!o.checkpoint.empty()) cfg.checkpoint_path = o.checkpoint;
  if (!o.out.empty()) cfg.out_path = o.out;
  return cfg;
}

std::vector<sgsum::ClusterRecord> load_records(const std::string& path, bool skip_invalid,
                                               bool allow_empty = false) {
  SGSUM_CHECK(!path.empty(), "no data file given (use --data)");
  sgsum::LoadResult loaded = sgsum::load_clusters(path, !skip_invalid, allow_empty);
  for (const auto& e : loaded.errors) std::cerr << "warning: skipped " << e << '\n';
  return std::move(loaded.clusters);
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// Writes to `path` atomically, or to stdout when `path` is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    sgsum::write_file_atomic(path, text);
  }
}

std::string jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

int cmd_train(const CommonOptions& o) {
  const sgsum::RunConfig cfg = resolve_config(o);
  SGSUM_CHECK(!cfg.checkpoint_path.empty(), "train needs --checkpoint for the output model");
  const auto train_set = sgsum::prepare_all(load_records(cfg.data_path, o.skip_invalid));
  std::vector<sgsum::Cluster> val_set;
  if (!cfg.val_data_path.empty()) {
    val_set = sgsum::prepare_all(load_records(cfg.val_data_path, o.skip_invalid));
  }
  const sgsum::TrainResult result = sgsum::train(cfg, train_set, val_set, &std::cout);
  warn_all(result.warnings);
  sgsum::save_checkpoint(cfg.checkpoint_path, sgsum::model_checkpoint(result.model));
  std::cout << "saved epoch " << result.best_epoch << " model to " << cfg.checkpoint_path << '\n';

  if (!cfg.out_path.empty()) {
    json report;
    report["config"] = sgsum::to_json(cfg);
    report["best_epoch"] = result.best_epoch;
    report["validation_f1"] = result.validation_f1;
    report["steps"] = json::array();
    for (const auto& s : result.steps) {
      report["steps"].push_back({{"step", s.step},
                                 {"epoch", s.epoch},
                                 {"cluster_id", s.cluster_id},
                                 {"sent", s.sent},
                                 {"pairwise", s.pairwise},
                                 {"global", s.global},
                                 {"total", s.total},
                                 {"grad_norm", s.grad_norm}});
    }
    report["warnings"] = result.warnings;
    emit(cfg.out_path, report.dump(2) + "\n");
  }
  return 0;
}

int cmd_summarize(const CommonOptions& o) {
  const sgsum::RunConfig cli = resolve_config(o);
  SGSUM_CHECK(!cli.checkpoint_path.empty(), "summarize needs --checkpoint");
  const sgsum::Model model = sgsum::model_from_checkpoint(sgsum::load_checkpoint(cli.checkpoint_path));
  const auto clusters = sgsum::prepare_all(load_records(cli.data_path, o.skip_invalid));
  const auto selected = sgsum::summarize_clusters(model, clusters);
  std::vector<json> rows;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    warn_all(selected[i].warnings);
    json r;
    r["cluster_id"] = clusters[i].id;
    r["summary"] = sgsum::concat_text(clusters[i], selected[i].members);
    rows.push_back(std::move(r));
  }
  emit(cli.out_path, jsonl(rows));
  return 0;
}

std::map<std::string, std::string> load_predictions(const std::string& path) {
  std::ifstream in(path);
  SGSUM_CHECK(in.good(), "cannot read predictions ", path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    SGSUM_CHECK(j.is_object() && j.contains("cluster_id") && j["cluster_id"].is_string() &&
                    j.contains("summary") && j["summary"].is_string(),
                path, ":", line_no, ": expected {\"cluster_id\": ..., \"summary\": ...}");
    const std::string id = j["cluster_id"].get<std::string>();
    SGSUM_CHECK(out.emplace(id, j["summary"].get<std::string>()).second, path, ":", line_no,
                ": duplicate cluster_id '", id, "'");
  }
  return out;
}

int cmd_evaluate(const CommonOptions& o, const std::string& pred_path) {
  const sgsum::RunConfig cfg = resolve_config(o);
  SGSUM_CHECK(!pred_path.empty(), "evaluate needs --pred");
  const auto refs = load_records(cfg.data_path, o.skip_invalid);
  const sgsum::EvalReport report = sgsum::evaluate(load_predictions(pred_path), refs);
  sgsum::print_table(std::cout, report);
  if (!cfg.out_path.empty()) sgsum::write_file_atomic(cfg.out_path, sgsum::to_json(report).dump(2) + "\n");
  return 0;
}

// "0.85:0.15,1:0" -> {(0.85, 0.15), (1, 0)}
std::vector<std::pair<double, double>> parse_grid(const std::string& text) {
  std::vector<std::pair<double, double>> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    SGSUM_CHECK(colon != std::string::npos, "grid point '", item, "' is not theta:beta");
    try {
      grid.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      sgsum::detail::fail("grid point '", item, "' is not theta:beta");
    }
  }
  SGSUM_CHECK(!grid.empty(), "empty grid");
  return grid;
}

int cmd_sweep(const CommonOptions& o, const std::string& grid_text) {
  const sgsum::RunConfig cfg = resolve_config(o);
  const auto grid = grid_text.empty() ? sgsum::paper_sweep_grid() : parse_grid(grid_text);
  const auto train_set = sgsum::prepare_all(load_records(cfg.data_path, o.skip_invalid));
  std::vector<sgsum::Cluster> val_set;
  if (cfg.val_data_path.empty()) {
    std::cerr << "warning: no --val-data; scoring each grid point on the training clusters\n";
  } else {
    val_set = sgsum::prepare_all(load_records(cfg.val_data_path, o.skip_invalid));
  }
  const sgsum::SweepResult result = sgsum::sweep(cfg, grid, train_set, val_set, &std::cerr);
  sgsum::print_table(std::cout, result);
  if (!cfg.out_path.empty()) sgsum::write_file_atomic(cfg.out_path, sgsum::to_json(result).dump(2) + "\n");
  return 0;
}

int cmd_stats(const CommonOptions& o) {
  const sgsum::RunConfig cfg = resolve_config(o);
  const auto records = load_records(cfg.data_path, o.skip_invalid, /*allow_empty=*/true);
  if (records.empty()) std::cerr << "warning: " << cfg.data_path << " holds no clusters\n";
  const sgsum::DatasetStats s = sgsum::dataset_stats(records);
  std::cout << std::left << std::setw(28) << "clusters" << s.clusters << '\n'
            << std::setw(28) << "documents" << s.documents << '\n'
            << std::setw(28) << "avg documents/cluster" << std::fixed << std::setprecision(2)
            << s.average_documents << '\n'
            << std::setw(28) << "sentences" << s.sentences << '\n'
            << std::setw(28) << "avg sentences/cluster" << s.average_sentences_per_cluster << '\n'
            << std::setw(28) << "avg sentences/document" << s.average_sentences_per_document << '\n'
            << std::setw(28) << "clusters with summary" << s.with_summary << '\n';
  if (!cfg.out_path.empty()) {
    const json j = {{"clusters", s.clusters},
                    {"documents", s.documents},
                    {"average_documents", s.average_documents},
                    {"sentences", s.sentences},
                    {"average_sentences_per_cluster", s.average_sentences_per_cluster},
                    {"average_sentences_per_document", s.average_sentences_per_document},
                    {"with_summary", s.with_summary}};
    sgsum::write_file_atomic(cfg.out_path, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_oracle(const CommonOptions& o) {
  const sgsum::RunConfig cfg = resolve_config(o);
  const auto clusters = sgsum::prepare_all(load_records(cfg.data_path, o.skip_invalid));
  std::vector<json> rows;
  for (const auto& c : clusters) {
    if (!c.has_reference() || c.size() == 0) {
      std::cerr << "warning: cluster '" << c.id << "' has no summary or no sentences; skipped\n";
      continue;
    }
    const sgsum::OracleSummary oracle =
        sgsum::greedy_oracle(c, c.reference, cfg.max_oracle_sentences, cfg.oracle_objective);
    json r;
    r["cluster_id"] = c.id;
    r["summary"] = sgsum::concat_text(c, oracle.members);
    r["members"] = oracle.members;
    r["score"] = oracle.score;
    rows.push_back(std::move(r));
  }
  emit(cfg.out_path, jsonl(rows));
  return 0;
}

std::string matrix_text(const sgsum::Tensor& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? " " : "") << m(r, c);
    os << '\n';
  }
  return os.str();
}

int cmd_graph_stats(const CommonOptions& o, const std::string& dump_dir) {
  const sgsum::RunConfig cfg = resolve_config(o);
  const auto clusters = sgsum::prepare_all(load_records(cfg.data_path, o.skip_invalid));
  std::optional<sgsum::TfIdfModel> global;
  if (cfg.tfidf_scope == sgsum::TfIdfScope::kGlobal) global = sgsum::fit_global_tfidf(clusters);
  if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);

  std::cout << std::left << std::setw(20) << "cluster" << std::right << std::setw(10) << "sentences"
            << std::setw(8) << "docs" << std::setw(12) << "mean G" << std::setw(12) << "max G"
            << std::setw(12) << "zero G" << '\n';
  std::vector<json> rows;
  for (const auto& c : clusters) {
    if (c.size() == 0) {
      std::cerr << "warning: cluster '" << c.id << "' has no sentences; skipped\n";
      continue;
    }
    const sgsum::ClusterGraph g =
        sgsum::build_cluster_graph(c, cfg.encoder.sigma, global ? &*global : nullptr);
    double sum = 0.0, max = 0.0;
    std::size_t pairs = 0, zeros = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
      for (std::size_t j = 0; j < g.n; ++j) {
        if (i == j) continue;
        const double v = g.similarity(i, j);
        sum += v;
        max = std::max(max, v);
        zeros += v == 0.0;
        ++pairs;
      }
    }
    const double mean = pairs ? sum / static_cast<double>(pairs) : 0.0;
    const double zero_frac = pairs ? static_cast<double>(zeros) / static_cast<double>(pairs) : 0.0;
    std::cout << std::left << std::setw(20) << c.id << std::right << std::setw(10) << g.n
              << std::setw(8) << c.num_documents << std::fixed << std::setprecision(4)
              << std::setw(12) << mean << std::setw(12) << max << std::setw(12) << zero_frac << '\n';
    std::cout.unsetf(std::ios::fixed);
    rows.push_back({{"cluster_id", c.id},
                    {"sentences", g.n},
                    {"documents", c.num_documents},
                    {"mean_similarity", mean},
                    {"max_similarity", max},
                    {"zero_fraction", zero_frac}});
    if (!dump_dir.empty()) {
      const std::filesystem::path dir(dump_dir);
      sgsum::write_file_atomic(dir / (c.id + ".G.txt"), matrix_text(g.similarity));
      sgsum::write_file_atomic(dir / (c.id + ".G_same.txt"), matrix_text(g.same_document));
    }
  }
  if (!cfg.out_path.empty()) sgsum::write_file_atomic(cfg.out_path, json(rows).dump(2) + "\n");
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--profile", o.profile, "Base profile")->check(CLI::IsMember({"paper", "toy"}));
  cmd->add_option("--set", o.overrides, "Config override key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--data", o.data, "Cluster records, one JSON object per line");
  cmd->add_option("--checkpoint", o.checkpoint, "Model checkpoint path");
  cmd->add_option("--out", o.out, "Output path");
  cmd->add_flag("--skip-invalid", o.skip_invalid, "Skip malformed input lines instead of aborting");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-graph extractive multi-document summarizer"};
  app.require_subcommand(1);
  CommonOptions o;
  std::string pred_path, grid_text, dump_dir;

  auto* train = app.add_subcommand("train", "Train a model and save a checkpoint");
  add_common(train, o);
  train->add_option("--val-data", o.val_data, "Validation clusters for checkpoint selection");

  auto* summarize = app.add_subcommand("summarize", "Write one summary per cluster (JSONL)");
  add_common(summarize, o);

  auto* evaluate = app.add_subcommand("evaluate", "ROUGE-2 of predictions against references");
  add_common(evaluate, o);
  evaluate->add_option("--pred", pred_path, "Predicted summaries (JSONL {cluster_id, summary})")
      ->required();

  auto* sweep = app.add_subcommand("sweep", "Train and score every (theta, beta) grid point");
  add_common(sweep, o);
  sweep->add_option("--val-data", o.val_data, "Validation clusters");
  sweep->add_option("--grid", grid_text, "Grid as theta:beta,theta:beta,... (default: published grid)");

  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  add_common(stats, o);

  auto* oracle = app.add_subcommand("oracle", "Greedy oracle extracts (JSONL)");
  add_common(oracle, o);

  auto* graph = app.add_subcommand("graph-stats", "Sentence graph statistics");
  add_common(graph, o);
  graph->add_option("--dump-dir", dump_dir, "Write G and G_same matrices per cluster here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(o);
    if (*summarize) return cmd_summarize(o);
    if (*evaluate) return cmd_evaluate(o, pred_path);
    if (*sweep) return cmd_sweep(o, grid_text);
    if (*stats) return cmd_stats(o);
    if (*oracle) return cmd_oracle(o);
    if (*graph) return cmd_graph_stats(o, dump_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
