#include <charconv>
#include <cstring>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "biaslens/ingest.hpp"
#include "biaslens/report.hpp"
#include "biaslens/stats.hpp"
#include "biaslens/synth.hpp"
#include "biaslens/util.hpp"

namespace fs = std::filesystem;
using namespace biaslens;

namespace {

constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kPartial = 2;

// --edges-<edition> and --corpus-<edition> cannot be declared up front, so
// they are pulled out of argv before CLI11 sees it.
struct EditionFiles {
  std::map<std::string, fs::path> edges;
  std::map<std::string, fs::path> corpus;
};

std::vector<std::string> extract_edition_files(int argc, char** argv, EditionFiles& out) {
  std::vector<std::string> rest;
  for (int i = 0; i < argc; ++i) {
    std::string arg = argv[i];
    std::map<std::string, fs::path>* target = nullptr;
    std::string prefix;
    for (auto [p, t] : {std::pair{"--edges-", &out.edges}, std::pair{"--corpus-", &out.corpus}}) {
      if (arg.rfind(p, 0) == 0) {
        prefix = p;
        target = t;
      }
    }
    if (!target) {
      rest.push_back(arg);
      continue;
    }
    std::string edition = arg.substr(prefix.size());
    std::string value;
    if (auto eq = edition.find('='); eq != std::string::npos) {
      value = edition.substr(eq + 1);
      edition = edition.substr(0, eq);
    } else if (i + 1 < argc) {
      value = argv[++i];
    } else {
      throw CLI::ParseError(arg + " requires a file argument", CLI::ExitCodes::ArgumentMismatch);
    }
    if (edition.empty()) throw CLI::ParseError(arg + ": missing edition", CLI::ExitCodes::ArgumentMismatch);
    (*target)[edition] = value;
  }
  return rest;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct InputFlags {
  std::string bundle;
  std::string entities;
  std::string featured;
  std::string lexicons;
  std::string external_ranking;
  std::string editions;
  bool dedupe_edges = false;

  void add_to(CLI::App* app) {
    app->add_option("--bundle", bundle, "Directory with canonically named input files");
    app->add_option("--entities", entities, "Entity table (TSV)");
    app->add_option("--featured", featured, "Featured-article log (TSV)");
    app->add_option("--lexicons", lexicons, "Category lexicons (TSV)");
    app->add_option("--external-ranking", external_ranking, "Per-edition external ranking (TSV)");
    app->add_option("--editions", editions, "Comma-separated editions");
    app->add_flag("--dedupe-edges", dedupe_edges, "Collapse duplicate edges");
  }
};

struct LoadedInputs {
  ingest::DatasetBundle bundle;
  std::vector<std::string> editions;
  std::map<std::string, std::string> hashes;
  std::vector<ingest::Issue> issues;
};

LoadedInputs load_inputs(const InputFlags& f, const EditionFiles& files) {
  std::vector<std::string> editions = split_list(f.editions);
  ingest::BundlePaths paths;
  if (!f.bundle.empty()) {
    std::vector<std::string> probe = editions;
    if (probe.empty()) {
      auto table = ingest::load_entities(fs::path(f.bundle) / "entities.tsv");
      probe = table.value.editions();
    }
    paths = ingest::BundlePaths::in_directory(f.bundle, probe);
  }
  if (!f.entities.empty()) paths.entities = f.entities;
  if (paths.entities.empty()) throw ingest::IngestError("no entity table given (--entities or --bundle)");
  for (const auto& [ed, p] : files.edges) paths.edges[ed] = p;
  for (const auto& [ed, p] : files.corpus) paths.corpus[ed] = p;
  if (!f.featured.empty()) paths.featured = f.featured;
  if (!f.lexicons.empty()) paths.lexicons = f.lexicons;
  if (!f.external_ranking.empty()) paths.external_ranking = f.external_ranking;

  LoadedInputs in;
  auto loaded = ingest::load_bundle(paths, f.dedupe_edges);
  in.bundle = std::move(loaded.value);
  in.issues = std::move(loaded.issues);
  in.editions = editions.empty() ? in.bundle.table.editions() : editions;

  auto hash = [&](const std::string& label, const fs::path& p) {
    in.hashes[label] = sha256_hex(ingest::read_file(p));
  };
  hash("entities", paths.entities);
  for (const auto& [ed, p] : paths.edges) hash("edges_" + ed, p);
  for (const auto& [ed, p] : paths.corpus) hash("corpus_" + ed, p);
  if (paths.featured) hash("featured", *paths.featured);
  if (paths.lexicons) hash("lexicons", *paths.lexicons);
  if (paths.external_ranking) hash("external_ranking", *paths.external_ranking);
  return in;
}

void print_issues(const std::vector<ingest::Issue>& issues) {
  for (const auto& i : issues)
    std::cerr << "warning: " << i.file << ":" << i.line << ": " << i.message << "\n";
}

std::vector<double> parse_numbers(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    double v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
      throw std::invalid_argument(std::string(what) + ": not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// Reads two named columns (or the first two) from a TSV with a header row.
std::pair<std::vector<double>, std::vector<double>> read_columns(const fs::path& path,
                                                                 const std::string& cx,
                                                                 const std::string& cy) {
  std::stringstream ss(ingest::read_file(path));
  std::string line;
  if (!std::getline(ss, line)) throw ingest::IngestError(path.string() + ": empty file");
  auto split_tab = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : l) {
      if (c == '\t') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    return out;
  };
  const auto header = split_tab(line);
  auto index_of = [&](const std::string& name, std::size_t fallback) {
    if (name.empty()) return fallback;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ingest::IngestError(path.string() + ": no column '" + name + "'");
  };
  const std::size_t ix = index_of(cx, 0), iy = index_of(cy, 1);
  std::vector<double> x, y;
  std::size_t lineno = 1;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_tab(line);
    auto take = [&](std::size_t i, std::vector<double>& out) {
      if (i >= f.size() || f[i].empty()) return;
      double v = 0;
      auto [p, ec] = std::from_chars(f[i].data(), f[i].data() + f[i].size(), v);
      if (ec != std::errc())
        throw ingest::IngestError(path.string() + ":" + std::to_string(lineno) + ": not a number");
      out.push_back(v);
    };
    take(ix, x);
    take(iy, y);
  }
  return {x, y};
}

nlohmann::json test_json(const stats::TestResult& t) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  return {{"method", stats::to_string(t.method)},
          {"statistic", num(t.statistic)},
          {"p_value", num(t.p_value)},
          {"direction", t.direction},
          {"reliable", t.reliable}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure group bias in encyclopedia coverage, links, wording and visibility"};
  app.require_subcommand(1);
  app.set_version_flag("--version", report::kToolVersion);

  InputFlags inputs;
  report::AnalysisConfig cfg;
  std::string datasets, out, format = "json";
  std::string coverage_scalar = "gap_ratio", structural_scalar = "asymmetry",
              lexical_scalar = "minority_category_share";

  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline and write a report");
  inputs.add_to(analyze);
  analyze->add_option("--datasets", datasets, "Comma-separated reference datasets (default: all)");
  analyze->add_option("--minority", cfg.minority, "Minority group label")->capture_default_str();
  analyze->add_option("--majority", cfg.majority, "Majority group label")->capture_default_str();
  analyze->add_option("--null-runs", cfg.n_null_runs, "Randomizations per null model")->capture_default_str();
  analyze->add_option("--seed", cfg.master_seed, "Master seed")->capture_default_str();
  analyze->add_option("--min-df", cfg.min_df, "Minimum document frequency")->capture_default_str();
  analyze->add_option("--top-n", cfg.top_n, "Ranked stems per group for categories")->capture_default_str();
  analyze->add_flag("--token-frequency", cfg.token_frequency, "Count token occurrences instead of documents");
  analyze->add_flag("--yates", cfg.yates, "Yates continuity correction for 2x2 tables");
  analyze->add_option("--coverage-scalar", coverage_scalar)
      ->check(CLI::IsMember({"gap_ratio", "proportion_difference"}));
  analyze->add_option("--structural-scalar", structural_scalar)
      ->check(CLI::IsMember({"asymmetry", "assortativity"}));
  analyze->add_option("--lexical-scalar", lexical_scalar)
      ->check(CLI::IsMember({"minority_category_share", "category_share_difference"}));
  analyze->add_option("--out", out, "Report path (file for json, directory for csv-dir)")->required();
  analyze->add_option("--format", format, "json or csv-dir")->capture_default_str()
      ->check(CLI::IsMember({"json", "csv-dir"}));

  synth::SynthSpec spec;
  std::string synth_out, synth_editions = "en";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic bundle with planted biases");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--seed", spec.seed)->capture_default_str();
  synth_cmd->add_option("--editions", synth_editions)->capture_default_str();
  synth_cmd->add_option("--n-minority", spec.n_minority)->capture_default_str();
  synth_cmd->add_option("--n-majority", spec.n_majority)->capture_default_str();
  synth_cmd->add_option("--assortativity", spec.target_assortativity)->capture_default_str();
  synth_cmd->add_option("--asymmetry", spec.target_asymmetry)->capture_default_str();
  synth_cmd->add_option("--mean-out-degree", spec.mean_out_degree)->capture_default_str();
  synth_cmd->add_flag("--heavy-tail", spec.heavy_tail);
  synth_cmd->add_option("--shared-vocab", spec.shared_vocab)->capture_default_str();
  synth_cmd->add_option("--exclusive-vocab", spec.exclusive_vocab)->capture_default_str();
  synth_cmd->add_option("--exclusive-rate", spec.exclusive_rate)->capture_default_str();
  synth_cmd->add_option("--docs-per-entity", spec.docs_per_entity)->capture_default_str();
  synth_cmd->add_option("--doc-length", spec.doc_length)->capture_default_str();
  synth_cmd->add_option("--coverage-minority", spec.coverage_minority)->capture_default_str();
  synth_cmd->add_option("--coverage-majority", spec.coverage_majority)->capture_default_str();
  synth_cmd->add_option("--featured-minority", spec.featured_minority)->capture_default_str();
  synth_cmd->add_option("--featured-majority", spec.featured_majority)->capture_default_str();
  synth_cmd->add_option("--dataset", spec.dataset)->capture_default_str();

  InputFlags vinputs;
  auto* validate = app.add_subcommand("validate", "Check input files without analysing them");
  vinputs.add_to(validate);

  std::string test_name, xs, ys, table, columns_file, col_x, col_y;
  bool stats_yates = false;
  auto* stats_cmd = app.add_subcommand("stats", "Run one statistical test on supplied values");
  stats_cmd->add_option("--test", test_name, "chi-square, wilcoxon, ks or spearman")->required()
      ->check(CLI::IsMember({"chi-square", "wilcoxon", "ks", "spearman"}));
  stats_cmd->add_option("--x", xs, "Comma-separated first sample");
  stats_cmd->add_option("--y", ys, "Comma-separated second sample");
  stats_cmd->add_option("--table", table, "a,b,c,d cells of a 2x2 table");
  stats_cmd->add_option("--input", columns_file, "TSV with a header row");
  stats_cmd->add_option("--x-column", col_x);
  stats_cmd->add_option("--y-column", col_y);
  stats_cmd->add_flag("--yates", stats_yates);

  EditionFiles edition_files;
  std::vector<std::string> args;
  try {
    args = extract_edition_files(argc, argv, edition_files);
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFatal;
  }

  try {
    if (*analyze) {
      if (!datasets.empty()) cfg.datasets = split_list(datasets);
      cfg.dedupe_edges = inputs.dedupe_edges;
      cfg.coverage_scalar = coverage_scalar == "gap_ratio" ? report::CoverageScalar::gap_ratio
                                                           : report::CoverageScalar::proportion_difference;
      cfg.structural_scalar = structural_scalar == "asymmetry" ? report::StructuralScalar::asymmetry
                                                               : report::StructuralScalar::assortativity;
      cfg.lexical_scalar = lexical_scalar == "minority_category_share"
                               ? report::LexicalScalar::minority_category_share
                               : report::LexicalScalar::category_share_difference;
      auto in = load_inputs(inputs, edition_files);
      print_issues(in.issues);
      cfg.editions = in.editions;
      const auto findings = ingest::validate_bundle(in.bundle);
      if (!findings.empty()) {
        for (const auto& f : findings) std::cerr << "error: " << f.entity_id << ": " << f.rule << "\n";
        return kFatal;
      }
      const auto rep = report::run_pipeline(cfg, in.bundle, in.hashes);
      report::emit(rep, report::format_from_string(format), out);
      if (rep.has_failures()) {
        std::cerr << "some sections failed; see the report for details\n";
        return kPartial;
      }
      return kOk;
    }

    if (*synth_cmd) {
      spec.editions = split_list(synth_editions);
      const auto bundle = synth::generate(spec);
      fs::create_directories(synth_out);
      ingest::write_bundle(bundle, synth_out);
      std::cout << "wrote synthetic bundle to " << synth_out << "\n";
      return kOk;
    }

    if (*validate) {
      auto in = load_inputs(vinputs, edition_files);
      print_issues(in.issues);
      auto findings = validate_table(in.bundle.table);
      for (auto& f : ingest::validate_bundle(in.bundle)) findings.push_back(std::move(f));
      for (const auto& f : findings) std::cerr << "error: " << f.entity_id << ": " << f.rule << "\n";
      std::cout << in.bundle.table.size() << " entities, " << in.bundle.graphs.size() << " edge lists, "
                << in.bundle.corpus.size() << " corpora, " << in.issues.size() << " warnings, "
                << findings.size() << " errors\n";
      return findings.empty() ? kOk : kFatal;
    }

    if (*stats_cmd) {
      stats::TestResult result;
      if (test_name == "chi-square") {
        const auto cells = parse_numbers(table, "--table");
        if (cells.size() != 4) throw std::invalid_argument("--table needs exactly four values");
        result = stats::chi_square_2x2(cells[0], cells[1], cells[2], cells[3], stats_yates);
      } else {
        std::vector<double> x, y;
        if (!columns_file.empty()) {
          std::tie(x, y) = read_columns(columns_file, col_x, col_y);
        } else {
          x = parse_numbers(xs, "--x");
          y = parse_numbers(ys, "--y");
        }
        if (test_name == "wilcoxon") result = stats::wilcoxon_rank_sum(x, y);
        else if (test_name == "ks") result = stats::ks_two_sample(x, y);
        else result = stats::spearman(x, y);
      }
      std::cout << test_json(result).dump(2) << "\n";
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFatal;
  }
  return kOk;
}
