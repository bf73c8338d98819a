#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>

#include "biaslens/ingest.hpp"
#include "biaslens/report.hpp"
#include "biaslens/stats.hpp"
#include "biaslens/structural.hpp"
#include "biaslens/synth.hpp"
#include "biaslens/text.hpp"

namespace py = pybind11;
using namespace biaslens;

namespace {

py::dict result_dict(const stats::TestResult& t) {
  py::dict d;
  d["statistic"] = t.statistic;
  d["p_value"] = t.p_value;
  d["direction"] = t.direction;
  d["method"] = stats::to_string(t.method);
  d["reliable"] = t.reliable;
  return d;
}

std::string analyze_bundle(const std::string& dir, std::vector<std::string> editions,
                           std::size_t null_runs, std::uint64_t seed, std::uint64_t min_df,
                           std::size_t top_n, bool dedupe_edges, bool yates) {
  if (editions.empty()) editions = ingest::load_entities(std::filesystem::path(dir) / "entities.tsv").value.editions();
  const auto paths = ingest::BundlePaths::in_directory(dir, editions);
  auto loaded = ingest::load_bundle(paths, dedupe_edges);
  report::AnalysisConfig cfg;
  cfg.editions = editions;
  cfg.n_null_runs = null_runs;
  cfg.master_seed = seed;
  cfg.min_df = min_df;
  cfg.top_n = top_n;
  cfg.dedupe_edges = dedupe_edges;
  cfg.yates = yates;
  py::gil_scoped_release release;
  return report::json_text(report::run_pipeline(cfg, loaded.value));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "biaslens core bindings";

  py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_ValueError);
  py::register_exception<ingest::IngestError>(m, "IngestError", PyExc_IOError);

  m.def("chi_square_2x2", [](double a, double b, double c, double d, bool yates) {
    return result_dict(stats::chi_square_2x2(a, b, c, d, yates));
  }, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("yates") = false);
  m.def("wilcoxon_rank_sum", [](std::vector<double> x, std::vector<double> y) {
    return result_dict(stats::wilcoxon_rank_sum(x, y));
  });
  m.def("ks_two_sample", [](std::vector<double> x, std::vector<double> y) {
    return result_dict(stats::ks_two_sample(x, y));
  });
  m.def("spearman", [](std::vector<double> x, std::vector<double> y) {
    return result_dict(stats::spearman(x, y));
  });
  m.def("gamma_p", &stats::gamma_p);
  m.def("gamma_q", &stats::gamma_q);
  m.def("kolmogorov_sf", &stats::kolmogorov_sf);

  m.def("porter_stem", [](const std::string& w) { return text::porter_stem(w); });
  m.def("tokenize", [](const std::string& s, const std::string& edition) {
    return text::tokenize(s, edition, text::default_stemmers());
  }, py::arg("text"), py::arg("edition") = "en");

  m.def("in_kcore", [](std::vector<std::pair<std::string, std::string>> edges) {
    LinkGraph g;
    std::set<std::string> nodes;
    for (const auto& [a, b] : edges) {
      nodes.insert(a);
      nodes.insert(b);
    }
    g.nodes.assign(nodes.begin(), nodes.end());
    g.edges = std::move(edges);
    return structural::in_kcore(g);
  });

  m.def("solve_mixing", [](double share, double r, double a) {
    const auto mm = synth::solve_mixing(share, r, a);
    return std::vector<std::vector<double>>{{mm.e[0][0], mm.e[0][1]}, {mm.e[1][0], mm.e[1][1]}};
  });

  m.def("synth", [](const std::string& out, std::size_t n_minority, std::size_t n_majority,
                    double assortativity, double asymmetry, std::vector<std::string> editions,
                    std::uint64_t seed) {
    synth::SynthSpec spec;
    spec.n_minority = n_minority;
    spec.n_majority = n_majority;
    spec.target_assortativity = assortativity;
    spec.target_asymmetry = asymmetry;
    spec.editions = std::move(editions);
    spec.seed = seed;
    std::filesystem::create_directories(out);
    ingest::write_bundle(synth::generate(spec), out);
  }, py::arg("out"), py::arg("n_minority") = 1000, py::arg("n_majority") = 4000,
     py::arg("assortativity") = 0.0, py::arg("asymmetry") = 0.0,
     py::arg("editions") = std::vector<std::string>{"en"}, py::arg("seed") = 1);

  m.def("analyze_json", &analyze_bundle, py::arg("bundle"),
        py::arg("editions") = std::vector<std::string>{}, py::arg("null_runs") = 10000,
        py::arg("seed") = 0, py::arg("min_df") = 5, py::arg("top_n") = 150,
        py::arg("dedupe_edges") = false, py::arg("yates") = false);

  m.attr("__version__") = report::kToolVersion;
}
