#include "biaslens/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace biaslens::lexical {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_role_docs(const LexicalModel& m, std::uint64_t min_docs) {
  for (auto g : {m.roles.minority, m.roles.majority}) {
    if (g.value >= m.doc_counts.size() || m.doc_counts[g.value] < min_docs)
      throw AnalysisError("lexical: group '" +
                          (g.value < m.group_names.size() ? m.group_names[g.value] : "?") +
                          "' has fewer than " + std::to_string(min_docs) + " document(s)");
  }
}

std::vector<const LabeledDocument*> canonical_order(const std::vector<LabeledDocument>& docs) {
  std::vector<const LabeledDocument*> order;
  order.reserve(docs.size());
  for (const auto& d : docs) order.push_back(&d);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->stems != b->stems) return a->stems < b->stems;
    if (a->entity_id != b->entity_id) return a->entity_id < b->entity_id;
    return a->group < b->group;
  });
  return order;
}

std::size_t first_by_name(const std::vector<std::string>& names, std::size_t a, std::size_t b) {
  return names[b] < names[a] ? b : a;
}

}  // namespace

std::vector<LabeledDocument> prepare_corpus(const std::vector<Document>& corpus,
                                            const EntityTable& table, const std::string& edition,
                                            const text::StemmerRegistry& stemmers,
                                            std::vector<std::string>* warnings) {
  if (!stemmers.has(edition) && warnings)
    warnings->push_back("no stemmer registered for edition '" + edition +
                        "'; using identity stemmer");
  std::vector<LabeledDocument> out;
  for (const auto& doc : corpus) {
    if (doc.edition != edition) continue;
    const Entity* e = table.find(doc.entity_id);
    if (!e) continue;
    out.push_back({doc.entity_id, e->group, text::tokenize(doc.text, edition, stemmers)});
  }
  return out;
}

LexicalModel count_vocabulary(const std::vector<LabeledDocument>& docs,
                              const std::vector<std::string>& group_names, GroupRoles roles,
                              const std::string& edition, const LexicalOptions& options) {
  LexicalModel m;
  m.edition = edition;
  m.group_names = group_names;
  m.roles = roles;
  m.options = options;
  const std::size_t G = group_names.size();
  m.doc_counts.assign(G, 0);
  m.token_counts.assign(G, 0);
  for (const auto* doc : canonical_order(docs)) {
    const std::size_t g = doc->group.value;
    if (g >= G) continue;
    ++m.doc_counts[g];
    ++m.total_docs;
    m.token_counts[g] += doc->stems.size();
    m.total_tokens += doc->stems.size();
    std::map<std::string, std::uint64_t> tf;
    for (const auto& s : doc->stems) ++tf[s];
    for (const auto& [stem, count] : tf) {
      auto& st = m.vocabulary[stem];
      if (st.group_df.empty()) {
        st.group_df.assign(G, 0);
        st.group_tf.assign(G, 0);
      }
      ++st.group_df[g];
      ++st.df;
      st.group_tf[g] += count;
      st.tf += count;
    }
  }
  return m;
}

std::vector<WordLikelihood> word_likelihood_ratios(const LexicalModel& m) {
  require_role_docs(m, 1);
  const std::size_t G = m.group_names.size();
  const bool tokens = m.options.token_frequency;
  const double total = static_cast<double>(tokens ? m.total_tokens : m.total_docs);
  std::vector<double> group_mass(G);
  for (std::size_t g = 0; g < G; ++g)
    group_mass[g] = static_cast<double>(tokens ? m.token_counts[g] : m.doc_counts[g]);

  std::vector<WordLikelihood> rows;
  rows.reserve(m.vocabulary.size());
  for (const auto& [stem, st] : m.vocabulary) {
    WordLikelihood row;
    row.stem = stem;
    row.df = st.df;
    const double c = static_cast<double>(tokens ? st.tf : st.df);
    row.p_word = c / total;
    row.p_word_given_group.resize(G);
    row.group_prior.resize(G);
    row.llr.resize(G);
    row.posterior_odds.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
      const double cg = static_cast<double>(tokens ? st.group_tf[g] : st.group_df[g]);
      row.group_prior[g] = group_mass[g] / total;
      row.p_word_given_group[g] = group_mass[g] > 0 ? cg / group_mass[g] : 0.0;
      if (cg > 0) row.llr[g] = std::log(cg * total / (group_mass[g] * c));
      // P(g|w) / (1 - P(g|w)) reduces to a ratio of counts.
      row.posterior_odds[g] = (c - cg) > 0 ? cg / (c - cg) : kInf;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<WordLikelihood> word_likelihood_ratios(const std::vector<Document>& corpus,
                                                   const EntityTable& table,
                                                   const std::string& edition, GroupRoles roles,
                                                   const LexicalOptions& options) {
  std::vector<std::string> names;
  for (const auto& g : table.groups()) names.push_back(g.name);
  const auto docs = prepare_corpus(corpus, table, edition, text::default_stemmers());
  return word_likelihood_ratios(count_vocabulary(docs, names, roles, edition, options));
}

LexicalModel train_discriminative_ranking(const std::vector<LabeledDocument>& docs,
                                          const std::vector<std::string>& group_names,
                                          GroupRoles roles, const std::string& edition,
                                          const LexicalOptions& options) {
  LexicalModel m = count_vocabulary(docs, group_names, roles, edition, options);
  require_role_docs(m, 2);
  const std::size_t G = group_names.size();

  for (const auto& [stem, st] : m.vocabulary) {
    if (st.df >= options.min_df) {
      m.feature_index.emplace(stem, m.features.size());
      m.features.push_back(stem);
    }
  }
  if (m.features.empty())
    throw AnalysisError("lexical: empty vocabulary after min_df = " +
                        std::to_string(options.min_df) + " filter");

  const std::size_t V = m.features.size();
  const double N = static_cast<double>(m.total_docs);
  m.idf.resize(V);
  for (std::size_t f = 0; f < V; ++f)
    m.idf[f] = std::log(N / static_cast<double>(m.vocabulary.at(m.features[f]).df));

  std::vector<std::vector<double>> mass(G, std::vector<double>(V, 0.0));
  for (const auto* doc : canonical_order(docs)) {
    const std::size_t g = doc->group.value;
    if (g >= G) continue;
    std::map<std::size_t, std::uint64_t> tf;
    for (const auto& s : doc->stems) {
      auto it = m.feature_index.find(s);
      if (it != m.feature_index.end()) ++tf[it->second];
    }
    TfidfRow row{doc->entity_id, {}};
    for (const auto& [f, count] : tf) {
      const double w = std::log1p(static_cast<double>(count)) * m.idf[f];
      row.weights.emplace_back(f, w);
      mass[g][f] += w;
    }
    m.tfidf.push_back(std::move(row));
  }

  m.log_theta.assign(G, std::vector<double>(V, 0.0));
  m.log_prior.assign(G, -kInf);
  for (std::size_t g = 0; g < G; ++g) {
    if (m.doc_counts[g] > 0) m.log_prior[g] = std::log(static_cast<double>(m.doc_counts[g]) / N);
    double total = 0.0;
    for (double w : mass[g]) total += w;
    const double denom = std::log(total + static_cast<double>(V));
    for (std::size_t f = 0; f < V; ++f) m.log_theta[g][f] = std::log(mass[g][f] + 1.0) - denom;
  }

  const std::size_t minor = roles.minority.value;
  const std::size_t major = roles.majority.value;
  m.nb_ranking.reserve(V);
  for (std::size_t f = 0; f < V; ++f) {
    const double diff = m.log_theta[minor][f] - m.log_theta[major][f];
    std::size_t favored =
        diff > 0 ? minor : (diff < 0 ? major : first_by_name(group_names, minor, major));
    m.nb_ranking.push_back({m.features[f], std::fabs(diff), GroupId{favored}});
  }
  std::sort(m.nb_ranking.begin(), m.nb_ranking.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.stem < b.stem;
  });
  return m;
}

LexicalModel train_discriminative_ranking(const std::vector<Document>& corpus,
                                          const EntityTable& table, const std::string& edition,
                                          GroupRoles roles, const LexicalOptions& options,
                                          const text::StemmerRegistry& stemmers) {
  std::vector<std::string> names;
  for (const auto& g : table.groups()) names.push_back(g.name);
  std::vector<std::string> warnings;
  const auto docs = prepare_corpus(corpus, table, edition, stemmers, &warnings);
  LexicalModel m = train_discriminative_ranking(docs, names, roles, edition, options);
  m.warnings.insert(m.warnings.begin(), warnings.begin(), warnings.end());
  return m;
}

Classification classify(const LexicalModel& model, const std::vector<std::string>& stems) {
  const std::size_t G = model.group_names.size();
  std::map<std::size_t, std::uint64_t> tf;
  for (const auto& s : stems) {
    auto it = model.feature_index.find(s);
    if (it != model.feature_index.end()) ++tf[it->second];
  }
  Classification c;
  c.log_posterior = model.log_prior;
  for (const auto& [f, count] : tf) {
    const double w = std::log1p(static_cast<double>(count)) * model.idf[f];
    for (std::size_t g = 0; g < G; ++g)
      if (std::isfinite(c.log_posterior[g])) c.log_posterior[g] += w * model.log_theta[g][f];
  }
  std::size_t best = G;
  for (std::size_t g = 0; g < G; ++g) {
    if (!std::isfinite(c.log_posterior[g])) continue;
    if (best == G || c.log_posterior[g] > c.log_posterior[best] ||
        (c.log_posterior[g] == c.log_posterior[best] &&
         model.group_names[g] < model.group_names[best]))
      best = g;
  }
  if (best == G) throw AnalysisError("classify: model has no trained groups");
  c.group = GroupId{best};
  return c;
}

Classification classify(const LexicalModel& model, const std::string& document_text,
                        const text::StemmerRegistry& stemmers) {
  return classify(model, text::tokenize(document_text, model.edition, stemmers));
}

const GroupCategories* CategoryReport::find(GroupId g) const {
  for (const auto& gc : groups)
    if (gc.group == g) return &gc;
  return nullptr;
}

double CategoryReport::in_category_share(GroupId g) const {
  const GroupCategories* gc = find(g);
  if (!gc || gc->curve.empty()) throw AnalysisError("category report: no stems for group");
  return gc->curve.back();
}

CategoryReport category_report(const std::vector<RankedStem>& ranking, const Lexicons& lexicons,
                               std::size_t n_groups, std::size_t top_n) {
  CategoryReport report;
  report.top_n = top_n;
  for (std::size_t g = 0; g < n_groups; ++g) {
    GroupCategories gc;
    gc.group = GroupId{g};
    for (auto c : {Category::Gender, Category::Relationship, Category::Family, Category::Others})
      gc.counts[c] = 0;
    std::size_t in_category = 0;
    for (const auto& r : ranking) {
      if (gc.n == top_n) break;
      if (r.favored.value != g) continue;
      auto it = lexicons.find(r.stem);
      const Category c = it == lexicons.end() ? Category::Others : it->second;
      ++gc.counts[c];
      ++gc.n;
      if (c != Category::Others) ++in_category;
      gc.curve.push_back(static_cast<double>(in_category) / static_cast<double>(gc.n));
      gc.stems.push_back(r.stem);
    }
    if (gc.n == 0) {
      report.warnings.push_back("group " + std::to_string(g) + ": no favored stems; omitted");
      continue;
    }
    if (gc.n < top_n)
      report.warnings.push_back("group " + std::to_string(g) + ": only " + std::to_string(gc.n) +
                                " favored stems; top-N clipped");
    for (const auto& [c, count] : gc.counts)
      gc.proportions[c] = static_cast<double>(count) / static_cast<double>(gc.n);
    report.groups.push_back(std::move(gc));
  }
  return report;
}

}  // namespace biaslens::lexical
