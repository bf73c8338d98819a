#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "biaslens/model.hpp"
#include "biaslens/structural.hpp"
#include "biaslens/text.hpp"

namespace biaslens::lexical {

using structural::GroupRoles;

struct LexicalOptions {
  /// Minimum number of documents a stem must appear in to become a classifier
  /// feature (and to be listed in likelihood tables).
  std::uint64_t min_df = 5;
  /// Count token occurrences instead of document presence for P(word|g).
  bool token_frequency = false;
};

struct StemStats {
  std::vector<std::uint64_t> group_df;  // documents of group g containing the stem
  std::uint64_t df = 0;
  std::vector<std::uint64_t> group_tf;  // token occurrences in group g
  std::uint64_t tf = 0;
};

struct RankedStem {
  std::string stem;
  double score = 0.0;
  GroupId favored;
};

/// Sparse tf-idf row of one training document.
struct TfidfRow {
  std::string entity_id;
  std::vector<std::pair<std::size_t, double>> weights;  // feature index -> weight
};

/// Vocabulary statistics plus a multinomial Naive Bayes model over tf-idf
/// weighted stems. Immutable after training.
struct LexicalModel {
  std::string edition;
  std::vector<std::string> group_names;
  GroupRoles roles;
  LexicalOptions options;

  std::vector<std::uint64_t> doc_counts;    // per group
  std::vector<std::uint64_t> token_counts;  // per group
  std::uint64_t total_docs = 0;
  std::uint64_t total_tokens = 0;
  std::map<std::string, StemStats> vocabulary;

  std::vector<std::string> features;  // vocabulary filtered by min_df, sorted
  std::unordered_map<std::string, std::size_t> feature_index;
  std::vector<double> idf;                      // per feature
  std::vector<std::vector<double>> log_theta;   // [group][feature]
  std::vector<double> log_prior;                // per group; -inf for empty groups
  std::vector<TfidfRow> tfidf;                  // per training document
  std::vector<RankedStem> nb_ranking;

  std::vector<std::string> warnings;
};

/// Tokenized documents of one edition whose entity resolves to a group.
struct LabeledDocument {
  std::string entity_id;
  GroupId group;
  std::vector<std::string> stems;
};

std::vector<LabeledDocument> prepare_corpus(const std::vector<Document>& corpus,
                                            const EntityTable& table, const std::string& edition,
                                            const text::StemmerRegistry& stemmers,
                                            std::vector<std::string>* warnings = nullptr);

/// Document (or token) frequencies per group. Documents are processed in a
/// canonical order, so the result does not depend on corpus order.
LexicalModel count_vocabulary(const std::vector<LabeledDocument>& docs,
                              const std::vector<std::string>& group_names, GroupRoles roles,
                              const std::string& edition, const LexicalOptions& options);

struct WordLikelihood {
  std::string stem;
  double p_word = 0.0;
  std::vector<double> p_word_given_group;
  std::vector<double> group_prior;
  /// ln(P(word|g) / P(word)); nullopt when the stem never occurs in group g.
  std::vector<std::optional<double>> llr;
  /// P(g|word) / (1 - P(g|word)); +inf when only group g uses the stem.
  std::vector<double> posterior_odds;
  std::uint64_t df = 0;
};

/// One row per vocabulary stem, sorted by stem. Requires every role group to
/// have at least one document.
std::vector<WordLikelihood> word_likelihood_ratios(const LexicalModel& counts);
std::vector<WordLikelihood> word_likelihood_ratios(const std::vector<Document>& corpus,
                                                   const EntityTable& table,
                                                   const std::string& edition, GroupRoles roles,
                                                   const LexicalOptions& options = {});

/// Fits tf-idf features (ln(1 + tf) * ln(N / df)) and a multinomial Naive
/// Bayes model with add-one smoothing, then ranks stems by
/// |log theta(stem|minority) - log theta(stem|majority)|, ties broken by stem.
LexicalModel train_discriminative_ranking(const std::vector<LabeledDocument>& docs,
                                          const std::vector<std::string>& group_names,
                                          GroupRoles roles, const std::string& edition,
                                          const LexicalOptions& options = {});
LexicalModel train_discriminative_ranking(const std::vector<Document>& corpus,
                                          const EntityTable& table, const std::string& edition,
                                          GroupRoles roles, const LexicalOptions& options = {},
                                          const text::StemmerRegistry& stemmers =
                                              text::default_stemmers());

struct Classification {
  GroupId group;
  std::vector<double> log_posterior;  // unnormalized, per group
};

Classification classify(const LexicalModel& model, const std::vector<std::string>& stems);
Classification classify(const LexicalModel& model, const std::string& document_text,
                        const text::StemmerRegistry& stemmers = text::default_stemmers());

struct GroupCategories {
  GroupId group;
  std::size_t n = 0;
  std::map<Category, std::size_t> counts;
  std::map<Category, double> proportions;
  /// Share of the top-n stems in Gender, Relationship or Family for n = 1..N.
  std::vector<double> curve;
  std::vector<std::string> stems;
};

struct CategoryReport {
  std::size_t top_n = 0;
  std::vector<GroupCategories> groups;
  std::vector<std::string> warnings;

  const GroupCategories* find(GroupId g) const;
  /// Proportion of the group's top stems that fall in any coded category.
  double in_category_share(GroupId g) const;
};

/// For each group, the first `top_n` stems of `ranking` favoring it, coded
/// with `lexicons`. Groups with fewer stems are clipped with a warning; groups
/// with none are omitted.
CategoryReport category_report(const std::vector<RankedStem>& ranking, const Lexicons& lexicons,
                               std::size_t n_groups, std::size_t top_n = 150);

}  // namespace biaslens::lexical
