#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "persuasion/game.hpp"

namespace persuasion {

// Per-feature logistic link tying EF bits to review scores:
// P(bit = 1) = logistic(alpha + beta * (score - 8)). Shipped as a frozen,
// versioned fixture so generated corpora are reproducible.
struct EfLink {
  double alpha = 0.0;
  double beta = 0.0;
};

struct EfLinkModel {
  int version = 1;
  std::array<EfLink, kEfCount> features{};

  static const EfLinkModel& builtin();
};

struct Corpus {
  std::vector<Hotel> hotels;
  std::optional<std::uint64_t> generation_seed;  // absent for ingested corpora

  int hotel_index(const std::string& hotel_id) const;
  // Global review index used as the Majority-baseline key.
  int review_index(int hotel, int slot) const { return hotel * 7 + slot; }

 private:
  mutable std::map<std::string, int> id_index_;
};

struct CorpusStats {
  int n = 0;
  double good_fraction = 0.0;
  double median_mean_score = 0.0;  // lower-middle element for even n
  std::array<int, 9> score_histogram{};  // hotel means binned [1,2)..[9,10]
};

// Deterministic synthetic corpus: ~half good hotels, median mean-score near
// 8.01, 7 reviews per hotel whose mean equals the drawn hotel mean, EF bits
// sampled from the link model. One PRNG stream per hotel, so generation can
// be parallelized without changing the output.
Corpus generate_corpus(std::uint64_t seed, int n_hotels = 1068,
                       const EfLinkModel& link = EfLinkModel::builtin());

CorpusStats corpus_stats(const Corpus& corpus);

// Ingestion failure with the offending hotel / row in the message.
class IngestError : public std::runtime_error {
 public:
  enum class Kind { MissingColumn, BadScoreRange, WrongReviewCount, BadRow, Inconsistent };
  IngestError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// CSV columns: hotel_id, review_id, score, ef_0..ef_35 (header required).
// schema_map renames file columns to those roles; empty map = identity.
Corpus ingest_corpus_csv(const std::string& path,
                         const std::map<std::string, std::string>& schema_map = {});
void write_corpus_csv(const Corpus& corpus, const std::string& path);
std::string corpus_csv_string(const Corpus& corpus);

// 64-bit FNV-1a over the canonical CSV serialization; names the corpus in
// run artifacts so mismatched inputs are rejected.
std::uint64_t corpus_hash(const Corpus& corpus);

}  // namespace persuasion
