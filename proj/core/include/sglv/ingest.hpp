#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sglv/model.hpp"

namespace sglv {

inline constexpr std::array<const char*, 6> kTaxonomyRanks = {
    "kingdom", "phylum", "class", "order", "family", "genus"};

using Lineage = std::array<std::string, 6>;

// Raw OTU counts over time plus the lineage of every taxon column.
struct CountTable {
  Vector sample_times;  // days, strictly increasing
  std::vector<std::string> taxa_ids;
  std::vector<std::vector<std::int64_t>> counts;  // n_samples x n_taxa
  std::map<std::string, Lineage> taxonomy;

  std::size_t n_samples() const { return sample_times.size(); }
  std::size_t n_taxa() const { return taxa_ids.size(); }
  std::int64_t total(std::size_t taxon) const;
};

// counts CSV: header `time,<taxon_id_1>,...`; taxonomy CSV:
// `taxon_id,kingdom,phylum,class,order,family,genus` (empty ranks allowed).
// Rows come back sorted by time; duplicate times and negative counts are
// rejected with line numbers.
CountTable load_counts_csv(const std::string& counts_path, const std::string& taxonomy_path);

// Sums counts over taxa sharing the given rank. Taxa missing that rank are
// bucketed as "<nearest named ancestor> (unsp.)".
CountTable aggregate_taxa(const CountTable& table, const std::string& level);

// Keeps the k taxa with the largest total counts; ties broken by
// lexicographically smaller taxon id. Dropped taxa are discarded, not pooled.
CountTable select_top_k(const CountTable& table, std::size_t k);

// x_k(t_i) = (count + pseudocount) / sum_l (count_l + pseudocount).
ObservationSeries to_proportions(const CountTable& table, double pseudocount = 0.5);

// Column subset of a series (used by the full-community renormalization path).
ObservationSeries select_species(const ObservationSeries& series,
                                 const std::vector<std::size_t>& columns);

}  // namespace sglv
