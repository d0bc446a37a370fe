#include "sglv/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sglv/error.hpp"

namespace sglv {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no, const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line_no << ": " << what;
  throw Error(ErrorCode::kParse, msg.str());
}

double parse_time(const std::string& path, std::size_t line_no, const std::string& field) {
  try {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    if (!std::isfinite(value)) parse_fail(path, line_no, "non-finite time '" + field + "'");
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    parse_fail(path, line_no, "bad time value '" + field + "'");
  }
}

std::int64_t parse_count(const std::string& path, std::size_t line_no, const std::string& field) {
  try {
    std::size_t used = 0;
    const long long value = std::stoll(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    if (value < 0) parse_fail(path, line_no, "negative count '" + field + "'");
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    parse_fail(path, line_no, "bad count value '" + field + "' (counts must be nonnegative integers)");
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

int rank_index(const std::string& level) {
  for (std::size_t i = 0; i < kTaxonomyRanks.size(); ++i) {
    if (level == kTaxonomyRanks[i]) return static_cast<int>(i);
  }
  throw Error(ErrorCode::kArgs, "unknown taxonomic level '" + level +
                                    "' (expected kingdom|phylum|class|order|family|genus)");
}

std::map<std::string, Lineage> load_taxonomy_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) parse_fail(path, 1, "empty taxonomy file");
  const std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.size() != 7 || header[0] != "taxon_id") {
    parse_fail(path, 1, "expected header 'taxon_id,kingdom,phylum,class,order,family,genus'");
  }
  for (std::size_t i = 0; i < kTaxonomyRanks.size(); ++i) {
    if (header[i + 1] != kTaxonomyRanks[i]) {
      parse_fail(path, 1, "expected header 'taxon_id,kingdom,phylum,class,order,family,genus'");
    }
  }
  std::map<std::string, Lineage> taxonomy;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(lines[i]);
    if (fields.size() != 7) {
      parse_fail(path, i + 1, "expected 7 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) parse_fail(path, i + 1, "empty taxon_id");
    if (taxonomy.count(fields[0]) != 0) {
      parse_fail(path, i + 1, "duplicate taxonomy entry for '" + fields[0] + "'");
    }
    Lineage lineage;
    for (std::size_t r = 0; r < 6; ++r) lineage[r] = fields[r + 1];
    taxonomy.emplace(fields[0], std::move(lineage));
  }
  return taxonomy;
}

}  // namespace

std::int64_t CountTable::total(std::size_t taxon) const {
  std::int64_t sum = 0;
  for (const auto& row : counts) sum += row[taxon];
  return sum;
}

CountTable load_counts_csv(const std::string& counts_path, const std::string& taxonomy_path) {
  const std::vector<std::string> lines = read_lines(counts_path);
  if (lines.empty()) parse_fail(counts_path, 1, "empty counts file");
  const std::vector<std::string> header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "time") {
    parse_fail(counts_path, 1, "expected header 'time,<taxon_id>,...'");
  }

  CountTable table;
  table.taxa_ids.assign(header.begin() + 1, header.end());
  for (std::size_t j = 0; j < table.taxa_ids.size(); ++j) {
    if (table.taxa_ids[j].empty()) parse_fail(counts_path, 1, "empty taxon id in header");
    for (std::size_t l = 0; l < j; ++l) {
      if (table.taxa_ids[l] == table.taxa_ids[j]) {
        parse_fail(counts_path, 1, "duplicate taxon id '" + table.taxa_ids[j] + "' in header");
      }
    }
  }
  const std::size_t n_taxa = table.taxa_ids.size();

  std::vector<std::size_t> line_nos;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(lines[i]);
    if (fields.size() != n_taxa + 1) {
      parse_fail(counts_path, i + 1,
                 "expected " + std::to_string(n_taxa + 1) + " fields, got " +
                     std::to_string(fields.size()));
    }
    table.sample_times.push_back(parse_time(counts_path, i + 1, fields[0]));
    std::vector<std::int64_t> row(n_taxa);
    for (std::size_t j = 0; j < n_taxa; ++j) row[j] = parse_count(counts_path, i + 1, fields[j + 1]);
    table.counts.push_back(std::move(row));
    line_nos.push_back(i + 1);
  }

  // Sort samples by time, then reject duplicates (reported at the later line).
  std::vector<std::size_t> order(table.sample_times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.sample_times[a] < table.sample_times[b];
  });
  Vector sorted_times(order.size());
  std::vector<std::vector<std::int64_t>> sorted_counts(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_times[i] = table.sample_times[order[i]];
    sorted_counts[i] = std::move(table.counts[order[i]]);
    if (i > 0 && !(sorted_times[i] > sorted_times[i - 1])) {
      parse_fail(counts_path, std::max(line_nos[order[i]], line_nos[order[i - 1]]),
                 "duplicate sample time " + std::to_string(sorted_times[i]));
    }
  }
  table.sample_times = std::move(sorted_times);
  table.counts = std::move(sorted_counts);

  const std::map<std::string, Lineage> taxonomy = load_taxonomy_csv(taxonomy_path);
  for (const std::string& id : table.taxa_ids) {
    auto it = taxonomy.find(id);
    if (it == taxonomy.end()) {
      throw Error(ErrorCode::kParse, taxonomy_path + ": missing taxonomy entry for taxon '" + id + "'");
    }
    table.taxonomy.emplace(id, it->second);
  }
  return table;
}

CountTable aggregate_taxa(const CountTable& table, const std::string& level) {
  const int level_idx = rank_index(level);

  // Group name per input taxon; unnamed ranks fall back to the nearest named
  // ancestor with an "(unsp.)" marker.
  std::vector<std::string> group_of(table.n_taxa());
  std::map<std::string, Lineage> group_lineage;
  for (std::size_t j = 0; j < table.n_taxa(); ++j) {
    const Lineage& lineage = table.taxonomy.at(table.taxa_ids[j]);
    std::string name = lineage[static_cast<std::size_t>(level_idx)];
    Lineage truncated = lineage;
    for (std::size_t r = static_cast<std::size_t>(level_idx) + 1; r < 6; ++r) truncated[r].clear();
    if (name.empty()) {
      std::string ancestor = "unclassified";
      for (int r = level_idx - 1; r >= 0; --r) {
        if (!lineage[static_cast<std::size_t>(r)].empty()) {
          ancestor = lineage[static_cast<std::size_t>(r)];
          break;
        }
      }
      name = ancestor + " (unsp.)";
    }
    group_of[j] = name;
    group_lineage.emplace(name, truncated);  // first member wins
  }

  CountTable out;
  out.sample_times = table.sample_times;
  for (const auto& [name, lineage] : group_lineage) {
    out.taxa_ids.push_back(name);
    out.taxonomy.emplace(name, lineage);
  }
  std::map<std::string, std::size_t> column_of;
  for (std::size_t j = 0; j < out.taxa_ids.size(); ++j) column_of[out.taxa_ids[j]] = j;

  out.counts.assign(table.n_samples(), std::vector<std::int64_t>(out.taxa_ids.size(), 0));
  for (std::size_t i = 0; i < table.n_samples(); ++i) {
    for (std::size_t j = 0; j < table.n_taxa(); ++j) {
      out.counts[i][column_of[group_of[j]]] += table.counts[i][j];
    }
  }
  return out;
}

CountTable select_top_k(const CountTable& table, std::size_t k) {
  if (k == 0 || k > table.n_taxa()) {
    throw Error(ErrorCode::kArgs, "top-k of " + std::to_string(k) + " out of range for " +
                                      std::to_string(table.n_taxa()) + " taxa");
  }
  std::vector<std::size_t> order(table.n_taxa());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::int64_t> totals(table.n_taxa());
  for (std::size_t j = 0; j < table.n_taxa(); ++j) totals[j] = table.total(j);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (totals[a] != totals[b]) return totals[a] > totals[b];
    return table.taxa_ids[a] < table.taxa_ids[b];
  });
  order.resize(k);

  CountTable out;
  out.sample_times = table.sample_times;
  for (std::size_t j : order) {
    out.taxa_ids.push_back(table.taxa_ids[j]);
    out.taxonomy.emplace(table.taxa_ids[j], table.taxonomy.at(table.taxa_ids[j]));
  }
  out.counts.assign(table.n_samples(), std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < table.n_samples(); ++i) {
    for (std::size_t jj = 0; jj < k; ++jj) out.counts[i][jj] = table.counts[i][order[jj]];
  }
  return out;
}

ObservationSeries to_proportions(const CountTable& table, double pseudocount) {
  if (!(pseudocount >= 0.0) || !std::isfinite(pseudocount)) {
    throw Error(ErrorCode::kRange, "pseudocount must be finite and nonnegative");
  }
  if (table.n_taxa() == 0) throw Error(ErrorCode::kRange, "no taxa to convert");
  Matrix values(table.n_samples(), table.n_taxa());
  for (std::size_t i = 0; i < table.n_samples(); ++i) {
    double denom = 0.0;
    for (std::size_t j = 0; j < table.n_taxa(); ++j) {
      denom += static_cast<double>(table.counts[i][j]) + pseudocount;
    }
    for (std::size_t j = 0; j < table.n_taxa(); ++j) {
      const double smoothed = static_cast<double>(table.counts[i][j]) + pseudocount;
      if (!(smoothed > 0.0)) {
        throw Error(ErrorCode::kRange,
                    "zero count for taxon '" + table.taxa_ids[j] + "' at sample " +
                        std::to_string(i + 1) + "; use a positive pseudocount");
      }
      values(i, j) = smoothed / denom;
    }
  }
  return ObservationSeries(table.sample_times, values);
}

ObservationSeries select_species(const ObservationSeries& series,
                                 const std::vector<std::size_t>& columns) {
  if (columns.empty()) throw Error(ErrorCode::kArgs, "empty species selection");
  for (std::size_t c : columns) {
    if (c >= series.n_species()) {
      throw Error(ErrorCode::kArgs, "species column " + std::to_string(c) + " out of range");
    }
  }
  Matrix values(series.n_obs(), columns.size());
  for (std::size_t i = 0; i < series.n_obs(); ++i) {
    for (std::size_t jj = 0; jj < columns.size(); ++jj) {
      values(i, jj) = series.values()(i, columns[jj]);
    }
  }
  return ObservationSeries(series.times(), values);
}

}  // namespace sglv
