#include "sglv/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sglv/error.hpp"

namespace sglv {

Vector ModelParams::log_growth() const {
  Vector out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) out[k] = r[k] - 0.5 * sigma[k] * sigma[k];
  return out;
}

void ModelParams::validate() const {
  const std::size_t n = r.size();
  if (n == 0) throw Error(ErrorCode::kDim, "ModelParams has zero species");
  if (a.rows() != n || a.cols() != n)
    throw Error(ErrorCode::kDim, "interaction matrix must be N x N");
  if (sigma.size() != n) throw Error(ErrorCode::kDim, "sigma length must be N");
  for (double v : r)
    if (!std::isfinite(v)) throw Error(ErrorCode::kRange, "non-finite growth rate");
  if (!a.all_finite()) throw Error(ErrorCode::kRange, "non-finite interaction coefficient");
  for (double v : sigma)
    if (!std::isfinite(v) || v < 0.0)
      throw Error(ErrorCode::kRange, "sigma entries must be finite and >= 0");
}

ObservationSeries::ObservationSeries(Vector times, Matrix values)
    : times_(std::move(times)), values_(std::move(values)) {
  const std::size_t n = times_.size();
  if (n < 2) throw Error(ErrorCode::kDim, "series needs at least 2 observations");
  if (values_.rows() != n)
    throw Error(ErrorCode::kDim, "series value rows must match time count");
  if (values_.cols() == 0) throw Error(ErrorCode::kDim, "series has zero species");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(times_[i]))
      throw Error(ErrorCode::kRange, "non-finite observation time");
    if (i + 1 < n && !(times_[i] < times_[i + 1]))
      throw Error(ErrorCode::kRange, "observation times must be strictly increasing");
  }
  log_values_ = Matrix(n, values_.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < values_.cols(); ++k) {
      const double x = values_(i, k);
      if (!(x > 0.0) || !std::isfinite(x))
        throw Error(ErrorCode::kRange, "series values must be strictly positive");
      log_values_(i, k) = std::log(x);
    }
}

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw Error(ErrorCode::kParse, "malformed JSON in " + what);
  return doc;
}

Vector as_vector(const json& node, const std::string& key) {
  if (!node.is_array()) throw Error(ErrorCode::kParse, key + " must be an array");
  Vector out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number()) throw Error(ErrorCode::kParse, key + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ModelParams params_from_json_text(const std::string& text) {
  const json doc = parse_json(text, "model parameters");
  if (!doc.contains("r") || !doc.contains("A") || !doc.contains("sigma"))
    throw Error(ErrorCode::kParse, "model parameters need keys r, A, sigma");
  ModelParams params;
  params.r = as_vector(doc["r"], "r");
  params.sigma = as_vector(doc["sigma"], "sigma");
  const json& rows = doc["A"];
  if (!rows.is_array()) throw Error(ErrorCode::kParse, "A must be an array of rows");
  const std::size_t n = params.r.size();
  params.a = Matrix(rows.size(), n);
  std::size_t i = 0;
  for (const auto& row : rows) {
    const Vector vals = as_vector(row, "A row");
    if (vals.size() != n)
      throw Error(ErrorCode::kParse, "A rows must have length N");
    for (std::size_t j = 0; j < n; ++j) params.a(i, j) = vals[j];
    ++i;
  }
  params.validate();
  return params;
}

std::string params_to_json_text(const ModelParams& params) {
  params.validate();
  json doc;
  doc["r"] = params.r;
  doc["sigma"] = params.sigma;
  json rows = json::array();
  for (std::size_t i = 0; i < params.a.rows(); ++i) rows.push_back(params.a.row(i));
  doc["A"] = rows;
  return doc.dump(2) + "\n";
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file: " + path);
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace

ModelParams load_params_json(const std::string& path) {
  return params_from_json_text(read_file(path));
}

void save_params_json(const ModelParams& params, const std::string& path) {
  write_file(path, params_to_json_text(params));
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void save_series_csv(const ObservationSeries& series, const std::string& path) {
  std::ostringstream out;
  out << "time";
  for (std::size_t k = 1; k <= series.n_species(); ++k) out << ",x_" << k;
  out << "\n";
  for (std::size_t i = 0; i < series.n_obs(); ++i) {
    out << format_full(series.times()[i]);
    for (std::size_t k = 0; k < series.n_species(); ++k)
      out << ',' << format_full(series.values()(i, k));
    out << "\n";
  }
  write_file(path, out.str());
}

ObservationSeries load_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::kParse, "empty series file: " + path);

  std::size_t n_cols = 1;
  for (char c : line)
    if (c == ',') ++n_cols;
  if (n_cols < 2)
    throw Error(ErrorCode::kParse, "series file needs a time column and at least one species");
  if (line.substr(0, line.find(',')) != "time")
    throw Error(ErrorCode::kParse, path + ":1: series header must start with 'time'");
  const std::size_t n_species = n_cols - 1;

  Vector times;
  std::vector<double> flat;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        vals.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParse,
                    path + ":" + std::to_string(line_no) + ": bad numeric field '" + cell + "'");
      }
    }
    if (vals.size() != n_cols)
      throw Error(ErrorCode::kParse,
                  path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(n_cols) + " fields, got " + std::to_string(vals.size()));
    times.push_back(vals[0]);
    flat.insert(flat.end(), vals.begin() + 1, vals.end());
  }
  if (times.size() < 2)
    throw Error(ErrorCode::kParse, "series file needs at least 2 data rows: " + path);

  Matrix values(times.size(), n_species);
  for (std::size_t i = 0; i < times.size(); ++i)
    for (std::size_t k = 0; k < n_species; ++k) values(i, k) = flat[i * n_species + k];
  return ObservationSeries(std::move(times), std::move(values));
}

}  // namespace sglv
