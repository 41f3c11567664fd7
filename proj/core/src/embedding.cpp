#include "graphmax/embedding.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace graphmax {

bool EmbeddingTable::has_labels() const {
  if (labels.empty()) return false;
  for (int l : labels) {
    if (l < 0) return false;
  }
  return true;
}

void EmbeddingTable::validate() const {
  const int m = size();
  if (m == 0) throw std::invalid_argument("EmbeddingTable: empty");
  if (static_cast<int>(labels.size()) != m || vectors.rows() != m) {
    throw std::invalid_argument("EmbeddingTable: row counts disagree");
  }
  if (vectors.cols() < 1) throw std::invalid_argument("EmbeddingTable: zero-width vectors");
  require_finite(vectors, "EmbeddingTable");
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  return fields;
}

double parse_double(const std::string& s, const std::string& path, int lineno) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& path, int lineno) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad integer '" + s + "'");
  }
}

}  // namespace

void write_embedding_csv(const EmbeddingTable& table, const std::string& path) {
  table.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_embedding_csv: cannot open " + path);
  out << "graph_id, label";
  for (int k = 0; k < table.dim(); ++k) out << ", x_" << (k + 1);
  out << "\n";
  for (int i = 0; i < table.size(); ++i) {
    out << table.graph_ids[static_cast<std::size_t>(i)] << ", "
        << table.labels[static_cast<std::size_t>(i)];
    for (int k = 0; k < table.dim(); ++k) out << ", " << format_double(table.vectors(i, k));
    out << "\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write_embedding_csv: write failed for " + path);
}

EmbeddingTable read_embedding_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_embedding_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_embedding_csv: " + path + " is empty");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "graph_id" || header[1] != "label") {
    throw std::runtime_error("read_embedding_csv: " + path + " has an unexpected header");
  }
  const int dim = static_cast<int>(header.size()) - 2;

  EmbeddingTable table;
  std::vector<double> data;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != dim + 2) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(dim + 2) + " fields, got " +
                               std::to_string(fields.size()));
    }
    table.graph_ids.push_back(parse_int(fields[0], path, lineno));
    table.labels.push_back(parse_int(fields[1], path, lineno));
    for (int k = 0; k < dim; ++k) {
      data.push_back(parse_double(fields[static_cast<std::size_t>(k + 2)], path, lineno));
    }
  }
  if (table.graph_ids.empty()) {
    throw std::runtime_error("read_embedding_csv: " + path + " has no data rows");
  }
  table.vectors = Matrix(static_cast<int>(table.graph_ids.size()), dim, std::move(data));
  table.validate();
  return table;
}

void write_summary_csv(const std::vector<Matrix>& summaries, const std::string& path) {
  if (summaries.empty()) throw std::invalid_argument("write_summary_csv: no summaries");
  const int dim = summaries.front().cols();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
  out << "graph_id";
  for (int k = 0; k < dim; ++k) out << ", s_" << (k + 1);
  out << "\n";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const Matrix& s = summaries[i];
    if (s.rows() != 1 || s.cols() != dim) {
      throw std::invalid_argument("write_summary_csv: summary " + std::to_string(i) +
                                  " has shape " + s.shape_str());
    }
    out << i;
    for (int k = 0; k < dim; ++k) out << ", " << format_double(s(0, k));
    out << "\n";
  }
  out.flush();
  if (!out) throw std::runtime_error("write_summary_csv: write failed for " + path);
}

}  // namespace graphmax
