#pragma once

// File formats: tab-separated edge lists with an `# n=<count>` header,
// covariate CSV, one-label-per-line partition files, and the results CSV.
// Writes are atomic (temp file + rename); reals use 17 significant digits.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/experiments.hpp"
#include "irclust/partition.hpp"
#include "irclust/sparse_symmetric.hpp"

namespace irclust {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
  IoError(const std::string& path, std::size_t line, const std::string& msg)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + msg) {}
};

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline double parse_real(const std::string& path, std::size_t line_no, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw IoError(path, line_no, "expected a real number, got '" + tok + "'");
  }
}

inline long parse_int(const std::string& path, std::size_t line_no, const std::string& tok) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw IoError(path, line_no, "expected an integer, got '" + tok + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// --- edge list -------------------------------------------------------------

inline void write_edge_list(const std::string& path, const SparseSymmetric& a) {
  std::ostringstream out;
  out << "# n=" << a.n << "\n";
  std::vector<SparseSymmetric::Entry> sorted = a.entries;
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
    return x.i != y.i ? x.i < y.i : x.j < y.j;
  });
  for (const auto& e : sorted)
    out << e.i << '\t' << e.j << '\t' << format_real(e.w) << "\n";
  detail::write_atomic(path, out.str());
}

inline SparseSymmetric read_edge_list(const std::string& path) {
  const auto lines = detail::read_lines(path);
  SparseSymmetric a;
  bool have_n = false;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("n=");
      if (!have_n && pos != std::string::npos) {
        a.n = std::size_t(detail::parse_int(path, li + 1, line.substr(pos + 2)));
        have_n = true;
      }
      continue;
    }
    if (!have_n) throw IoError(path, li + 1, "missing `# n=<count>` header before data");
    const auto tok = detail::split(line, '\t');
    if (tok.size() != 3) throw IoError(path, li + 1, "expected `i<TAB>j<TAB>w`");
    const long i = detail::parse_int(path, li + 1, tok[0]);
    const long j = detail::parse_int(path, li + 1, tok[1]);
    const double w = detail::parse_real(path, li + 1, tok[2]);
    if (i < 0 || j < 0 || std::size_t(j) >= a.n) throw IoError(path, li + 1, "index out of range");
    if (i > j) throw IoError(path, li + 1, "edges must satisfy i <= j");
    a.entries.push_back({std::uint32_t(i), std::uint32_t(j), w});
  }
  if (!have_n) throw IoError(path + ": missing `# n=<count>` header");
  try {
    a.validate();
  } catch (const std::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return a;
}

// --- covariates ------------------------------------------------------------

inline void write_covariates(const std::string& path, const DenseMatrix& x) {
  std::ostringstream out;
  for (std::size_t c = 0; c < x.cols; ++c) out << (c ? "," : "") << "x" << (c + 1);
  out << "\n";
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols; ++c) out << (c ? "," : "") << format_real(x(r, c));
    out << "\n";
  }
  detail::write_atomic(path, out.str());
}

inline DenseMatrix read_covariates(const std::string& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw IoError(path + ": empty covariate file");
  const auto header = detail::split(lines[0], ',');
  const std::size_t d = header.size();
  std::vector<double> values;
  std::size_t rows = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto tok = detail::split(lines[li], ',');
    if (tok.size() != d) throw IoError(path, li + 1, "ragged row");
    for (const auto& t : tok) values.push_back(detail::parse_real(path, li + 1, t));
    ++rows;
  }
  DenseMatrix x(rows, d);
  x.data = std::move(values);
  return x;
}

// --- labels ----------------------------------------------------------------

inline void write_labels(const std::string& path, const LabeledPartition& z) {
  std::ostringstream out;
  for (int l : z.labels) out << l << "\n";
  detail::write_atomic(path, out.str());
}

// K = 0 infers max label + 1.
inline LabeledPartition read_labels(const std::string& path, int K = 0) {
  const auto lines = detail::read_lines(path);
  std::vector<int> labels;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const long v = detail::parse_int(path, li + 1, lines[li]);
    if (v < 0) throw IoError(path, li + 1, "labels must be non-negative");
    labels.push_back(int(v));
  }
  int k = K;
  if (k == 0)
    for (int l : labels) k = std::max(k, l + 1);
  LabeledPartition z(std::move(labels), std::max(k, 1));
  try {
    z.validate();
  } catch (const std::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return z;
}

// --- results ---------------------------------------------------------------

inline const char* results_csv_header() {
  return "sweep_param,sweep_value,run,algo,seed,nmi,error_rate,iters,converged,wall_time_ms";
}

inline void write_results_csv(const std::string& path, const std::vector<RunRecord>& records,
                              bool zero_timings = false) {
  std::ostringstream out;
  out << results_csv_header() << "\n";
  for (const RunRecord& r : records) {
    out << r.sweep_param << ',' << format_real(r.sweep_value) << ',' << r.run << ',' << r.algo
        << ',' << r.seed << ',' << format_real(r.nmi) << ',' << format_real(r.error_rate) << ','
        << r.iters << ',' << (r.converged ? 1 : 0) << ','
        << format_real(zero_timings ? 0.0 : r.wall_time_ms) << "\n";
  }
  detail::write_atomic(path, out.str());
}

inline std::vector<RunRecord> read_results_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != results_csv_header())
    throw IoError(path + ": missing or unexpected results header");
  std::vector<RunRecord> records;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto tok = detail::split(lines[li], ',');
    if (tok.size() != 10) throw IoError(path, li + 1, "expected 10 columns");
    RunRecord r;
    r.sweep_param = tok[0];
    r.sweep_value = detail::parse_real(path, li + 1, tok[1]);
    r.run = std::size_t(detail::parse_int(path, li + 1, tok[2]));
    r.algo = tok[3];
    r.seed = std::uint64_t(std::stoull(tok[4]));
    r.nmi = detail::parse_real(path, li + 1, tok[5]);
    r.error_rate = detail::parse_real(path, li + 1, tok[6]);
    r.iters = std::size_t(detail::parse_int(path, li + 1, tok[7]));
    r.converged = detail::parse_int(path, li + 1, tok[8]) != 0;
    r.wall_time_ms = detail::parse_real(path, li + 1, tok[9]);
    records.push_back(std::move(r));
  }
  return records;
}

inline void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows,
                              const std::string& sweep_param, bool zero_timings = false) {
  std::ostringstream out;
  out << "algo,sweep_param,sweep_value,count,nmi_mean,nmi_sd,nmi_min,nmi_max,"
         "error_rate_mean,error_rate_sd,error_rate_min,error_rate_max,"
         "exact_recovery_freq,wall_time_ms_mean\n";
  for (const SummaryRow& r : rows) {
    out << r.algo << ',' << sweep_param << ',' << format_real(r.sweep_value) << ',' << r.count
        << ',' << format_real(r.nmi_mean) << ',' << format_real(r.nmi_sd) << ','
        << format_real(r.nmi_min) << ',' << format_real(r.nmi_max) << ','
        << format_real(r.err_mean) << ',' << format_real(r.err_sd) << ','
        << format_real(r.err_min) << ',' << format_real(r.err_max) << ','
        << format_real(r.exact_recovery_freq) << ','
        << format_real(zero_timings ? 0.0 : r.wall_ms_mean) << "\n";
  }
  detail::write_atomic(path, out.str());
}

}  // namespace irclust
