#pragma once

// Plain comma-separated tables (no quoting) for traces, labels, accuracies,
// metrics, and result rows.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "specrob/error.hpp"
#include "specrob/path_metrics.hpp"
#include "specrob/robustness.hpp"

namespace specrob::io {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return {buf.data(), end};
}

inline std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    out.emplace_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct CsvRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

inline CsvTable parse_csv(std::istream& in, const std::string& context) {
  CsvTable t;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_fields(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError(context + ":" + std::to_string(number) + ": expected " +
                       std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back({number, std::move(fields)});
  }
  if (t.header.empty()) throw ParseError(context + ": missing header row");
  return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_csv(in, path.string());
}

inline double parse_number(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ParseError(where + ": '" + s + "' is not a number");
  return v;
}

inline long parse_integer(const std::string& s, const std::string& where) {
  long v = 0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ParseError(where + ": '" + s + "' is not an integer");
  return v;
}

inline void require_header(const CsvTable& t, const std::vector<std::string>& expected,
                           const std::string& context) {
  if (t.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw ParseError(context + ": header must be '" + want + "'");
  }
}

/// Expects `path_id,step,p_0,...,p_{K-1}`. Rows may arrive in any order;
/// each path's steps must be exactly 1..T.
inline std::vector<PredictionTrace> parse_traces(std::istream& in, const std::string& context) {
  const CsvTable t = parse_csv(in, context);
  if (t.header.size() < 4 || t.header[0] != "path_id" || t.header[1] != "step") {
    throw ParseError(context + ": header must be 'path_id,step,p_0,...,p_{K-1}' with K >= 2");
  }
  const std::size_t classes = t.header.size() - 2;
  for (std::size_t k = 0; k < classes; ++k) {
    if (t.header[k + 2] != "p_" + std::to_string(k)) {
      throw ParseError(context + ": column " + std::to_string(k + 3) + " must be 'p_" + std::to_string(k) + "'");
    }
  }
  struct Step {
    long step;
    std::size_t line;
    std::vector<double> probs;
  };
  std::map<std::string, std::vector<Step>> paths;
  std::vector<std::string> order;
  for (const auto& row : t.rows) {
    const std::string where = context + ":" + std::to_string(row.line);
    const std::string& id = row.fields[0];
    if (id.empty()) throw ParseError(where + ": empty path_id");
    Step s{parse_integer(row.fields[1], where), row.line, {}};
    double sum = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double p = parse_number(row.fields[k + 2], where);
      if (!std::isfinite(p) || p < 0.0) {
        throw ParseError(where + ": path '" + id + "' has an invalid probability '" + row.fields[k + 2] + "'");
      }
      sum += p;
      s.probs.push_back(p);
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
      throw ParseError(where + ": path '" + id + "' probabilities sum to " + format_double(sum) + ", not 1");
    }
    if (!paths.count(id)) order.push_back(id);
    paths[id].push_back(std::move(s));
  }
  std::vector<PredictionTrace> traces;
  for (const auto& id : order) {
    auto steps = paths[id];
    std::stable_sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.step < b.step; });
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i].step != static_cast<long>(i + 1)) {
        throw ParseError(context + ":" + std::to_string(steps[i].line) + ": path '" + id +
                         "' steps are not contiguous from 1 (expected step " + std::to_string(i + 1) +
                         ", found " + std::to_string(steps[i].step) + ")");
      }
    }
    if (steps.size() < 2) {
      throw ParseError(context + ":" + std::to_string(steps.front().line) + ": path '" + id +
                       "' has fewer than 2 steps");
    }
    std::vector<double> probs;
    for (const auto& s : steps) probs.insert(probs.end(), s.probs.begin(), s.probs.end());
    traces.emplace_back(id, steps.size(), classes, std::move(probs));
  }
  return traces;
}

inline std::vector<PredictionTrace> read_traces(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_traces(in, path.string());
}

inline std::string format_traces(const std::vector<PredictionTrace>& traces) {
  require(!traces.empty(), "no traces to write");
  const std::size_t classes = traces.front().classes();
  std::string out = "path_id,step";
  for (std::size_t k = 0; k < classes; ++k) out += ",p_" + std::to_string(k);
  out += '\n';
  for (const auto& tr : traces) {
    require(tr.classes() == classes, "all traces must share the class count");
    for (std::size_t t = 0; t < tr.steps(); ++t) {
      out += tr.path_id() + "," + std::to_string(t + 1);
      for (double p : tr.row(t)) out += "," + format_double(p);
      out += '\n';
    }
  }
  return out;
}

/// `index,label` rows; returns labels ordered by index 0..N-1.
inline std::vector<int> read_labels(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  require_header(t, {"index", "label"}, path.string());
  std::vector<int> labels(t.rows.size(), 0);
  std::vector<bool> seen(t.rows.size(), false);
  for (const auto& row : t.rows) {
    const std::string where = path.string() + ":" + std::to_string(row.line);
    const long idx = parse_integer(row.fields[0], where);
    if (idx < 0 || static_cast<std::size_t>(idx) >= labels.size() || seen[static_cast<std::size_t>(idx)]) {
      throw ParseError(where + ": index " + row.fields[0] + " is out of range or repeated");
    }
    seen[static_cast<std::size_t>(idx)] = true;
    labels[static_cast<std::size_t>(idx)] = static_cast<int>(parse_integer(row.fields[1], where));
  }
  return labels;
}

inline std::string format_labels(const std::vector<int>& labels) {
  std::string out = "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
  }
  return out;
}

inline std::vector<AccuracyRecord> read_accuracies(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  require_header(t, {"model_id", "group", "dataset_id", "correct", "total"}, path.string());
  std::vector<AccuracyRecord> out;
  for (const auto& row : t.rows) {
    const std::string where = path.string() + ":" + std::to_string(row.line);
    AccuracyRecord r{row.fields[0], row.fields[1], row.fields[2], parse_integer(row.fields[3], where),
                     parse_integer(row.fields[4], where)};
    if (r.total < 1 || r.correct < 0 || r.correct > r.total) {
      throw ParseError(where + ": need 0 <= correct <= total and total >= 1");
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string format_accuracies(const std::vector<AccuracyRecord>& records) {
  std::string out = "model_id,group,dataset_id,correct,total\n";
  for (const auto& r : records) {
    out += r.model_id + "," + r.group + "," + r.dataset_id + "," + std::to_string(r.correct) + "," +
           std::to_string(r.total) + "\n";
  }
  return out;
}

inline std::vector<MetricRecord> read_metrics(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  require_header(t, {"model_id", "metric_name", "value", "value_kind"}, path.string());
  std::vector<MetricRecord> out;
  for (const auto& row : t.rows) {
    const std::string where = path.string() + ":" + std::to_string(row.line);
    MetricRecord r{row.fields[0], row.fields[1], parse_number(row.fields[2], where), ValueKind::raw};
    if (row.fields[3] == "accuracy") {
      r.value_kind = ValueKind::accuracy;
    } else if (row.fields[3] != "raw") {
      throw ParseError(where + ": value_kind must be 'accuracy' or 'raw'");
    }
    if (r.value_kind == ValueKind::accuracy && (r.value < 0.0 || r.value > 1.0)) {
      throw ParseError(where + ": accuracy-kind value outside [0, 1]");
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string format_metrics(const std::vector<MetricRecord>& records) {
  std::string out = "model_id,metric_name,value,value_kind\n";
  for (const auto& r : records) {
    out += r.model_id + "," + r.metric_name + "," + format_double(r.value) + "," +
           (r.value_kind == ValueKind::accuracy ? "accuracy" : "raw") + "\n";
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace specrob::io
