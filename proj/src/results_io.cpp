#include "gspmap/harness.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace gspmap {

namespace {

constexpr const char* kColumns[] = {"scenario", "point",      "estimator",  "metric",  "mean",
                                    "stderr",   "time_mean", "iters_mean", "diverged"};
constexpr std::size_t kColumnCount = sizeof(kColumns) / sizeof(kColumns[0]);

std::string header() {
  std::string h;
  for (std::size_t i = 0; i < kColumnCount; ++i) h += (i ? "," : "") + std::string(kColumns[i]);
  return h;
}

double parse_double(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("results row " + std::to_string(row) + ": bad number '" + s + "'");
  }
}

}  // namespace

ResultFormat parse_result_format(const std::string& name) {
  if (name == "csv") return ResultFormat::Csv;
  if (name == "json") return ResultFormat::Json;
  throw InvalidConfig("unknown result format '" + name + "' (expected csv or json)");
}

void write_results(std::ostream& out, const ResultTable& table, ResultFormat format) {
  if (format == ResultFormat::Json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"scenario", r.scenario},
                      {"point", r.point},
                      {"estimator", r.estimator},
                      {"metric", r.metric},
                      {"mean", r.mean},
                      {"stderr", r.stderr_},
                      {"time_mean", r.time_mean},
                      {"iters_mean", r.iters_mean},
                      {"diverged", r.diverged}});
    }
    out << rows.dump(2) << '\n';
    return;
  }
  out << header() << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : table.rows) {
    out << r.scenario << ',' << r.point << ',' << r.estimator << ',' << r.metric << ',' << r.mean << ','
        << r.stderr_ << ',' << r.time_mean << ',' << r.iters_mean << ',' << r.diverged << '\n';
  }
}

ResultTable read_results(std::istream& in, ResultFormat format) {
  ResultTable table;
  if (format == ResultFormat::Json) {
    nlohmann::json rows;
    try {
      in >> rows;
      for (const auto& j : rows) {
        ResultRow r;
        r.scenario = j.at("scenario").get<std::string>();
        r.point = j.at("point").get<double>();
        r.estimator = j.at("estimator").get<std::string>();
        r.metric = j.at("metric").get<std::string>();
        r.mean = j.at("mean").get<double>();
        r.stderr_ = j.at("stderr").get<double>();
        r.time_mean = j.at("time_mean").get<double>();
        r.iters_mean = j.at("iters_mean").get<double>();
        r.diverged = j.at("diverged").get<long>();
        table.rows.push_back(std::move(r));
      }
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("results json: ") + e.what());
    }
    return table;
  }
  std::string line;
  if (!std::getline(in, line) || line != header()) throw IoError("results csv: unexpected header");
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != kColumnCount) throw IoError("results row " + std::to_string(row) + ": wrong field count");
    ResultRow r;
    r.scenario = f[0];
    r.point = parse_double(f[1], row);
    r.estimator = f[2];
    r.metric = f[3];
    r.mean = parse_double(f[4], row);
    r.stderr_ = parse_double(f[5], row);
    r.time_mean = parse_double(f[6], row);
    r.iters_mean = parse_double(f[7], row);
    r.diverged = static_cast<long>(parse_double(f[8], row));
    table.rows.push_back(std::move(r));
  }
  return table;
}

void emit_results(const ResultTable& table, const std::string& path, ResultFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_results(out, table, format);
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace gspmap
