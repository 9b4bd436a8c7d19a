// src/report.cc

// Copyright 2026  The CACPS Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cacps/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "cacps/error.hpp"

namespace cacps {

const char kEvalHeader[] = "method,sample_id,dice_LV,dice_MYO,dice_RV,dice_avg";

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

void write_eval_csv(const std::string& path, const std::string& method,
                    const std::vector<DiceRow>& rows) {
  std::ofstream os(path);
  if (!os) fail("io", "cannot write eval csv: " + path);
  os << kEvalHeader << '\n';
  for (const DiceRow& r : rows)
    os << method << ',' << r.sample_id << ',' << fmt(r.dice[0]) << ','
       << fmt(r.dice[1]) << ',' << fmt(r.dice[2]) << ',' << fmt(r.avg)
       << '\n';
  if (!os) fail("io", "short write on eval csv: " + path);
}

std::vector<MethodSummary> summarize_evals(
    const std::vector<std::string>& csv_paths) {
  if (csv_paths.empty()) fail("config", "report needs at least one eval csv");

  struct Agg {
    std::vector<std::array<double, 4>> runs;
  };
  std::vector<std::string> method_order;
  std::map<std::string, Agg> by_method;

  const std::vector<std::string> required = {
      "method", "sample_id", "dice_LV", "dice_MYO", "dice_RV", "dice_avg"};

  for (const std::string& path : csv_paths) {
    std::ifstream is(path);
    if (!is) fail("io", "cannot open eval csv: " + path);
    std::string line;
    if (!std::getline(is, line)) fail("format", "empty eval csv: " + path);
    const std::vector<std::string> header = split_csv_line(line);

    std::map<std::string, size_t> col;
    for (size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const std::string& name : required)
      if (!col.count(name))
        fail("format", "eval csv " + path + " is missing column '" + name +
                           "'");

    bool found_aggregate = false;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> cells = split_csv_line(line);
      if (cells.size() < header.size())
        fail("format", "short row in eval csv: " + path);
      if (cells[col["sample_id"]] != "ALL") continue;
      found_aggregate = true;
      const std::string method = cells[col["method"]];
      std::array<double, 4> v{};
      try {
        v[0] = std::stod(cells[col["dice_LV"]]);
        v[1] = std::stod(cells[col["dice_MYO"]]);
        v[2] = std::stod(cells[col["dice_RV"]]);
        v[3] = std::stod(cells[col["dice_avg"]]);
      } catch (const std::exception&) {
        fail("format", "non-numeric dice cell in eval csv: " + path);
      }
      if (!by_method.count(method)) method_order.push_back(method);
      by_method[method].runs.push_back(v);
    }
    if (!found_aggregate)
      fail("format", "eval csv has no aggregate 'ALL' row: " + path);
  }

  std::vector<MethodSummary> out;
  for (const std::string& method : method_order) {
    const Agg& agg = by_method[method];
    MethodSummary s;
    s.method = method;
    s.runs = static_cast<int>(agg.runs.size());
    for (size_t c = 0; c < 4; ++c) {
      double sum = 0.0, lo = agg.runs[0][c], hi = agg.runs[0][c];
      for (const auto& r : agg.runs) {
        sum += r[c];
        lo = std::min(lo, r[c]);
        hi = std::max(hi, r[c]);
      }
      s.mean[c] = sum / static_cast<double>(agg.runs.size());
      s.half_range[c] = 0.5 * (hi - lo);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void print_report(const std::vector<MethodSummary>& rows, std::ostream& os) {
  os << "method                    runs  dice_LV          dice_MYO         "
        "dice_RV          dice_avg\n";
  for (const MethodSummary& r : rows) {
    char line[256];
    if (r.runs > 1) {
      std::snprintf(line, sizeof(line),
                    "%-25s %-5d %.4f +- %.4f  %.4f +- %.4f  %.4f +- %.4f  "
                    "%.4f +- %.4f\n",
                    r.method.c_str(), r.runs, r.mean[0], r.half_range[0],
                    r.mean[1], r.half_range[1], r.mean[2], r.half_range[2],
                    r.mean[3], r.half_range[3]);
    } else {
      std::snprintf(line, sizeof(line),
                    "%-25s %-5d %.4f           %.4f           %.4f          "
                    " %.4f\n",
                    r.method.c_str(), r.runs, r.mean[0], r.mean[1], r.mean[2],
                    r.mean[3]);
    }
    os << line;
  }
}

void write_report_csv(const std::vector<MethodSummary>& rows,
                      const std::string& path) {
  std::ofstream os(path);
  if (!os) fail("io", "cannot write report csv: " + path);
  os << "method,runs,dice_LV_mean,dice_LV_range,dice_MYO_mean,dice_MYO_range,"
        "dice_RV_mean,dice_RV_range,dice_avg_mean,dice_avg_range\n";
  for (const MethodSummary& r : rows) {
    os << r.method << ',' << r.runs;
    for (size_t c = 0; c < 4; ++c)
      os << ',' << fmt(r.mean[c]) << ',' << fmt(r.half_range[c]);
    os << '\n';
  }
  if (!os) fail("io", "short write on report csv: " + path);
}

}  // namespace cacps
