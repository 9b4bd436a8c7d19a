// include/cacps/report.hpp

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

#ifndef CACPS_REPORT_HPP_
#define CACPS_REPORT_HPP_

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "cacps/train.hpp"

namespace cacps {

// Evaluation CSV columns (fixed): method,sample_id,dice_LV,dice_MYO,
// dice_RV,dice_avg. Per-sample rows followed by one aggregate row with
// sample_id "ALL".
extern const char kEvalHeader[];

void write_eval_csv(const std::string& path, const std::string& method,
                    const std::vector<DiceRow>& rows);

// One comparison-table row: each eval CSV contributes its aggregate row to
// its method's group; mean and half the min-max range per dice column.
struct MethodSummary {
  std::string method;
  int runs = 0;
  std::array<double, 4> mean{};        // LV, MYO, RV, avg
  std::array<double, 4> half_range{};
};

// Parse eval CSVs and group them. Unreadable file -> error "io";
// missing/misnamed column -> error "format" naming the column;
// no aggregate row -> error "format".
std::vector<MethodSummary> summarize_evals(
    const std::vector<std::string>& csv_paths);

// Human-readable table; mean alone for single runs, mean +- half-range
// otherwise.
void print_report(const std::vector<MethodSummary>& rows, std::ostream& os);

// Machine-readable table: method,runs,<col>_mean,<col>_range per dice col.
void write_report_csv(const std::vector<MethodSummary>& rows,
                      const std::string& path);

}  // namespace cacps

#endif  // CACPS_REPORT_HPP_
