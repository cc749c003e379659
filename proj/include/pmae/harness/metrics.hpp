// Copyright 2026 The pmae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

namespace pmae {

/// One per-epoch record. Pretraining loss is additionally reported x1000.
struct EpochRecord {
  std::string phase;  // "pretrain" | "finetune"
  std::size_t epoch = 0;
  std::uint64_t step = 0;
  double loss = 0.0;  // mean training loss over the epoch
  double loss_x1000() const noexcept { return 1000.0 * loss; }
  double lr = 0.0;
  std::optional<double> accuracy;
};

nlohmann::json to_json(const EpochRecord& record);

/// Append-only JSON-lines writer. Wall-clock time goes to a sibling
/// timing file so the metrics stream itself stays byte-deterministic.
class MetricsLog {
 public:
  MetricsLog() = default;
  /// Writes <dir>/<stem>.jsonl and <dir>/<stem>.timing.jsonl; an empty
  /// `dir` disables file output.
  MetricsLog(const std::string& dir, const std::string& stem, bool append);

  void write(const EpochRecord& record, double wall_seconds);

 private:
  std::ofstream metrics_;
  std::ofstream timing_;
  std::optional<std::size_t> last_epoch_;
  std::string last_phase_;
};

}  // namespace pmae
