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

#include "pmae/harness/metrics.hpp"

#include <filesystem>
#include <stdexcept>

namespace pmae {

nlohmann::json to_json(const EpochRecord& r) {
  nlohmann::json j = {{"phase", r.phase}, {"epoch", r.epoch}, {"step", r.step}, {"loss", r.loss},
                      {"lr", r.lr}};
  if (r.phase == "pretrain") j["loss_x1000"] = r.loss_x1000();
  j["accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
  return j;
}

MetricsLog::MetricsLog(const std::string& dir, const std::string& stem, bool append) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  const auto mode = append ? std::ios::app : std::ios::trunc;
  metrics_.open(dir + "/" + stem + ".jsonl", std::ios::out | mode);
  timing_.open(dir + "/" + stem + ".timing.jsonl", std::ios::out | mode);
  if (!metrics_ || !timing_) throw std::runtime_error("cannot write metrics in " + dir);
}

void MetricsLog::write(const EpochRecord& record, double wall_seconds) {
  if (record.phase == last_phase_ && last_epoch_ && record.epoch <= *last_epoch_) {
    throw std::logic_error("metrics: epoch indices must increase");
  }
  last_phase_ = record.phase;
  last_epoch_ = record.epoch;
  if (!metrics_.is_open()) return;
  metrics_ << to_json(record).dump() << '\n';
  metrics_.flush();
  timing_ << nlohmann::json{{"phase", record.phase}, {"epoch", record.epoch}, {"wall_seconds", wall_seconds}}.dump()
          << '\n';
  timing_.flush();
}

}  // namespace pmae
