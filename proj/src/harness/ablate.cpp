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

#include <cstdio>
#include <sstream>

#include "pmae/harness/experiments.hpp"

namespace pmae {

std::uint64_t ablation_cell_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, 0xab1a, index); }

std::vector<AblationCell> default_ablation_grid() {
  std::vector<AblationCell> cells;
  for (MaskType type : {MaskType::Random, MaskType::Block}) {
    for (double ratio : {0.4, 0.6, 0.8}) cells.push_back({type, ratio, MaskTokenPlacement::Decoder, true});
  }
  cells.push_back({MaskType::Random, 0.6, MaskTokenPlacement::Encoder, true});
  return cells;
}

std::vector<AblationRow> ablate_mask(const RunConfig& base, const DatasetSplit& data,
                                     const std::vector<AblationCell>& cells) {
  std::vector<AblationRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const AblationCell& cell = cells[i];
    RunConfig cfg = base;
    cfg.seed = ablation_cell_seed(base.seed, i);
    cfg.mask_type = cell.type;
    cfg.mask_ratio = cell.ratio;
    cfg.model.placement = cell.placement;
    if (!base.out_dir.empty()) cfg.out_dir = base.out_dir + "/cell-" + std::to_string(i);

    AblationRow row{cell, cfg.seed, 0.0, std::nullopt};
    const PretrainResult pre = pretrain(cfg, pretraining_pool(data));
    row.loss_x1000 = pre.epochs.empty() ? 0.0 : pre.epochs.back().loss_x1000();
    if (cell.finetune) row.accuracy = finetune_classify(cfg, data, pre.final_state).test_accuracy;
    rows.push_back(row);
  }
  return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %-6s %-9s %-22s %12s %10s\n", "type", "ratio", "tokens", "seed", "loss(x1000)",
                "accuracy");
  out << line;
  for (const AblationRow& r : rows) {
    char acc[32] = "-";
    if (r.accuracy) std::snprintf(acc, sizeof acc, "%.2f%%", 100.0 * *r.accuracy);
    std::snprintf(line, sizeof line, "%-8s %-6.2f %-9s %-22llu %12.4f %10s\n", to_string(r.cell.type).c_str(),
                  r.cell.ratio, to_string(r.cell.placement).c_str(), static_cast<unsigned long long>(r.seed),
                  r.loss_x1000, acc);
    out << line;
  }
  return out.str();
}

}  // namespace pmae
