#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "patchseg/manifest.hpp"

namespace patchseg {

struct Fold {
  int fold_id = 0;
  std::string valid_domain;
  std::vector<std::string> train_ids;
  std::vector<std::string> valid_ids;
};

/// Leave-one-domain-out split: one fold per domain, folds ordered by domain
/// label, ids within a fold sorted.
struct FoldPlan {
  std::string task_id;
  std::vector<Fold> folds;

  const Fold& fold(int fold_id) const;
};

// Throws SingleDomain when fewer than two domains are present.
FoldPlan make_folds(const DatasetManifest& manifest);

nlohmann::ordered_json fold_plan_to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const nlohmann::json& j);

}  // namespace patchseg
