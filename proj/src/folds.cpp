#include "patchseg/folds.hpp"

#include <algorithm>
#include <map>

#include "patchseg/errors.hpp"

namespace patchseg {

const Fold& FoldPlan::fold(int fold_id) const {
  for (const auto& f : folds) {
    if (f.fold_id == fold_id) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "no fold with id " + std::to_string(fold_id));
}

FoldPlan make_folds(const DatasetManifest& manifest) {
  validate_manifest(manifest);
  std::map<std::string, std::vector<std::string>> by_domain;
  for (const auto& e : manifest.entries) by_domain[e.domain].push_back(e.image_id);
  if (by_domain.size() < 2) {
    throw Error(ErrorCode::SingleDomain,
                "need at least 2 domains, found " + std::to_string(by_domain.size()));
  }
  for (auto& [domain, ids] : by_domain) std::sort(ids.begin(), ids.end());

  FoldPlan plan;
  plan.task_id = manifest.task_id;
  int next_id = 0;
  for (const auto& [domain, ids] : by_domain) {
    Fold f;
    f.fold_id = next_id++;
    f.valid_domain = domain;
    f.valid_ids = ids;
    for (const auto& [other, other_ids] : by_domain) {
      if (other == domain) continue;
      f.train_ids.insert(f.train_ids.end(), other_ids.begin(), other_ids.end());
    }
    std::sort(f.train_ids.begin(), f.train_ids.end());
    plan.folds.push_back(std::move(f));
  }
  return plan;
}

nlohmann::ordered_json fold_plan_to_json(const FoldPlan& plan) {
  nlohmann::ordered_json j;
  j["task_id"] = plan.task_id;
  auto folds = nlohmann::ordered_json::array();
  for (const auto& f : plan.folds) {
    nlohmann::ordered_json jf;
    jf["fold_id"] = f.fold_id;
    jf["valid_domain"] = f.valid_domain;
    jf["train_ids"] = f.train_ids;
    jf["valid_ids"] = f.valid_ids;
    folds.push_back(std::move(jf));
  }
  j["folds"] = std::move(folds);
  return j;
}

FoldPlan fold_plan_from_json(const nlohmann::json& j) {
  try {
    FoldPlan plan;
    plan.task_id = j.value("task_id", std::string{});
    for (const auto& jf : j.at("folds")) {
      Fold f;
      f.fold_id = jf.at("fold_id").get<int>();
      f.valid_domain = jf.at("valid_domain").get<std::string>();
      f.train_ids = jf.at("train_ids").get<std::vector<std::string>>();
      f.valid_ids = jf.at("valid_ids").get<std::vector<std::string>>();
      plan.folds.push_back(std::move(f));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed fold plan: ") + e.what());
  }
}

}  // namespace patchseg
