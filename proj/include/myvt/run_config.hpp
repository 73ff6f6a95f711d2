#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "myvt/data.hpp"
#include "myvt/train.hpp"

namespace myvt {

/// Everything needed to reproduce a training run.
struct RunConfig {
  TrainConfig train;
  SyntheticSpec data;
  std::string data_path;  // existing dataset file; generated from `data` when empty
  std::string metrics_path = "metrics.csv";
  std::string summary_path = "summary.json";
  std::string checkpoint_prefix = "checkpoint";
  int checkpoint_interval = 0;
  bool record_wall_time = true;
};

/// A config document carried a key that no RunConfig field claims.
class UnknownKeyError : public std::invalid_argument {
 public:
  explicit UnknownKeyError(const std::string& key)
      : std::invalid_argument("unknown config key '" + key + "'"), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat JSON object keyed by field name. Every field is always written.
nlohmann::json to_json(const RunConfig& config);

/// Overlays the keys present in `doc` onto `base`. Unknown keys raise
/// UnknownKeyError; ill-typed values raise std::invalid_argument.
RunConfig merge_run_config(RunConfig base, const nlohmann::json& doc);

RunConfig run_config_from_json(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

}  // namespace myvt
