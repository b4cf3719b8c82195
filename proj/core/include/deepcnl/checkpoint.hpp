#ifndef DEEPCNL_CHECKPOINT_HPP
#define DEEPCNL_CHECKPOINT_HPP

#include <string>

#include "deepcnl/model.hpp"

namespace deepcnl {

/// Full training snapshot: model parameters, config, pair order, Adam state.
struct Checkpoint {
  DeepCnlModel model;
  std::vector<NdArray> adam_m, adam_v;
  std::size_t adam_steps = 0;
  std::string config_hash;
};

Checkpoint make_checkpoint(const TrainResult& result, const std::string& config_hash = "");

void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Writes `epoch,loss,accuracy` rows, preceded by a provenance comment when
/// config_hash/seed are given.
void save_history_csv(const std::vector<double>& loss, const std::vector<double>& acc,
                      const std::string& path, const std::string& provenance = "");

}  // namespace deepcnl

#endif  // DEEPCNL_CHECKPOINT_HPP
