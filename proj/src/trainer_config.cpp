#include "ntmal/trainer_config.hpp"

#include <algorithm>
#include <cmath>

#include "ntmal/error.hpp"

namespace ntmal {

std::string_view to_string(Penalty penalty) {
  switch (penalty) {
    case Penalty::L1: return "l1";
    case Penalty::L2: return "l2";
    case Penalty::ElasticNet: return "elasticnet";
  }
  return "l2";
}

std::optional<Penalty> parse_penalty(std::string_view text) {
  if (text == "l1") return Penalty::L1;
  if (text == "l2") return Penalty::L2;
  if (text == "elasticnet") return Penalty::ElasticNet;
  return std::nullopt;
}

std::string_view to_string(TrainerKind kind) {
  return kind == TrainerKind::Sgd ? "sgd" : "dual-cd";
}

std::optional<TrainerKind> parse_trainer_kind(std::string_view text) {
  if (text == "sgd") return TrainerKind::Sgd;
  if (text == "dual-cd" || text == "dual_cd") return TrainerKind::DualCd;
  return std::nullopt;
}

double SgdConfig::effective_t0() const {
  return t0 ? *t0 : std::max(0.0, 1.0 / alpha - 1.0);
}

void SgdConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::ConfigInvalid, "alpha must be > 0");
  if (!(phi >= 0.0 && phi <= 1.0)) throw Error(ErrorKind::ConfigInvalid, "phi must be in [0, 1]");
  if (epochs < 1) throw Error(ErrorKind::ConfigInvalid, "epochs must be >= 1");
  if (t0 && !(*t0 >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "t0 must be >= 0");
  if (!(tol >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "tol must be >= 0");
}

void DualConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorKind::ConfigInvalid, "C must be > 0");
  if (!(tol > 0.0)) throw Error(ErrorKind::ConfigInvalid, "tol must be > 0");
  if (max_outer < 1) throw Error(ErrorKind::ConfigInvalid, "max_outer must be >= 1");
}

}  // namespace ntmal
