#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

namespace ntmal {

enum class Penalty { L1, L2, ElasticNet };

std::string_view to_string(Penalty penalty);
std::optional<Penalty> parse_penalty(std::string_view text);

struct SgdConfig {
  Penalty penalty = Penalty::L2;
  double alpha = 1e-4;
  // Share of the squared term in the elastic-net mix.
  double phi = 0.85;
  int epochs = 20;
  // Learning-rate offset; unset means max(0, 1/alpha - 1) so that the first
  // step size is at most 1.
  std::optional<double> t0;
  std::uint64_t seed = 0;
  double tol = 1e-3;

  double effective_t0() const;
  void validate() const;

  friend bool operator==(const SgdConfig&, const SgdConfig&) = default;
};

struct DualConfig {
  double C = 1.0;
  double tol = 0.1;
  int max_outer = 1000;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const DualConfig&, const DualConfig&) = default;
};

enum class TrainerKind { Sgd, DualCd };

std::string_view to_string(TrainerKind kind);
std::optional<TrainerKind> parse_trainer_kind(std::string_view text);

using TrainerConfig = std::variant<SgdConfig, DualConfig>;

}  // namespace ntmal
