#pragma once

#include <cstdint>
#include <string>

#include "bindbench/domain.hpp"

namespace bindbench {

// Knobs of the capacity-limited synthetic observer.
struct ObserverParams {
  double p_bind = 0.08;       // per feature triplet, chance of an illusory conjunction
  int k = 4;                  // subitizing capacity
  double w = 0.15;            // Weber fraction above capacity
  double p_merge = 0.06;      // per identical pair, chance two objects are counted as one
  double eps_conj = 0.015;    // per distractor, conjunctive-search confusion
  double e_unified = 0.05;    // per feature, RMTS decode error in one image
  double e_decomposed = 0.01; // per feature, RMTS decode error across three images

  // Throws ConfigError when a probability leaves [0, 1], k < 1 or w < 0.
  void validate() const;
  friend bool operator==(const ObserverParams&, const ObserverParams&) = default;
};

// Answers a trial from its ground truth in the format its prompt asks for. Pure in
// (trial, params, seed). Text-to-image trials are not answerable and throw PreconditionViolated.
std::string synthetic_describe(const TrialRecord& trial, const ObserverParams& params, std::uint64_t seed);

}  // namespace bindbench
