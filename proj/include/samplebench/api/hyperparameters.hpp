#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "samplebench/sampling/types.hpp"

namespace samplebench {

struct HyperparameterDescription {
  std::string name;
  std::string summary;
  double min = 0.0;
  double max = 0.0;
  bool min_exclusive = false;
  double default_value = 0.0;
};

inline const std::vector<HyperparameterDescription>& hyperparameter_descriptions() {
  static const SamplingParams defaults{};
  static const std::vector<HyperparameterDescription> table = {
      {"top_p",
       "Top-p, also called nucleus sampling, controls how many candidate words the model may pick "
       "from. The model ranks every possible next token by probability and keeps the smallest "
       "group of top-ranked tokens whose probabilities add up to at least this value, then picks "
       "randomly among them. Low values keep only the most likely words and make the text "
       "predictable; values near 1 admit rarer words and make the text more varied and surprising.",
       0.0, 1.0, true, defaults.top_p},
      {"frequency_penalty",
       "The frequency penalty discourages the model from repeating itself. Every time a token has "
       "already been generated, its probability is divided by a factor that grows with the number "
       "of times it has appeared so far. At 0 repetition is not penalized at all; higher values "
       "push the model harder towards words it has used less often, reducing loops and repeated "
       "phrases.",
       SamplingParams::kPenaltyMin, SamplingParams::kPenaltyMax, false,
       defaults.frequency_penalty},
      {"presence_penalty",
       "The presence penalty encourages the model to bring in new words. Any token that has "
       "appeared at least once in the generated text has its probability divided by a fixed "
       "factor, no matter how many times it was used. At 0 there is no effect; higher values make "
       "the model favour tokens it has not produced yet, which broadens the vocabulary and topics "
       "of the output.",
       SamplingParams::kPenaltyMin, SamplingParams::kPenaltyMax, false,
       defaults.presence_penalty},
  };
  return table;
}

inline nlohmann::json to_json(const HyperparameterDescription& d) {
  return {{"name", d.name},
          {"summary", d.summary},
          {"range", {d.min, d.max}},
          {"min_exclusive", d.min_exclusive},
          {"default", d.default_value}};
}

}  // namespace samplebench
