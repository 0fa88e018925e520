#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xaif/attack.hpp"
#include "xaif/model.hpp"

namespace xaif {

// Every tunable default in one place. A config file (JSON object or
// key=value lines) overrides any subset; keys are listed in README.md.
struct Settings {
  std::uint64_t seed = 0;

  std::string text_column = "text";
  std::string label_column = "label";
  std::string stopwords_path;  // empty: built-in English list
  std::string embeddings_path;
  std::string pos_lexicon_path;  // empty: no part-of-speech constraint

  TrainOptions train;
  AttackConfig attack;

  std::vector<std::size_t> sweep_rates;  // empty: length-indexed preset
  std::size_t sweep_base_n = 0;          // 0: length-indexed preset
  std::size_t sweep_docs = 20;
  std::size_t campaign_docs = 50;        // 0: whole test split
  std::vector<Strategy> strategies = {Strategy::inherency, Strategy::random, Strategy::lom,
                                      Strategy::lp, Strategy::xaifooler};
  bool ppl_proxy = false;
  bool record_timings = false;

  // Throws ConfigError for an unknown key or unparsable value.
  void set(std::string_view key, std::string_view value);
  void load_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

std::vector<std::size_t> parse_size_list(std::string_view text);
std::vector<Strategy> parse_strategy_list(std::string_view text);

}  // namespace xaif
