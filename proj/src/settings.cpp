#include "xaif/settings.hpp"

#include <charconv>
#include <fstream>
#include <iterator>

#include "xaif/errors.hpp"

namespace xaif {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(sep, start);
    const auto piece = trim(text.substr(start, end == std::string_view::npos ? end : end - start));
    if (!piece.empty()) parts.push_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected a boolean, got '" +
                    std::string(value) + "'");
}

std::string json_value_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!out.empty()) out.push_back(',');
      out += json_value_text(item);
    }
    return out;
  }
  return v.dump();
}

}  // namespace

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  for (const auto part : split(text, ',')) out.push_back(parse_number<std::size_t>("list", part));
  return out;
}

std::vector<Strategy> parse_strategy_list(std::string_view text) {
  std::vector<Strategy> out;
  for (const auto part : split(text, ',')) out.push_back(parse_strategy(part));
  if (out.empty()) throw ConfigError("strategy list is empty");
  return out;
}

void Settings::set(std::string_view key, std::string_view value) {
  auto& a = attack;
  if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "text_column") text_column = trim(value);
  else if (key == "label_column") label_column = trim(value);
  else if (key == "stopwords") stopwords_path = trim(value);
  else if (key == "embeddings") embeddings_path = trim(value);
  else if (key == "pos_lexicon") pos_lexicon_path = trim(value);
  else if (key == "l2_penalty") train.l2_penalty = parse_number<double>(key, value);
  else if (key == "max_epochs") train.max_epochs = parse_number<std::size_t>(key, value);
  else if (key == "preset") {
    const auto sampling_seed = a.sampling.seed;
    a = attack_preset(trim(value));
    a.sampling.seed = sampling_seed;
  }
  else if (key == "k") a.k = parse_number<std::size_t>(key, value);
  else if (key == "delta") a.delta = parse_number<double>(key, value);
  else if (key == "epsilon") a.epsilon = parse_number<double>(key, value);
  else if (key == "min_budget") a.min_budget = parse_number<std::size_t>(key, value);
  else if (key == "rbo_p") a.rbo_p = parse_number<double>(key, value);
  else if (key == "max_candidates") a.max_candidates = parse_number<std::size_t>(key, value);
  else if (key == "min_cosine") a.min_cosine = parse_number<double>(key, value);
  else if (key == "require_topk_demotion") a.require_topk_demotion = parse_bool(key, value);
  else if (key == "ascending_order") a.ascending_order = parse_bool(key, value);
  else if (key == "n" || key == "sampling_rate") a.sampling.n = parse_number<std::size_t>(key, value);
  else if (key == "kernel_width") a.sampling.kernel_width = parse_number<double>(key, value);
  else if (key == "surrogate_l2") a.sampling.surrogate_l2 = parse_number<double>(key, value);
  else if (key == "exhaustive") a.sampling.exhaustive = parse_bool(key, value);
  else if (key == "sweep_rates") sweep_rates = parse_size_list(value);
  else if (key == "sweep_base_n") sweep_base_n = parse_number<std::size_t>(key, value);
  else if (key == "sweep_docs") sweep_docs = parse_number<std::size_t>(key, value);
  else if (key == "campaign_docs") campaign_docs = parse_number<std::size_t>(key, value);
  else if (key == "strategies") strategies = parse_strategy_list(value);
  else if (key == "ppl_proxy") ppl_proxy = parse_bool(key, value);
  else if (key == "record_timings") record_timings = parse_bool(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void Settings::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const auto body = trim(text);

  std::vector<std::pair<std::string, std::string>> entries;
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    for (const auto& [key, value] : j.items()) entries.emplace_back(key, json_value_text(value));
  } else {
    std::size_t line_no = 0;
    for (const auto line : split(text, '\n')) {
      ++line_no;
      if (line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("config file '" + path.string() + "': expected key=value, got '" +
                          std::string(line) + "'");
      }
      entries.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    }
  }
  // presets first, then the remaining keys
  for (const auto& [key, value] : entries) {
    if (key == "preset") set(key, value);
  }
  for (const auto& [key, value] : entries) {
    if (key != "preset") set(key, value);
  }
}

nlohmann::json Settings::to_json() const {
  std::vector<std::string> strategy_names;
  for (const auto s : strategies) strategy_names.emplace_back(to_string(s));
  return {
      {"seed", seed},
      {"text_column", text_column},
      {"label_column", label_column},
      {"stopwords", stopwords_path},
      {"embeddings", embeddings_path},
      {"pos_lexicon", pos_lexicon_path},
      {"l2_penalty", train.l2_penalty},
      {"max_epochs", train.max_epochs},
      {"k", attack.k},
      {"delta", attack.delta},
      {"epsilon", attack.epsilon},
      {"min_budget", attack.min_budget},
      {"rbo_p", attack.rbo_p},
      {"max_candidates", attack.max_candidates},
      {"min_cosine", attack.min_cosine},
      {"require_topk_demotion", attack.require_topk_demotion},
      {"ascending_order", attack.ascending_order},
      {"n", attack.sampling.n},
      {"kernel_width", attack.sampling.kernel_width},
      {"surrogate_l2", attack.sampling.surrogate_l2},
      {"exhaustive", attack.sampling.exhaustive},
      {"sweep_rates", sweep_rates},
      {"sweep_base_n", sweep_base_n},
      {"sweep_docs", sweep_docs},
      {"campaign_docs", campaign_docs},
      {"strategies", strategy_names},
      {"ppl_proxy", ppl_proxy},
      {"record_timings", record_timings},
  };
}

}  // namespace xaif
