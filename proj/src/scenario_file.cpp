#include "smate/scenario_file.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "smate/errors.hpp"

namespace smate {

ScenarioError::ScenarioError(std::string source, std::size_t line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      source_(std::move(source)),
      line_(line),
      message_(message) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Parser {
 public:
  Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const { throw ScenarioError(source_, line, msg); }

  std::uint64_t to_uint(const std::string& v, std::size_t line) const {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) fail(line, "expected a non-negative integer, got '" + v + "'");
    return out;
  }

  double to_double(const std::string& v, std::size_t line) const {
    // from_chars for double is not available in every libstdc++ we target.
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) fail(line, "expected a number, got '" + v + "'");
    return out;
  }

  bool to_bool(const std::string& v, std::size_t line) const {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    fail(line, "expected a boolean, got '" + v + "'");
  }

  std::vector<std::size_t> to_list(const std::string& v, std::size_t line) const {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<std::size_t>(to_uint(trim(item), line)));
    if (out.empty()) fail(line, "expected a comma-separated list");
    return out;
  }

  std::string source_;
};

void apply_path_key(const Parser& ps, PathModel& p, const std::string& key, const std::string& v, std::size_t line) {
  if (key == "base_delay") {
    p.base_delay = ps.to_double(v, line);
  } else if (key == "rate_capacity") {
    p.rate_capacity = ps.to_double(v, line);
  } else if (key == "jitter") {
    p.jitter = ps.to_double(v, line);
  } else if (key == "slope") {
    p.delay.slope = ps.to_double(v, line);
  } else if (key == "service_rate") {
    p.delay.service_rate = ps.to_double(v, line);
  } else if (key == "delay") {
    if (v == "linear") {
      p.delay.kind = DelayFn::Kind::Linear;
    } else if (v == "mm1") {
      p.delay.kind = DelayFn::Kind::MM1;
    } else {
      ps.fail(line, "delay must be 'linear' or 'mm1'");
    }
  } else {
    ps.fail(line, "unknown key '" + key + "' in [paths]");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Parser ps(source);
  Scenario sc;
  std::map<std::string, std::size_t> where;
  PathModel shared;
  struct Override {
    std::size_t path;
    std::string key;
    std::string value;
    std::size_t line;
  };
  std::vector<Override> overrides;
  std::optional<std::size_t> adversary_path;
  bool seed_set = false;

  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto hash = s.find('#'); hash != std::string::npos) s.resize(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') ps.fail(line, "unterminated section header");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      if (section != "paths" && section != "adversary" && section != "balancer") {
        ps.fail(line, "unknown section [" + section + "]");
      }
      where.emplace(section, line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) ps.fail(line, "expected 'key = value'");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string v = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) ps.fail(line, "missing key");
    const std::string qualified = section.empty() ? key : section + "." + key;
    if (!where.emplace(qualified, line).second) ps.fail(line, "duplicate key '" + key + "'");

    if (section.empty()) {
      if (key == "scheme") {
        if (v == "single") {
          sc.scheme.kind = SchemeKind::Single;
        } else if (v == "dual") {
          sc.scheme.kind = SchemeKind::Dual;
        } else if (v == "priority") {
          sc.scheme.kind = SchemeKind::Priority;
        } else {
          ps.fail(line, "scheme must be single, dual or priority");
        }
      } else if (key == "k" || key == "n") {
        if (where.count(key == "k" ? "n" : "k")) ps.fail(line, "give either k or n, not both");
        where["k"] = line;
        sc.k = ps.to_uint(v, line);
      } else if (key == "m") {
        sc.m = ps.to_uint(v, line);
      } else if (key == "cycles") {
        sc.cycles = ps.to_uint(v, line);
      } else if (key == "payload_size") {
        sc.payload_size = ps.to_uint(v, line);
      } else if (key == "message_bytes") {
        sc.message_bytes = ps.to_uint(v, line);
      } else if (key == "seed") {
        sc.seed = ps.to_uint(v, line);
        seed_set = true;
      } else if (key == "sender_id") {
        const auto id = ps.to_uint(v, line);
        if (id > 0xFFFF) ps.fail(line, "sender_id exceeds 16 bits");
        sc.sender_id = static_cast<std::uint16_t>(id);
      } else if (key == "round_interval") {
        sc.round_interval = ps.to_double(v, line);
      } else if (key == "deadline_factor") {
        sc.deadline_factor = ps.to_double(v, line);
      } else if (key == "protection_paths") {
        const auto pp = ps.to_list(v, line);
        if (pp.size() != 2) ps.fail(line, "protection_paths needs exactly two path indices");
        sc.scheme.protection_paths = std::pair{pp[0], pp[1]};
      } else if (key == "protection_counts") {
        sc.scheme.priority_p = ps.to_list(v, line);
      } else if (key == "t") {
        sc.scheme.t = ps.to_uint(v, line);
      } else {
        ps.fail(line, "unknown key '" + key + "'");
      }
    } else if (section == "paths") {
      const auto dot = key.find('.');
      if (dot == std::string::npos) {
        apply_path_key(ps, shared, key, v, line);
      } else {
        overrides.push_back({static_cast<std::size_t>(ps.to_uint(key.substr(0, dot), line)), key.substr(dot + 1), v,
                             line});
      }
    } else if (section == "adversary") {
      auto& adv = sc.adversary;
      if (key == "mode") {
        if (v == "none") {
          adv.mode = AdversaryMode::None;
        } else if (v == "single") {
          adv.mode = AdversaryMode::SingleLink;
        } else if (v == "two") {
          adv.mode = AdversaryMode::TwoLink;
        } else if (v == "tamper") {
          adv.mode = AdversaryMode::Tamper;
        } else if (v == "eavesdrop") {
          adv.mode = AdversaryMode::Eavesdrop;
        } else {
          ps.fail(line, "adversary mode must be none, single, two, tamper or eavesdrop");
        }
      } else if (key == "path") {
        adversary_path = ps.to_uint(v, line);
        where["adversary.paths"] = line;
      } else if (key == "paths") {
        adv.paths = ps.to_list(v, line);
      } else if (key == "start_round") {
        adv.start_round = ps.to_uint(v, line);
      } else if (key == "end_round") {
        adv.end_round = ps.to_uint(v, line);
      } else if (key == "bit") {
        if (v != "random") adv.tamper_bit = ps.to_uint(v, line);
      } else if (key == "seed") {
        adv.rng_seed = ps.to_uint(v, line);
      } else {
        ps.fail(line, "unknown key '" + key + "' in [adversary]");
      }
    } else if (section == "balancer") {
      auto& b = sc.balancer;
      if (key == "enabled") {
        b.enabled = ps.to_bool(v, line);
      } else if (key == "gamma") {
        b.gamma = ps.to_double(v, line);
      } else if (key == "offered_rate") {
        b.offered_rate = ps.to_double(v, line);
      } else if (key == "probe") {
        b.probe = ps.to_double(v, line);
      } else if (key == "flows_per_round") {
        b.flows_per_round = ps.to_uint(v, line);
      } else {
        ps.fail(line, "unknown key '" + key + "' in [balancer]");
      }
    }
  }

  if (!where.count("k")) ps.fail(0, "missing required key 'k'");
  if (!where.count("m")) ps.fail(0, "missing required key 'm'");
  if (adversary_path) sc.adversary.paths.insert(sc.adversary.paths.begin(), *adversary_path);
  if (!seed_set) {
    if (const char* env = std::getenv("SMATE_SEED"); env != nullptr && *env != '\0') {
      sc.seed = Parser("SMATE_SEED").to_uint(env, 0);
    }
  }

  sc.paths.assign(sc.k <= 255 ? sc.k : 0, shared);
  for (const auto& o : overrides) {
    if (o.path >= sc.paths.size()) ps.fail(o.line, "path " + std::to_string(o.path) + " out of range");
    apply_path_key(ps, sc.paths[o.path], o.key, o.value, o.line);
  }

  try {
    validate_scenario(sc);
  } catch (const ValidationError& e) {
    std::size_t at = 0;
    if (auto it = where.find(e.field()); it != where.end()) {
      at = it->second;
    } else if (auto dot = e.field().find('.'); dot != std::string::npos) {
      if (auto sec = where.find(e.field().substr(0, dot)); sec != where.end()) at = sec->second;
    } else if (auto sec = where.find(e.field()); sec != where.end()) {
      at = sec->second;
    }
    ps.fail(at, e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, 0, "cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace smate
