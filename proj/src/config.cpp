// Copyright 2026 The cfmimo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfmimo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cfmimo/error.hpp"

namespace cfmimo {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kUlSingle:
      return "ul_single";
    case Scheme::kUlLsfd:
      return "ul_lsfd";
    case Scheme::kDlCoherent:
      return "dl_coherent";
    case Scheme::kDlNonCoherent:
      return "dl_noncoherent";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (to_string(s) == name) return s;
  }
  throw InvalidConfig("unknown scheme '" + std::string(name) + "'");
}

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw InvalidConfig(key + ": " + what);
}

}  // namespace

void SimConfig::validate() const {
  require(num_aps >= 1, "M", "must be >= 1");
  require(num_ues >= 1, "K", "must be >= 1");
  require(tau_p >= 1, "tau_p", "must be >= 1");
  require(tau_c > tau_p, "tau_c", "must exceed tau_p");
  require(std::isfinite(ue_power_w) && ue_power_w > 0.0, "ue_power_w",
          "must be > 0");
  require(std::isfinite(dl_power_per_ue_w) && dl_power_per_ue_w >= 0.0,
          "dl_power_per_ue_w", "must be >= 0");
  require(std::isfinite(noise_power_dbm), "noise_power_dbm", "must be finite");
  require(bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
  require(std::isfinite(area.side_length) && area.side_length > 0.0,
          "side_length_m", "must be > 0");
  require(area.ap_height >= 0.0, "ap_height_m", "must be >= 0");
  require(area.ue_height >= 0.0, "ue_height_m", "must be >= 0");
  require(shadow.sigma_db >= 0.0, "shadow_sigma_db", "must be >= 0");
  require(shadow.delta >= 0.0 && shadow.delta <= 1.0, "shadow_delta",
          "must lie in [0, 1]");
  require(shadow.decorrelation_distance > 0.0, "decorrelation_distance_m",
          "must be > 0");
  require(!estimators.empty(), "estimators", "must not be empty");
  require(!schemes.empty(), "schemes", "must not be empty");
  require(num_setups >= 1, "num_setups", "must be >= 1");
  require(mc_trials == 0 || mc_trials >= 1000, "mc_trials",
          "must be 0 or >= 1000");
  require(!output.empty(), "output", "must not be empty");
}

FrameConfig SimConfig::frame() const {
  return FrameConfig::dedicated(tau_c, tau_p);
}

PowerConfig SimConfig::powers() const {
  return PowerConfig::uniform(num_ues, ue_power_w, dl_power_per_ue_w,
                              dbm_to_watt(noise_power_dbm));
}

namespace {

struct RawValue {
  std::string text;
  bool quoted = false;
  bool is_list = false;
  std::vector<RawValue> items;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing '#' comment that is not inside double quotes.
std::string_view strip_comment(std::string_view line) {
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quotes = !in_quotes;
    if (line[i] == '#' && !in_quotes) return line.substr(0, i);
  }
  return line;
}

RawValue parse_scalar(std::string_view s, const std::string& ctx) {
  s = trim(s);
  RawValue v;
  if (s.empty()) throw InvalidConfig(ctx + ": empty value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') {
      throw InvalidConfig(ctx + ": unterminated string");
    }
    v.text = std::string(s.substr(1, s.size() - 2));
    v.quoted = true;
  } else {
    v.text = std::string(s);
  }
  return v;
}

RawValue parse_value(std::string_view s, const std::string& ctx) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw InvalidConfig(ctx + ": unterminated list");
    RawValue v;
    v.is_list = true;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      v.items.push_back(parse_scalar(body.substr(0, comma), ctx));
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
      if (trim(body).empty()) throw InvalidConfig(ctx + ": trailing comma");
    }
    return v;
  }
  return parse_scalar(s, ctx);
}

std::string describe(const RawValue& v) {
  return v.is_list ? "a list" : "'" + v.text + "'";
}

template <typename T>
T as_integer(const RawValue& v, const std::string& ctx) {
  T out{};
  if (v.is_list || v.quoted) {
    throw InvalidConfig(ctx + ": expected an integer, got " + describe(v));
  }
  const char* end = v.text.data() + v.text.size();
  const auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw InvalidConfig(ctx + ": expected an integer, got " + describe(v));
  }
  return out;
}

double as_real(const RawValue& v, const std::string& ctx) {
  double out = 0.0;
  if (v.is_list || v.quoted) {
    throw InvalidConfig(ctx + ": expected a number, got " + describe(v));
  }
  const char* end = v.text.data() + v.text.size();
  const auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw InvalidConfig(ctx + ": expected a number, got " + describe(v));
  }
  return out;
}

bool as_bool(const RawValue& v, const std::string& ctx) {
  if (!v.is_list && !v.quoted) {
    if (v.text == "true") return true;
    if (v.text == "false") return false;
  }
  throw InvalidConfig(ctx + ": expected true or false, got " + describe(v));
}

std::string as_string(const RawValue& v, const std::string& ctx) {
  if (v.is_list) throw InvalidConfig(ctx + ": expected a string, got a list");
  return v.text;
}

template <typename T, typename Parse>
std::vector<T> as_list(const RawValue& v, const std::string& ctx, Parse parse) {
  if (!v.is_list) {
    throw InvalidConfig(ctx + ": expected a list, got " + describe(v));
  }
  std::vector<T> out;
  for (const RawValue& item : v.items) {
    try {
      out.push_back(parse(item.text));
    } catch (const InvalidConfig& e) {
      throw InvalidConfig(ctx + ": " + e.what());
    }
  }
  return out;
}

using Setter = std::function<void(SimConfig&, const RawValue&, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"M", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.num_aps = as_integer<std::size_t>(v, x);
       }},
      {"K", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.num_ues = as_integer<std::size_t>(v, x);
       }},
      {"tau_c", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.tau_c = as_integer<int>(v, x);
       }},
      {"tau_p", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.tau_p = as_integer<int>(v, x);
       }},
      {"ue_power_w", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.ue_power_w = as_real(v, x);
       }},
      {"dl_power_per_ue_w",
       [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.dl_power_per_ue_w = as_real(v, x);
       }},
      {"noise_power_dbm",
       [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.noise_power_dbm = as_real(v, x);
       }},
      {"bandwidth_hz", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.bandwidth_hz = as_real(v, x);
       }},
      {"side_length_m",
       [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.area.side_length = as_real(v, x);
       }},
      {"wraparound", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.area.wraparound = as_bool(v, x);
       }},
      {"ap_height_m", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.area.ap_height = as_real(v, x);
       }},
      {"ue_height_m", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.area.ue_height = as_real(v, x);
       }},
      {"shadow_sigma_db",
       [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.shadow.sigma_db = as_real(v, x);
       }},
      {"shadow_delta", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.shadow.delta = as_real(v, x);
       }},
      {"decorrelation_distance_m",
       [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.shadow.decorrelation_distance = as_real(v, x);
       }},
      {"estimators", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.estimators = as_list<Estimator>(
             v, x, [](const std::string& s) { return parse_estimator(s); });
       }},
      {"schemes", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.schemes = as_list<Scheme>(
             v, x, [](const std::string& s) { return parse_scheme(s); });
       }},
      {"num_setups", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.num_setups = as_integer<std::size_t>(v, x);
       }},
      {"mc_trials", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.mc_trials = as_integer<std::size_t>(v, x);
       }},
      {"master_seed", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.master_seed = as_integer<std::uint64_t>(v, x);
       }},
      {"output", [](SimConfig& c, const RawValue& v, const std::string& x) {
         c.output = as_string(v, x);
       }},
  };
  return table;
}

}  // namespace

SimConfig parse_config(std::string_view text) {
  SimConfig cfg;
  std::map<std::string, int, std::less<>> seen;  // key -> line
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidConfig(where + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw InvalidConfig(where + ": missing key");
    const std::string ctx = where + ": key '" + key + "'";
    const auto it = setters().find(key);
    if (it == setters().end()) throw InvalidConfig(ctx + ": unknown key");
    if (!seen.emplace(key, line_no).second) {
      throw InvalidConfig(ctx + ": duplicate key");
    }
    it->second(cfg, parse_value(line.substr(eq + 1), ctx), ctx);
  }
  try {
    cfg.validate();
  } catch (const InvalidConfig& e) {
    const std::string msg = e.what();
    const std::string key = msg.substr(0, msg.find(':'));
    const auto it = seen.find(key);
    if (it != seen.end()) {
      throw InvalidConfig("line " + std::to_string(it->second) + ": key '" +
                          key + "'" + msg.substr(key.size()));
    }
    throw InvalidConfig("key '" + key + "'" + msg.substr(key.size()));
  }
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace cfmimo
