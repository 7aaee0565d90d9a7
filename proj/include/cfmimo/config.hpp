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

#ifndef CFMIMO_CONFIG_HPP
#define CFMIMO_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/geometry.hpp"

namespace cfmimo {

enum class Scheme { kUlSingle, kUlLsfd, kDlCoherent, kDlNonCoherent };

inline constexpr Scheme kAllSchemes[] = {Scheme::kUlSingle, Scheme::kUlLsfd,
                                         Scheme::kDlCoherent,
                                         Scheme::kDlNonCoherent};

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

struct SimConfig {
  std::size_t num_aps = 100;
  std::size_t num_ues = 40;
  int tau_c = 200;
  int tau_p = 5;
  double ue_power_w = 0.2;
  double dl_power_per_ue_w = 0.2;
  double noise_power_dbm = -94.0;
  double bandwidth_hz = 20e6;
  AreaSpec area;
  ShadowModel shadow;
  std::vector<Estimator> estimators{Estimator::kMmse, Estimator::kLmmse,
                                    Estimator::kLs};
  std::vector<Scheme> schemes{Scheme::kUlSingle, Scheme::kUlLsfd,
                              Scheme::kDlCoherent, Scheme::kDlNonCoherent};
  std::size_t num_setups = 100;
  std::size_t mc_trials = 0;
  std::uint64_t master_seed = 1;
  std::string output = "results";

  void validate() const;
  FrameConfig frame() const;
  PowerConfig powers() const;
};

// Flat "key = value" document; '#' starts a comment. Values: integers, reals,
// booleans (true/false), strings (bare or double-quoted) and lists
// ([a, b, c]). Unspecified keys keep their defaults; unknown keys, duplicate
// keys and type mismatches are rejected with the key and line number.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

}  // namespace cfmimo

#endif  // CFMIMO_CONFIG_HPP
