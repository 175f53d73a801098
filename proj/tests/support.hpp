// Copyright 2026 The rbmducc Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the test binaries.

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmducc/integrals.hpp"

namespace testing {

inline std::string asset(const std::string &name) {
  return std::string(RBMDUCC_ASSET_DIR) + "/" + name;
}

inline rbmducc::MolecularIntegrals load(const std::string &id) {
  return rbmducc::parse_fcidump(asset(id + ".fcidump"));
}

inline const nlohmann::json &manifest() {
  static const nlohmann::json m = [] {
    std::ifstream in(asset("manifest.json"));
    return nlohmann::json::parse(in);
  }();
  return m;
}

inline std::vector<std::string> asset_ids() {
  std::vector<std::string> ids;
  for (const auto &[id, _] : manifest().items())
    ids.push_back(id);
  return ids;
}

} // namespace testing
