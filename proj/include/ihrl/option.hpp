#pragma once

#include <compare>
#include <string>

#include "ihrl/compression.hpp"

namespace ihrl {

enum class OptionKind { kNavigate = 0, kExplore = 1, kTask = 2 };

std::string to_string(OptionKind kind);

/// Identity of an option. Navigate options o_{z,z'} use `target`; task options
/// o_z^{s,s'} use `from`/`to`; exploration options only `region`.
struct OptionKey {
  OptionKind kind = OptionKind::kExplore;
  RegionId region = kNoRegion;
  RegionId target = kNoRegion;
  Inventory from = 0;
  Inventory to = 0;

  static OptionKey navigate(RegionId z, RegionId z2) { return {OptionKind::kNavigate, z, z2, 0, 0}; }
  static OptionKey explore(RegionId z) { return {OptionKind::kExplore, z, kNoRegion, 0, 0}; }
  static OptionKey task(RegionId z, Inventory s, Inventory s2) { return {OptionKind::kTask, z, kNoRegion, s, s2}; }

  auto operator<=>(const OptionKey&) const = default;
};

/// Compact text form: "nav:3>4", "exp:3", "task:3:0>1".
std::string to_string(const OptionKey& key);
OptionKey option_key_from_string(const std::string& s);

inline constexpr int kOptionStepLimit = 100;

struct OptionSpec {
  OptionKey key;
  int step_limit = 0;  // 0: runs until it leaves the region or the episode ends

  static OptionSpec for_key(const OptionKey& key) {
    return {key, key.kind == OptionKind::kExplore ? 0 : kOptionStepLimit};
  }
};

}  // namespace ihrl
