#pragma once

#include <string>

namespace whistle::testing {

/// Reference value from the frozen oracle table. Throws std::out_of_range for
/// an unknown key.
double derived(const std::string& key);

}  // namespace whistle::testing
