#pragma once

#include <string_view>

namespace projcond {

// Test hook: PROJCOND_MUTATION=<name> deliberately corrupts one formula so
// that the acceptance suite can demonstrate it catches the fault. Read once.
bool mutation_enabled(std::string_view name);

}  // namespace projcond
