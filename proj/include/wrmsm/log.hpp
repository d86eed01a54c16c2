#pragma once

#include <string>

namespace wrmsm {

/// Non-fatal diagnostics go to stderr unless silenced (tests, Monte Carlo runs).
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);
bool warnings_enabled();

}  // namespace wrmsm
