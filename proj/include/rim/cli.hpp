#pragma once

#include "rim/config.hpp"

namespace rim {

// exit codes: 0 success, 2 invalid config, 3 solver failure beyond the
// configured budget, 4 IO errors.
int run(const RunManifest& manifest);

}  // namespace rim
