#pragma once

#include <string>

#include "stor/solver.hpp"

namespace stor {

/// Persist a policy to a directory: manifest.json plus one artifact file
/// per step holding every regime's surrogate. The directory is created if
/// missing; existing step files are overwritten.
void save_policy(const PolicyStore& policy, const std::string& dir);

/// Reload a persisted policy. Throws ConfigError on a malformed or
/// incomplete directory.
PolicyStore load_policy(const std::string& dir);

}  // namespace stor
