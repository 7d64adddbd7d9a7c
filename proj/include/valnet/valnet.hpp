#pragma once

// Convenience umbrella: the whole library.

#include "cli.hpp"           // IWYU pragma: export
#include "core.hpp"          // IWYU pragma: export
#include "fusion.hpp"        // IWYU pragma: export
#include "graphs.hpp"        // IWYU pragma: export
#include "independence.hpp"  // IWYU pragma: export
#include "model_io.hpp"      // IWYU pragma: export
#include "network.hpp"       // IWYU pragma: export
#include "random.hpp"        // IWYU pragma: export
#include "valuation.hpp"     // IWYU pragma: export
