#pragma once

#include "foresight/error.hpp"
#include "foresight/fmcw.hpp"
#include "foresight/io.hpp"
#include "foresight/range_profile.hpp"
#include "foresight/rrm.hpp"
#include "foresight/safety.hpp"
#include "foresight/scenario.hpp"
#include "foresight/scene.hpp"
#include "foresight/throughwall.hpp"

namespace foresight {
inline constexpr const char* kVersion = "0.1.0";
}
