#pragma once

#include "constants.hpp"
#include "geometry.hpp"
#include "homodel.hpp"
#include "lindblad.hpp"
#include "noisequanta.hpp"
#include "numerics.hpp"
#include "optics.hpp"
#include "pattern.hpp"
#include "survey.hpp"
#include "wgmodel.hpp"

namespace rydnoise {
inline constexpr const char* version = "0.1.0";
}
