#pragma once

#include "automaton.hpp"
#include "compose.hpp"
#include "control.hpp"
#include "espec.hpp"
#include "fms.hpp"
#include "io.hpp"
#include "sim.hpp"

namespace desctl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace desctl
