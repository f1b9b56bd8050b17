#pragma once

#include "cascade/error.hpp"
#include "cascade/units.hpp"
#include "cascade/level_system.hpp"
#include "cascade/liouvillian.hpp"
#include "cascade/effective.hpp"
#include "cascade/rates.hpp"
#include "cascade/spectrum.hpp"
#include "cascade/rb85.hpp"
#include "cascade/config.hpp"
