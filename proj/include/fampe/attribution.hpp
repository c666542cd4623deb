#pragma once

#include "fampe/attribution/alpha_sweep.hpp"
#include "fampe/attribution/config.hpp"
#include "fampe/attribution/fampe.hpp"
#include "fampe/attribution/ig.hpp"
#include "fampe/attribution/map_io.hpp"
#include "fampe/attribution/path.hpp"
#include "fampe/attribution/variants.hpp"
