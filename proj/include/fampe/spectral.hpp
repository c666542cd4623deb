#pragma once

#include "fampe/spectral/dct.hpp"
#include "fampe/spectral/energy_cutoff.hpp"
#include "fampe/spectral/fft.hpp"
#include "fampe/spectral/mask.hpp"
