#pragma once

#include "fampe/attribution.hpp"
#include "fampe/evaluation.hpp"
#include "fampe/model/classifier.hpp"
#include "fampe/model/model.hpp"
#include "fampe/model/train.hpp"
#include "fampe/model/weights_io.hpp"
#include "fampe/spectral.hpp"
