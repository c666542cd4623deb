#pragma once

#include "fampe/evaluation/export.hpp"
#include "fampe/evaluation/insertion_deletion.hpp"
#include "fampe/evaluation/report.hpp"
