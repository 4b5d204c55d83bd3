#pragma once

#include "igeo/divergence_geometry.hpp"
#include "igeo/errors.hpp"
#include "igeo/measure_core.hpp"
#include "igeo/prob_chart.hpp"
#include "igeo/random.hpp"
#include "igeo/result_table.hpp"
#include "igeo/scalar_kernels.hpp"
#include "igeo/submanifolds.hpp"
#include "igeo/verify.hpp"
