#pragma once

#include "flightgb/boost.hpp"
#include "flightgb/csv.hpp"
#include "flightgb/dataset.hpp"
#include "flightgb/encode.hpp"
#include "flightgb/error.hpp"
#include "flightgb/matrix.hpp"
#include "flightgb/metrics.hpp"
#include "flightgb/model_io.hpp"
#include "flightgb/parallel.hpp"
#include "flightgb/pipeline.hpp"
#include "flightgb/resample.hpp"
#include "flightgb/rng.hpp"
#include "flightgb/tree.hpp"
#include "flightgb/tune.hpp"
