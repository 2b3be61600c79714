#pragma once

#include "mapft/api.hpp"
#include "mapft/benchmark.hpp"
#include "mapft/bounds.hpp"
#include "mapft/csv.hpp"
#include "mapft/error.hpp"
#include "mapft/grid.hpp"
#include "mapft/ingest.hpp"
#include "mapft/manifest.hpp"
#include "mapft/plan.hpp"
#include "mapft/runner.hpp"
#include "mapft/scenario.hpp"
#include "mapft/scengen.hpp"
#include "mapft/tracking/analytics.hpp"
#include "mapft/tracking/book.hpp"
#include "mapft/tracking/events.hpp"
#include "mapft/tracking/record.hpp"
#include "mapft/tracking/store.hpp"
#include "mapft/validator.hpp"
