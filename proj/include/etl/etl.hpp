#pragma once

// Convenience umbrella for the whole toolkit.

#include "etl/core.hpp"
#include "etl/harness.hpp"
#include "etl/io.hpp"
#include "etl/logic.hpp"
#include "etl/metrics.hpp"
#include "etl/planner.hpp"
#include "etl/semantics.hpp"
#include "etl/speclang.hpp"
#include "etl/worldmodel.hpp"
