#pragma once

#include "polymatch/amplify.hpp"
#include "polymatch/baselines.hpp"
#include "polymatch/core.hpp"
#include "polymatch/duals_audit.hpp"
#include "polymatch/engine.hpp"
#include "polymatch/experiment.hpp"
#include "polymatch/metrics.hpp"
#include "polymatch/numa_groups.hpp"
#include "polymatch/rng.hpp"
#include "polymatch/streams.hpp"
