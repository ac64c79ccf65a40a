#pragma once

#include "nmmc/baselines.hpp"
#include "nmmc/empirical.hpp"
#include "nmmc/engine.hpp"
#include "nmmc/error.hpp"
#include "nmmc/generators.hpp"
#include "nmmc/graph.hpp"
#include "nmmc/metrics.hpp"
#include "nmmc/oracle.hpp"
#include "nmmc/target.hpp"
