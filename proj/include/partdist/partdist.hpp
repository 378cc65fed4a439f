#pragma once

// Umbrella header: the whole library in one include.

#include "partdist/assignment.hpp"
#include "partdist/bigint.hpp"
#include "partdist/combinatorics.hpp"
#include "partdist/experiments.hpp"
#include "partdist/extremes.hpp"
#include "partdist/io.hpp"
#include "partdist/labeling.hpp"
#include "partdist/metrics.hpp"
#include "partdist/parallel.hpp"
#include "partdist/population.hpp"
#include "partdist/rational.hpp"
#include "partdist/rng.hpp"
#include "partdist/summary.hpp"
#include "partdist/version.hpp"
