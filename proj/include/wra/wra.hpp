#pragma once

// Umbrella header: weighted premiums and risk-capital allocations, their
// concomitant-based empirical estimators, asymptotic-variance machinery, and
// the Monte Carlo verification harness.

#include "wra/asymptotics.hpp"
#include "wra/csv.hpp"
#include "wra/distributions.hpp"
#include "wra/empirical.hpp"
#include "wra/errors.hpp"
#include "wra/json_io.hpp"
#include "wra/montecarlo.hpp"
#include "wra/numeric.hpp"
#include "wra/quadrature.hpp"
#include "wra/rng.hpp"
#include "wra/sample.hpp"
#include "wra/weights.hpp"
