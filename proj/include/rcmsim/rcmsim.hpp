#pragma once

// Umbrella header for the RCM admittance-control simulation library.

#include "rcmsim/builtin_models.hpp"
#include "rcmsim/control.hpp"
#include "rcmsim/csv_log.hpp"
#include "rcmsim/environment.hpp"
#include "rcmsim/estimation.hpp"
#include "rcmsim/manipulator.hpp"
#include "rcmsim/plot.hpp"
#include "rcmsim/rcm.hpp"
#include "rcmsim/simulation.hpp"
#include "rcmsim/summary.hpp"
#include "rcmsim/types.hpp"
#include "rcmsim/verify.hpp"
