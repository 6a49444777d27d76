#pragma once

#include "epikit/io.hpp"
#include "epikit/kernel.hpp"
#include "epikit/logic.hpp"
#include "epikit/schedules.hpp"
#include "epikit/simengine.hpp"
#include "epikit/solver.hpp"
#include "epikit/tasks.hpp"
#include "epikit/topology.hpp"
