#pragma once

// Umbrella header: decide distributed task solvability under a message
// adversary by searching for global sections of the task sheaf over system
// slices, and synthesize verified terminating decision maps.

#include "tasksheaf/adversary.hpp"
#include "tasksheaf/decision_map.hpp"
#include "tasksheaf/domain.hpp"
#include "tasksheaf/dot.hpp"
#include "tasksheaf/errors.hpp"
#include "tasksheaf/execution.hpp"
#include "tasksheaf/linalg.hpp"
#include "tasksheaf/sheaf.hpp"
#include "tasksheaf/slicing.hpp"
#include "tasksheaf/synthesis.hpp"
#include "tasksheaf/task.hpp"
#include "tasksheaf/value.hpp"
#include "tasksheaf/verifier.hpp"
