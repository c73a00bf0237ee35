#pragma once

#include "sgm/assign.hpp"
#include "sgm/csbm.hpp"
#include "sgm/graph.hpp"
#include "sgm/harness.hpp"
#include "sgm/lp_solver.hpp"
#include "sgm/matchers.hpp"
#include "sgm/oracle.hpp"
#include "sgm/parallel.hpp"
#include "sgm/relax.hpp"
#include "sgm/rng.hpp"
#include "sgm/scores.hpp"
