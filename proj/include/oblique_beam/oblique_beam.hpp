#pragma once

#include "oblique_beam/types.hpp"
#include "oblique_beam/problem_model.hpp"
#include "oblique_beam/oblique_manifold.hpp"
#include "oblique_beam/smoothed_objective.hpp"
#include "oblique_beam/rcg_solver.hpp"
#include "oblique_beam/dinkelbach.hpp"
#include "oblique_beam/oracles.hpp"
#include "oblique_beam/sim_harness.hpp"
#include "oblique_beam/instance_json.hpp"
#include "oblique_beam/csv.hpp"
