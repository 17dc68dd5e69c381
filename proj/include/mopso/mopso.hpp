#pragma once

#include "mopso/archive.hpp"
#include "mopso/convergence.hpp"
#include "mopso/dominance.hpp"
#include "mopso/errors.hpp"
#include "mopso/experiment.hpp"
#include "mopso/export.hpp"
#include "mopso/rng.hpp"
#include "mopso/runner.hpp"
#include "mopso/scenario.hpp"
#include "mopso/swarm.hpp"
