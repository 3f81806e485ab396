#pragma once

#include "eprb/combinatorics.hpp"
#include "eprb/core.hpp"
#include "eprb/error.hpp"
#include "eprb/feasibility.hpp"
#include "eprb/pairing.hpp"
#include "eprb/random.hpp"
#include "eprb/rational.hpp"
#include "eprb/simplex.hpp"
#include "eprb/sources.hpp"
#include "eprb/statistics.hpp"
