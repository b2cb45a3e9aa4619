#pragma once

// Umbrella header for the action-transition boundary alignment library.

#include "atba/alignment.hpp"
#include "atba/bench.hpp"
#include "atba/boundary.hpp"
#include "atba/corpus.hpp"
#include "atba/error.hpp"
#include "atba/io.hpp"
#include "atba/losses.hpp"
#include "atba/matrix.hpp"
#include "atba/metrics.hpp"
#include "atba/oracles.hpp"
#include "atba/parallel.hpp"
#include "atba/rng.hpp"
#include "atba/synthetic.hpp"
#include "atba/types.hpp"
