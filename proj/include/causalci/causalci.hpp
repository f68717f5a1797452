#pragma once

// Confidence sets for total causal effects in bivariate (and three-variable)
// linear structural equation models with homoscedastic errors, when the
// causal direction itself is uncertain. Implements test-inversion sets based
// on inequality-constrained LRTs, polynomial-constraint LRTs, and split
// likelihood-ratio (universal inference) tests, along with bootstrap
// baselines and a Monte Carlo harness.

#include "causalci/bootstrap.hpp"
#include "causalci/chi_square.hpp"
#include "causalci/confidence_set.hpp"
#include "causalci/config_file.hpp"
#include "causalci/core_model.hpp"
#include "causalci/error.hpp"
#include "causalci/experiment.hpp"
#include "causalci/lrt_inequality.hpp"
#include "causalci/lrt_polynomial.hpp"
#include "causalci/pairs.hpp"
#include "causalci/rng.hpp"
#include "causalci/sampler.hpp"
#include "causalci/split_lrt.hpp"
