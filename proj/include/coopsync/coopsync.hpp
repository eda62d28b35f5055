#ifndef COOPSYNC_COOPSYNC_HPP
#define COOPSYNC_COOPSYNC_HPP

// Frequency synchronization for a three-node cooperative relay system:
// signal model, Cramer-Rao bounds, relay frequency-adjustment policy,
// MAP/ML/correlation estimators, training sequence design, and a Monte
// Carlo harness that checks estimator MSE against the bounds.

#include "coopsync/csv.hpp"
#include "coopsync/errors.hpp"
#include "coopsync/estimators.hpp"
#include "coopsync/fisher.hpp"
#include "coopsync/linalg.hpp"
#include "coopsync/model.hpp"
#include "coopsync/montecarlo.hpp"
#include "coopsync/random.hpp"
#include "coopsync/relay_policy.hpp"
#include "coopsync/scenario_io.hpp"
#include "coopsync/sequences.hpp"
#include "coopsync/types.hpp"
#include "coopsync/version.hpp"

#endif  // COOPSYNC_COOPSYNC_HPP
