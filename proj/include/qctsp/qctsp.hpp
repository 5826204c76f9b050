// SPDX-License-Identifier: Apache-2.0
#ifndef QCTSP_QCTSP_HPP
#define QCTSP_QCTSP_HPP

#include "qctsp/cluster.hpp"
#include "qctsp/cobyla.hpp"
#include "qctsp/forest.hpp"
#include "qctsp/geo.hpp"
#include "qctsp/pipeline.hpp"
#include "qctsp/qsim.hpp"
#include "qctsp/qubo.hpp"
#include "qctsp/results_io.hpp"
#include "qctsp/rng.hpp"
#include "qctsp/stats.hpp"
#include "qctsp/tour.hpp"
#include "qctsp/vqe.hpp"

#endif  // QCTSP_QCTSP_HPP
