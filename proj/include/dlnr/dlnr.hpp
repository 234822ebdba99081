#ifndef DLNR_DLNR_HPP
#define DLNR_DLNR_HPP

// Dynamic lagged-logistic network regression.

#include "common.hpp"
#include "design_matrix.hpp"
#include "gli.hpp"
#include "glm_fit.hpp"
#include "model_select.hpp"
#include "report.hpp"
#include "simulate.hpp"
#include "temporal_graph.hpp"
#include "terms.hpp"

#endif  // DLNR_DLNR_HPP
