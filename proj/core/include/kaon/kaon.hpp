#pragma once

#include "kaon/constants.hpp"
#include "kaon/decay_engine.hpp"
#include "kaon/detection.hpp"
#include "kaon/entangled_pair.hpp"
#include "kaon/error.hpp"
#include "kaon/io.hpp"
#include "kaon/kaon_state.hpp"
#include "kaon/lhv_model.hpp"
#include "kaon/monte_carlo.hpp"
#include "kaon/qm_predictions.hpp"
