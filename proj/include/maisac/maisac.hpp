#pragma once

#include "maisac/array_model.hpp"
#include "maisac/beamforming.hpp"
#include "maisac/channel.hpp"
#include "maisac/config.hpp"
#include "maisac/core.hpp"
#include "maisac/driver.hpp"
#include "maisac/linalg.hpp"
#include "maisac/pso.hpp"
#include "maisac/rate_model.hpp"
#include "maisac/scenario.hpp"
#include "maisac/sdp_solver.hpp"
#include "maisac/validation.hpp"
