#pragma once

#include "mosqdyn/error.hpp"
#include "mosqdyn/model.hpp"
#include "mosqdyn/equilibria.hpp"
#include "mosqdyn/sampling.hpp"
#include "mosqdyn/geometry.hpp"
#include "mosqdyn/lyapunov.hpp"
#include "mosqdyn/cycles.hpp"
#include "mosqdyn/trajectory.hpp"
