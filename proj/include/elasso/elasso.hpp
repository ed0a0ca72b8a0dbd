#pragma once

#include "elasso/dual.hpp"
#include "elasso/errors.hpp"
#include "elasso/forecast.hpp"
#include "elasso/io.hpp"
#include "elasso/mp.hpp"
#include "elasso/oracles.hpp"
#include "elasso/path.hpp"
#include "elasso/penalties.hpp"
#include "elasso/selection.hpp"
#include "elasso/simulate.hpp"
#include "elasso/spectrum.hpp"
#include "elasso/weights.hpp"
