#pragma once

#include "qcrb/errors.hpp"
#include "qcrb/estimation.hpp"
#include "qcrb/ghz.hpp"
#include "qcrb/information.hpp"
#include "qcrb/linalg.hpp"
#include "qcrb/optimality.hpp"
#include "qcrb/parallel.hpp"
#include "qcrb/state.hpp"
#include "qcrb/tolerances.hpp"
