#pragma once

#include "stoc/types.hpp"
#include "stoc/temporal.hpp"
#include "stoc/spatial.hpp"
#include "stoc/spacetime.hpp"
#include "stoc/control.hpp"
#include "stoc/backend.hpp"
#include "stoc/semidiscrete.hpp"
#include "stoc/pgm.hpp"
