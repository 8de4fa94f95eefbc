#pragma once

#include "nhsta/biorthogonal.hpp"
#include "nhsta/error.hpp"
#include "nhsta/finite_difference.hpp"
#include "nhsta/gauge.hpp"
#include "nhsta/linalg.hpp"
#include "nhsta/propagator.hpp"
#include "nhsta/shortcut.hpp"
#include "nhsta/supplement.hpp"
#include "nhsta/time_grid.hpp"
#include "nhsta/two_level.hpp"
#include "nhsta/version.hpp"
