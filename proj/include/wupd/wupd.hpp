#pragma once

#include "wupd/error.hpp"
#include "wupd/grid.hpp"
#include "wupd/density.hpp"
#include "wupd/families.hpp"
#include "wupd/updating.hpp"
#include "wupd/dispersion.hpp"
#include "wupd/random.hpp"
#include "wupd/fit.hpp"
#include "wupd/verify.hpp"
#include "wupd/config.hpp"
#include "wupd/scenario.hpp"
