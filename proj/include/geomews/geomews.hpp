#pragma once

#include "geomews/bvp.hpp"
#include "geomews/config.hpp"
#include "geomews/contour.hpp"
#include "geomews/core.hpp"
#include "geomews/equilibria.hpp"
#include "geomews/generator.hpp"
#include "geomews/geometry.hpp"
#include "geomews/grid.hpp"
#include "geomews/indicators.hpp"
#include "geomews/io.hpp"
#include "geomews/model.hpp"
#include "geomews/parallel.hpp"
#include "geomews/polyline.hpp"
#include "geomews/regression.hpp"
#include "geomews/scaling.hpp"
#include "geomews/scan.hpp"
#include "geomews/schlogl.hpp"
#include "geomews/simulate.hpp"
#include "geomews/stationary.hpp"
#include "geomews/svg.hpp"
#include "geomews/sweep.hpp"
