#pragma once

#include "gridlines/types.hpp"
#include "gridlines/rng.hpp"
#include "gridlines/grid_geometry.hpp"
#include "gridlines/resampler.hpp"
#include "gridlines/pipeline2d.hpp"
#include "gridlines/regularizer.hpp"
#include "gridlines/construct.hpp"
#include "gridlines/pipeline_hd.hpp"
#include "gridlines/oracle.hpp"
#include "gridlines/composer.hpp"
#include "gridlines/io.hpp"
