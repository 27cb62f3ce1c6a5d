#pragma once

#include "slwave/errors.hpp"
#include "slwave/grid.hpp"
#include "slwave/mat2.hpp"
#include "slwave/slcore.hpp"
#include "slwave/green.hpp"
#include "slwave/wave.hpp"
#include "slwave/spectrum.hpp"
#include "slwave/model.hpp"
#include "slwave/inverse.hpp"
#include "slwave/pipeline.hpp"
#include "slwave/io.hpp"
#include "slwave/verify.hpp"
