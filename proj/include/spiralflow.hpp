#pragma once

#include "spiralflow/acceptance.hpp"
#include "spiralflow/analysis.hpp"
#include "spiralflow/errors.hpp"
#include "spiralflow/extraction.hpp"
#include "spiralflow/field.hpp"
#include "spiralflow/forcing.hpp"
#include "spiralflow/geometry.hpp"
#include "spiralflow/io.hpp"
#include "spiralflow/run.hpp"
#include "spiralflow/runner.hpp"
#include "spiralflow/scenarios.hpp"
#include "spiralflow/solver.hpp"
#include "spiralflow/theta.hpp"
#include "spiralflow/vec2.hpp"
