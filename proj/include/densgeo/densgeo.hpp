#pragma once

#include "densgeo/calculus.hpp"
#include "densgeo/checks.hpp"
#include "densgeo/config.hpp"
#include "densgeo/connections.hpp"
#include "densgeo/density.hpp"
#include "densgeo/geodesics.hpp"
#include "densgeo/harness.hpp"
#include "densgeo/metric.hpp"
#include "densgeo/report.hpp"
#include "densgeo/rng.hpp"
#include "densgeo/space.hpp"
