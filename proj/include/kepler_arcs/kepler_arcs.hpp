// Umbrella header.
#pragma once

#include "kepler_arcs/acceptance.hpp"
#include "kepler_arcs/bifurcation.hpp"
#include "kepler_arcs/config.hpp"
#include "kepler_arcs/dynamics.hpp"
#include "kepler_arcs/enumeration.hpp"
#include "kepler_arcs/geometry.hpp"
#include "kepler_arcs/parallel.hpp"
#include "kepler_arcs/pipeline.hpp"
#include "kepler_arcs/report.hpp"
#include "kepler_arcs/svg.hpp"
#include "kepler_arcs/variational.hpp"
#include "kepler_arcs/weight.hpp"
