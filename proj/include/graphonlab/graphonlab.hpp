#pragma once

#include "graphonlab/analytic_graphon.hpp"
#include "graphonlab/canonical.hpp"
#include "graphonlab/cut_distance.hpp"
#include "graphonlab/cut_norm.hpp"
#include "graphonlab/error.hpp"
#include "graphonlab/example_graphs.hpp"
#include "graphonlab/experiments.hpp"
#include "graphonlab/graph.hpp"
#include "graphonlab/graphon.hpp"
#include "graphonlab/homomorphisms.hpp"
#include "graphonlab/matrix.hpp"
#include "graphonlab/quadrature.hpp"
#include "graphonlab/regularity.hpp"
#include "graphonlab/report.hpp"
#include "graphonlab/rng.hpp"
#include "graphonlab/sampling.hpp"
#include "graphonlab/spec_io.hpp"
#include "graphonlab/step_graphon.hpp"
#include "graphonlab/weak_regularity.hpp"
