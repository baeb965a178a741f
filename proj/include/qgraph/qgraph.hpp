#pragma once

#include "qgraph/error.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/vertex.hpp"
#include "qgraph/secular.hpp"
#include "qgraph/roots.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/holonomy.hpp"
#include "qgraph/io.hpp"
#include "qgraph/commands.hpp"
