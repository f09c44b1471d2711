#pragma once

#include "tselliptic/error.hpp"
#include "tselliptic/timescale.hpp"
#include "tselliptic/dirichlet_operator.hpp"
#include "tselliptic/product_grid.hpp"
#include "tselliptic/spectral.hpp"
#include "tselliptic/expression.hpp"
#include "tselliptic/nonlinearity.hpp"
#include "tselliptic/solver.hpp"
#include "tselliptic/config.hpp"
#include "tselliptic/io.hpp"
#include "tselliptic/reproduce.hpp"
