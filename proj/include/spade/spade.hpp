#pragma once

#include "spade/error.hpp"
#include "spade/graph.hpp"
#include "spade/knn.hpp"
#include "spade/lap_solve.hpp"
#include "spade/matrix_io.hpp"
#include "spade/scores.hpp"
#include "spade/spectral.hpp"
