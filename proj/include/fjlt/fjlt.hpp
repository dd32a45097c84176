#pragma once

#include "fjlt/chaining.hpp"
#include "fjlt/code_matrix.hpp"
#include "fjlt/errors.hpp"
#include "fjlt/experiments.hpp"
#include "fjlt/gf2m.hpp"
#include "fjlt/hadamard.hpp"
#include "fjlt/plan.hpp"
#include "fjlt/pointset_io.hpp"
#include "fjlt/rng.hpp"
#include "fjlt/types.hpp"
