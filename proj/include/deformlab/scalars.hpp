#pragma once

#include "deformlab/scalars/cyclotomic.hpp"
#include "deformlab/scalars/linalg.hpp"
#include "deformlab/scalars/matrix.hpp"
#include "deformlab/scalars/param_poly.hpp"
#include "deformlab/scalars/rank.hpp"
#include "deformlab/scalars/rational.hpp"
