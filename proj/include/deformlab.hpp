#pragma once

#include "deformlab/scalars.hpp"
#include "deformlab/groups.hpp"
#include "deformlab/ncalg.hpp"
#include "deformlab/hochschild.hpp"
#include "deformlab/sra.hpp"
#include "deformlab/dunkl.hpp"
#include "deformlab/heckelab.hpp"
#include "deformlab/cli/task.hpp"
#include "deformlab/cli/report.hpp"
#include "deformlab/cli/run.hpp"
