#pragma once

#include "partition_lab/bounds.hpp"
#include "partition_lab/bromwich.hpp"
#include "partition_lab/cli.hpp"
#include "partition_lab/complex.hpp"
#include "partition_lab/counts.hpp"
#include "partition_lab/ext_real.hpp"
#include "partition_lab/functions.hpp"
#include "partition_lab/lattice.hpp"
#include "partition_lab/report.hpp"
#include "partition_lab/series.hpp"
#include "partition_lab/special.hpp"
