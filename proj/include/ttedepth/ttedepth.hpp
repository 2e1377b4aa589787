#pragma once

#include "ttedepth/corpus.hpp"
#include "ttedepth/depth.hpp"
#include "ttedepth/error.hpp"
#include "ttedepth/exact_sum.hpp"
#include "ttedepth/normal.hpp"
#include "ttedepth/parallel.hpp"
#include "ttedepth/random.hpp"
#include "ttedepth/ranksum.hpp"
#include "ttedepth/report.hpp"
#include "ttedepth/selection.hpp"
#include "ttedepth/simulate.hpp"
