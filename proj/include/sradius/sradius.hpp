#pragma once

#include "sradius/affine.hpp"
#include "sradius/benchmarks.hpp"
#include "sradius/conic/encode.hpp"
#include "sradius/conic/program.hpp"
#include "sradius/conic/sdp.hpp"
#include "sradius/errors.hpp"
#include "sradius/exact_rank.hpp"
#include "sradius/experiment.hpp"
#include "sradius/hardness.hpp"
#include "sradius/io/problem_file.hpp"
#include "sradius/io/report.hpp"
#include "sradius/oracles.hpp"
#include "sradius/radius.hpp"
#include "sradius/realify.hpp"
#include "sradius/tnn.hpp"
