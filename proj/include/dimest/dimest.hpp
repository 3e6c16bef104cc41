#pragma once

#include "dimest/boxcount.hpp"
#include "dimest/cloud_io.hpp"
#include "dimest/correlation.hpp"
#include "dimest/error.hpp"
#include "dimest/expfit.hpp"
#include "dimest/flatten.hpp"
#include "dimest/json_io.hpp"
#include "dimest/ks.hpp"
#include "dimest/linear_fit.hpp"
#include "dimest/neighbors.hpp"
#include "dimest/parallel.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/random.hpp"
#include "dimest/synth.hpp"
