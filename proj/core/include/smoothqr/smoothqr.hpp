#pragma once

#include "smoothqr/dataset.hpp"
#include "smoothqr/errors.hpp"
#include "smoothqr/flam.hpp"
#include "smoothqr/io.hpp"
#include "smoothqr/kernel.hpp"
#include "smoothqr/lamm.hpp"
#include "smoothqr/objective.hpp"
#include "smoothqr/penalty.hpp"
#include "smoothqr/rng.hpp"
#include "smoothqr/simulation.hpp"
#include "smoothqr/tuning.hpp"
