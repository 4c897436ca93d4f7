#pragma once

#include "uosdiff/config.hpp"
#include "uosdiff/diffusion_clock.hpp"
#include "uosdiff/error.hpp"
#include "uosdiff/experiment.hpp"
#include "uosdiff/geometry.hpp"
#include "uosdiff/metrics.hpp"
#include "uosdiff/parallel.hpp"
#include "uosdiff/random.hpp"
#include "uosdiff/result_table.hpp"
#include "uosdiff/sampler.hpp"
#include "uosdiff/score_estimator.hpp"
#include "uosdiff/selftest.hpp"
#include "uosdiff/subspace_recovery.hpp"
#include "uosdiff/target_model.hpp"
#include "uosdiff/types.hpp"
