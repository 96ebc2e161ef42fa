#pragma once

#include "fairlab/dataset.hpp"
#include "fairlab/errors.hpp"
#include "fairlab/experiment.hpp"
#include "fairlab/io.hpp"
#include "fairlab/lfr.hpp"
#include "fairlab/logistic.hpp"
#include "fairlab/metrics.hpp"
#include "fairlab/random.hpp"
#include "fairlab/repair.hpp"
#include "fairlab/repair_config.hpp"
