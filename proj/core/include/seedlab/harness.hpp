#pragma once

#include "seedlab/harness/config_space.hpp"
#include "seedlab/harness/experiments.hpp"
#include "seedlab/harness/reports.hpp"
#include "seedlab/harness/results_store.hpp"
