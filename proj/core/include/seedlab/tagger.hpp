#pragma once

#include "seedlab/tagger/config.hpp"
#include "seedlab/tagger/model.hpp"
#include "seedlab/tagger/trainer.hpp"
