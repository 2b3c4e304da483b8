#pragma once

#include "abcmeta/baselines.hpp"
#include "abcmeta/engine.hpp"
#include "abcmeta/experiments.hpp"
#include "abcmeta/families.hpp"
#include "abcmeta/manifest.hpp"
#include "abcmeta/priors.hpp"
#include "abcmeta/report.hpp"
#include "abcmeta/rng.hpp"
#include "abcmeta/summaries.hpp"
