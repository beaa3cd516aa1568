#pragma once

#include "esgbench/agreement.hpp"
#include "esgbench/baseline_stats.hpp"
#include "esgbench/config.hpp"
#include "esgbench/error.hpp"
#include "esgbench/ingest.hpp"
#include "esgbench/ml_baseline.hpp"
#include "esgbench/normality.hpp"
#include "esgbench/pipeline.hpp"
#include "esgbench/recommend.hpp"
#include "esgbench/reports.hpp"
#include "esgbench/rng.hpp"
#include "esgbench/rrssv.hpp"
#include "esgbench/scoring.hpp"
#include "esgbench/taxonomy.hpp"
#include "esgbench/text.hpp"
