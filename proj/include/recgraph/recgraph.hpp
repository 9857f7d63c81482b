#pragma once

#include "recgraph/config.hpp"
#include "recgraph/core.hpp"
#include "recgraph/correlation.hpp"
#include "recgraph/evolution.hpp"
#include "recgraph/graph_io.hpp"
#include "recgraph/graphcrawl.hpp"
#include "recgraph/http_source.hpp"
#include "recgraph/metrics.hpp"
#include "recgraph/plateau.hpp"
#include "recgraph/replay_source.hpp"
#include "recgraph/report.hpp"
#include "recgraph/sample_log.hpp"
#include "recgraph/sampler.hpp"
#include "recgraph/source.hpp"
#include "recgraph/synth.hpp"
#include "recgraph/transitions.hpp"
