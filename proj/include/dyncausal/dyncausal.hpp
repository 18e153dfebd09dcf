#pragma once

#include "dyncausal/analysis.hpp"
#include "dyncausal/graph.hpp"
#include "dyncausal/presets.hpp"
#include "dyncausal/process.hpp"
#include "dyncausal/rdm.hpp"
#include "dyncausal/scm.hpp"
#include "dyncausal/simulate.hpp"
