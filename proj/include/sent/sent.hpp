#pragma once

#include "sent/analysis.hpp"
#include "sent/canonical.hpp"
#include "sent/codec.hpp"
#include "sent/datasets.hpp"
#include "sent/graph.hpp"
#include "sent/io.hpp"
#include "sent/metrics.hpp"
#include "sent/ngram.hpp"
#include "sent/oracle.hpp"
#include "sent/parallel.hpp"
#include "sent/planarity.hpp"
#include "sent/rng.hpp"
#include "sent/scorer.hpp"
#include "sent/strategy.hpp"
#include "sent/token.hpp"
