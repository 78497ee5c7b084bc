#pragma once

#include "gossip/analysis.hpp"
#include "gossip/bounds.hpp"
#include "gossip/engine.hpp"
#include "gossip/field.hpp"
#include "gossip/graph.hpp"
#include "gossip/protocols.hpp"
#include "gossip/rng.hpp"
