#pragma once

#include "pacer/bench.hpp"
#include "pacer/candidates.hpp"
#include "pacer/dijkstra.hpp"
#include "pacer/feature_index.hpp"
#include "pacer/gain.hpp"
#include "pacer/generate.hpp"
#include "pacer/hop_index.hpp"
#include "pacer/map_io.hpp"
#include "pacer/model.hpp"
#include "pacer/query.hpp"
#include "pacer/search.hpp"
#include "pacer/topk.hpp"
