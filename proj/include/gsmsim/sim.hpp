#pragma once

#include "gsmsim/access.hpp"
#include "gsmsim/allocator.hpp"
#include "gsmsim/config.hpp"
#include "gsmsim/data_plane.hpp"
#include "gsmsim/engine.hpp"
#include "gsmsim/geometry.hpp"
#include "gsmsim/independent.hpp"
#include "gsmsim/rng.hpp"
#include "gsmsim/stats.hpp"
#include "gsmsim/traffic.hpp"
