#pragma once

#include "eqa/common.hpp"
#include "eqa/grid_search.hpp"
#include "eqa/motion.hpp"
#include "eqa/raycast.hpp"

#include "eqa/world/episode_start.hpp"
#include "eqa/world/geodesic.hpp"
#include "eqa/world/kinematics.hpp"
#include "eqa/world/scene.hpp"
#include "eqa/world/sensor.hpp"

#include "eqa/mapper/semantic_map.hpp"

#include "eqa/oracles/language.hpp"
#include "eqa/oracles/oracle.hpp"
#include "eqa/oracles/remote.hpp"
#include "eqa/oracles/snapshot.hpp"

#include "eqa/planner/planner.hpp"

#include "eqa/harness/episode.hpp"
#include "eqa/harness/metrics.hpp"
#include "eqa/harness/render.hpp"
#include "eqa/harness/suite.hpp"
#include "eqa/harness/sweep.hpp"
#include "eqa/harness/table.hpp"
