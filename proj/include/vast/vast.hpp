#pragma once

#include "vast/agent.hpp"
#include "vast/config.hpp"
#include "vast/harness.hpp"
#include "vast/maze.hpp"
#include "vast/nn.hpp"
#include "vast/oracle.hpp"
#include "vast/priority_queue.hpp"
#include "vast/qlookup.hpp"
#include "vast/replay_memory.hpp"
#include "vast/rng.hpp"
#include "vast/sweeper.hpp"
#include "vast/sweeper_service.hpp"
#include "vast/tabulator.hpp"
#include "vast/transition_table.hpp"
#include "vast/types.hpp"
#include "vast/variational.hpp"
