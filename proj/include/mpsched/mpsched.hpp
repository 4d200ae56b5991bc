#pragma once

// Umbrella header for the multipath scheduling simulator.

#include "mpsched/batch.hpp"
#include "mpsched/csv.hpp"
#include "mpsched/event_queue.hpp"
#include "mpsched/fd_estimator.hpp"
#include "mpsched/interval_set.hpp"
#include "mpsched/link.hpp"
#include "mpsched/packet.hpp"
#include "mpsched/receiver.hpp"
#include "mpsched/reorder_metrics.hpp"
#include "mpsched/rng.hpp"
#include "mpsched/scenario.hpp"
#include "mpsched/scheduler.hpp"
#include "mpsched/send_buffer.hpp"
#include "mpsched/sender.hpp"
#include "mpsched/simulation.hpp"
#include "mpsched/subflow.hpp"
#include "mpsched/time.hpp"
