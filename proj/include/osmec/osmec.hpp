#pragma once

// Umbrella header for the osmec library: service-based MEC layer over a
// unified message bus, template/instance MANO reconfiguration, VIM resource
// management and the deterministic scenario engine.

#include "osmec/bus/bus.hpp"
#include "osmec/bus/message.hpp"
#include "osmec/bus/router.hpp"
#include "osmec/core/log.hpp"
#include "osmec/core/random.hpp"
#include "osmec/core/result.hpp"
#include "osmec/core/text.hpp"
#include "osmec/core/vtime.hpp"
#include "osmec/mano/cluster.hpp"
#include "osmec/mano/instance.hpp"
#include "osmec/mano/mano.hpp"
#include "osmec/mano/resources.hpp"
#include "osmec/mano/state_store.hpp"
#include "osmec/mano/template.hpp"
#include "osmec/nf/asf.hpp"
#include "osmec/nf/cpcf.hpp"
#include "osmec/nf/descriptor.hpp"
#include "osmec/nf/legacy.hpp"
#include "osmec/nf/nrf.hpp"
#include "osmec/nf/srf.hpp"
#include "osmec/nf/udm.hpp"
#include "osmec/nf/upf.hpp"
#include "osmec/sim/engine.hpp"
#include "osmec/sim/event_log.hpp"
#include "osmec/sim/measure.hpp"
#include "osmec/sim/metrics.hpp"
#include "osmec/sim/scenario.hpp"
#include "osmec/sim/scenario_library.hpp"
#include "osmec/system.hpp"
#include "osmec/workloads/charging.hpp"
#include "osmec/workloads/compute.hpp"
#include "osmec/workloads/video.hpp"
