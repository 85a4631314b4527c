#pragma once

#include "crowdasm/config_io.hpp"
#include "crowdasm/demand.hpp"
#include "crowdasm/domain.hpp"
#include "crowdasm/error.hpp"
#include "crowdasm/metrics.hpp"
#include "crowdasm/oracle.hpp"
#include "crowdasm/report.hpp"
#include "crowdasm/reputation.hpp"
#include "crowdasm/scenario_gen.hpp"
#include "crowdasm/scheduler.hpp"
#include "crowdasm/simulator.hpp"
#include "crowdasm/verify.hpp"
