#pragma once

#include "waltz/analysis.hpp"
#include "waltz/choreography.hpp"
#include "waltz/config.hpp"
#include "waltz/control_loop.hpp"
#include "waltz/csv.hpp"
#include "waltz/jointspace.hpp"
#include "waltz/log_io.hpp"
#include "waltz/model.hpp"
#include "waltz/partner.hpp"
#include "waltz/svg.hpp"
#include "waltz/taskspace.hpp"
#include "waltz/trial.hpp"
#include "waltz/types.hpp"
