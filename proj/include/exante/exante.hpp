#pragma once

#include "exante/allocation.hpp"
#include "exante/clearing.hpp"
#include "exante/common.hpp"
#include "exante/decision.hpp"
#include "exante/examples.hpp"
#include "exante/information.hpp"
#include "exante/market.hpp"
#include "exante/oracle.hpp"
#include "exante/scenario.hpp"
#include "exante/simplex.hpp"
#include "exante/welfare.hpp"
