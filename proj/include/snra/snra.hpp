#pragma once

#include "snra/array.hpp"
#include "snra/bits.hpp"
#include "snra/dataset.hpp"
#include "snra/dbn.hpp"
#include "snra/device.hpp"
#include "snra/error.hpp"
#include "snra/fsm.hpp"
#include "snra/oracle.hpp"
#include "snra/power.hpp"
#include "snra/rng.hpp"
#include "snra/topology.hpp"
#include "snra/trace.hpp"
