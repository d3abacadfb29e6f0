#pragma once

#include "atf/battery_chain.hpp"
#include "atf/config.hpp"
#include "atf/fading.hpp"
#include "atf/outage.hpp"
#include "atf/params.hpp"
#include "atf/sim.hpp"
#include "atf/sweep.hpp"
