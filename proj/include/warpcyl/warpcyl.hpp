#pragma once

#include <warpcyl/error.hpp>
#include <warpcyl/warp.hpp>
#include <warpcyl/modes.hpp>
#include <warpcyl/ode.hpp>
#include <warpcyl/eigensolve.hpp>
#include <warpcyl/symmetry.hpp>
#include <warpcyl/flow.hpp>
