#pragma once

#include "pkr/qcore.hpp"
#include "pkr/states.hpp"
#include "pkr/channels.hpp"
#include "pkr/sphere.hpp"
#include "pkr/keyrate.hpp"
#include "pkr/interpolation.hpp"
#include "pkr/estimator.hpp"
#include "pkr/harness.hpp"
