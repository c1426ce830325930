#pragma once

// Umbrella header.
#include "genbound/complexity.hpp"
#include "genbound/concentration.hpp"
#include "genbound/deviation.hpp"
#include "genbound/entropy.hpp"
#include "genbound/enumerate.hpp"
#include "genbound/errors.hpp"
#include "genbound/families.hpp"
#include "genbound/generators.hpp"
#include "genbound/linear.hpp"
#include "genbound/options.hpp"
#include "genbound/random.hpp"
#include "genbound/reduce.hpp"
#include "genbound/serialize.hpp"
#include "genbound/types.hpp"
