#pragma once

#include "numthy.hpp"
#include "characters.hpp"
#include "gausssums.hpp"
#include "singular.hpp"
#include "analytic.hpp"
#include "constants.hpp"
#include "primes.hpp"
#include "zeros.hpp"
#include "circle.hpp"
