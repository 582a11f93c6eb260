#pragma once

#include "errors.hpp"
#include "summation.hpp"
#include "rational.hpp"
#include "padic.hpp"
#include "radial.hpp"
#include "gamma_p.hpp"
#include "haar_mc.hpp"
#include "semistable.hpp"
#include "quadrature.hpp"
#include "real_stable.hpp"
#include "theta.hpp"
#include "special.hpp"
#include "lattice.hpp"
#include "adele.hpp"
