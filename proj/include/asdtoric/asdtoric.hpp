#ifndef ASDTORIC_ASDTORIC_HPP
#define ASDTORIC_ASDTORIC_HPP

#include "commands.hpp"
#include "config.hpp"
#include "curvature.hpp"
#include "errors.hpp"
#include "jet.hpp"
#include "joyce.hpp"
#include "lattice.hpp"
#include "metric.hpp"
#include "twistor.hpp"

#endif // ASDTORIC_ASDTORIC_HPP
