#pragma once

#include "rgc/analytics.hpp"
#include "rgc/cech.hpp"
#include "rgc/error.hpp"
#include "rgc/harness.hpp"
#include "rgc/homology.hpp"
#include "rgc/implicit_homology.hpp"
#include "rgc/manifold.hpp"
#include "rgc/morse.hpp"
#include "rgc/random.hpp"
#include "rgc/sampler.hpp"
#include "rgc/theta.hpp"
