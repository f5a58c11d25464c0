#ifndef SPIKELOC_SPIKELOC_HPP
#define SPIKELOC_SPIKELOC_HPP

#include "spikeloc/acquisition.hpp"
#include "spikeloc/harness.hpp"
#include "spikeloc/kernels.hpp"
#include "spikeloc/localizer.hpp"
#include "spikeloc/measures.hpp"
#include "spikeloc/params.hpp"
#include "spikeloc/rng.hpp"
#include "spikeloc/supportgeom.hpp"

#endif
