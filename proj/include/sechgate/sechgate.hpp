#ifndef SECHGATE_SECHGATE_HPP
#define SECHGATE_SECHGATE_HPP

#include "sechgate/common.hpp"
#include "sechgate/special_functions.hpp"
#include "sechgate/sech_pulse.hpp"
#include "sechgate/invariants.hpp"
#include "sechgate/device_model.hpp"
#include "sechgate/protocol.hpp"
#include "sechgate/propagation.hpp"
#include "sechgate/optimize.hpp"
#include "sechgate/io.hpp"
#include "sechgate/pipeline.hpp"

#endif  // SECHGATE_SECHGATE_HPP
