#ifndef STABKIT_STABKIT_HPP
#define STABKIT_STABKIT_HPP

#include "stabkit/bounds.hpp"
#include "stabkit/certificates.hpp"
#include "stabkit/certify.hpp"
#include "stabkit/config.hpp"
#include "stabkit/controllers.hpp"
#include "stabkit/core.hpp"
#include "stabkit/estimators.hpp"
#include "stabkit/expr.hpp"
#include "stabkit/fields.hpp"
#include "stabkit/io.hpp"
#include "stabkit/ode.hpp"
#include "stabkit/plot.hpp"
#include "stabkit/registry.hpp"
#include "stabkit/sampling.hpp"
#include "stabkit/scenarios.hpp"
#include "stabkit/signal.hpp"
#include "stabkit/system.hpp"
#include "stabkit/systems.hpp"

#endif  // STABKIT_STABKIT_HPP
