#pragma once

#include "errors.hpp"
#include "rng.hpp"
#include "grid.hpp"
#include "instances.hpp"
#include "environment.hpp"
#include "episode_log.hpp"
#include "maxrects.hpp"
#include "policies.hpp"
#include "external_policy.hpp"
#include "evaluation.hpp"
#include "render.hpp"
#include "protocol.hpp"
