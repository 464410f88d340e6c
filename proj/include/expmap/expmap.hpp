#pragma once

// Umbrella header: the whole library in one include.

#include "address.hpp"
#include "common.hpp"
#include "components.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "io.hpp"
#include "kneading.hpp"
#include "rays.hpp"
#include "reference.hpp"
#include "render.hpp"
#include "verify.hpp"
