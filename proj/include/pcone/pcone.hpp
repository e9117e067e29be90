#pragma once

#include "pcone/convexity.hpp"
#include "pcone/errors.hpp"
#include "pcone/geometry.hpp"
#include "pcone/io.hpp"
#include "pcone/matcore.hpp"
#include "pcone/oracle.hpp"
#include "pcone/projection.hpp"
#include "pcone/rng.hpp"
