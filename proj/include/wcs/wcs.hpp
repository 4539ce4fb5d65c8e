#pragma once

#include "wcs/cumvec.hpp"
#include "wcs/dualcurve.hpp"
#include "wcs/errors.hpp"
#include "wcs/extnat.hpp"
#include "wcs/matrix.hpp"
#include "wcs/minplus.hpp"
#include "wcs/oracle.hpp"
#include "wcs/polymatroid.hpp"
#include "wcs/random.hpp"
#include "wcs/scheduler.hpp"
#include "wcs/serialize.hpp"
#include "wcs/service.hpp"
#include "wcs/simulate.hpp"
