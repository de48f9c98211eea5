#pragma once

#include "convexlab/certificates.hpp"
#include "convexlab/errors.hpp"
#include "convexlab/extremal.hpp"
#include "convexlab/hull2d.hpp"
#include "convexlab/maps.hpp"
#include "convexlab/norm_geometry.hpp"
#include "convexlab/norms.hpp"
#include "convexlab/oracle.hpp"
#include "convexlab/preimage.hpp"
#include "convexlab/region.hpp"
#include "convexlab/rng.hpp"
#include "convexlab/simplex.hpp"
#include "convexlab/smoothness.hpp"
