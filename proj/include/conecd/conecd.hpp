#pragma once

#include "conecd/error.hpp"
#include "conecd/coeffs.hpp"
#include "conecd/mms.hpp"
#include "conecd/mms_io.hpp"
#include "conecd/cones.hpp"
#include "conecd/transport.hpp"
#include "conecd/geodesic.hpp"
#include "conecd/measures.hpp"
#include "conecd/cdcheck.hpp"
#include "conecd/spectral.hpp"
#include "conecd/report_io.hpp"
