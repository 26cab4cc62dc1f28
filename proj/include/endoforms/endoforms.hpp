#pragma once

// Umbrella header for the library proper (the CLI pieces are not included).

#include "endoforms/errors.hpp"
#include "endoforms/linalg.hpp"
#include "endoforms/quasirot.hpp"
#include "endoforms/qforms.hpp"
#include "endoforms/canonical.hpp"
#include "endoforms/spectral.hpp"
#include "endoforms/invariants.hpp"
#include "endoforms/frenet.hpp"
