#pragma once

#include "alesupg/core.hpp"
#include "alesupg/diagnostics.hpp"
#include "alesupg/driver.hpp"
#include "alesupg/elements.hpp"
#include "alesupg/forms.hpp"
#include "alesupg/linalg.hpp"
#include "alesupg/mesh.hpp"
#include "alesupg/meshgen.hpp"
#include "alesupg/motion.hpp"
#include "alesupg/scenario.hpp"
#include "alesupg/space.hpp"
#include "alesupg/stepping.hpp"
#include "alesupg/vtk.hpp"
