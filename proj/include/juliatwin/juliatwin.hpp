#pragma once

#include "juliatwin/config.hpp"
#include "juliatwin/funceq.hpp"
#include "juliatwin/geometry.hpp"
#include "juliatwin/io.hpp"
#include "juliatwin/julia.hpp"
#include "juliatwin/localdyn.hpp"
#include "juliatwin/ratmap.hpp"
#include "juliatwin/report.hpp"
#include "juliatwin/spectrum.hpp"
