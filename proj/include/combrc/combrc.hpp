#pragma once

#include "combrc/bessel.hpp"
#include "combrc/comb_physics.hpp"
#include "combrc/config.hpp"
#include "combrc/error.hpp"
#include "combrc/harness.hpp"
#include "combrc/interlayer_opt.hpp"
#include "combrc/parallel.hpp"
#include "combrc/pipeline.hpp"
#include "combrc/random.hpp"
#include "combrc/readout.hpp"
#include "combrc/report.hpp"
#include "combrc/reservoir.hpp"
#include "combrc/symbols.hpp"
#include "combrc/tasks.hpp"
