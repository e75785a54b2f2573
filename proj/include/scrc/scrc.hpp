// scrc.hpp -- umbrella header.
#pragma once

#include "scrc/common.hpp"
#include "scrc/crc.hpp"
#include "scrc/io.hpp"
#include "scrc/osc.hpp"
#include "scrc/pipeline.hpp"
#include "scrc/recording.hpp"
#include "scrc/spectral.hpp"
#include "scrc/synthgen.hpp"
