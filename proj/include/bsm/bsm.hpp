#pragma once

#include "bsm/bitstring.hpp"
#include "bsm/config.hpp"
#include "bsm/dataset.hpp"
#include "bsm/descriptor.hpp"
#include "bsm/errors.hpp"
#include "bsm/eval.hpp"
#include "bsm/image.hpp"
#include "bsm/image_io.hpp"
#include "bsm/matcher.hpp"
#include "bsm/parallel.hpp"
#include "bsm/pattern.hpp"
#include "bsm/pipeline.hpp"
#include "bsm/refine.hpp"
#include "bsm/synthetic.hpp"
