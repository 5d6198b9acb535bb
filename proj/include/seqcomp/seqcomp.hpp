// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "seqcomp/core.hpp"
#include "seqcomp/datagen.hpp"
#include "seqcomp/grouping.hpp"
#include "seqcomp/predict.hpp"
#include "seqcomp/random.hpp"
#include "seqcomp/sampler.hpp"
#include "seqcomp/slice.hpp"
#include "seqcomp/stabledist.hpp"
