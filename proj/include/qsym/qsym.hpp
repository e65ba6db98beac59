#pragma once

#include "qsym/builtin.hpp"
#include "qsym/common.hpp"
#include "qsym/ensemble.hpp"
#include "qsym/group.hpp"
#include "qsym/hilbert.hpp"
#include "qsym/inference.hpp"
#include "qsym/logic.hpp"
#include "qsym/model_io.hpp"
#include "qsym/partition.hpp"
#include "qsym/repspace.hpp"
#include "qsym/symmetry.hpp"
