#pragma once

#include "niss/bounds.hpp"
#include "niss/errors.hpp"
#include "niss/fourier.hpp"
#include "niss/oracle.hpp"
#include "niss/ortho.hpp"
#include "niss/rng.hpp"
#include "niss/rounding.hpp"
#include "niss/source.hpp"
#include "niss/target.hpp"
#include "niss/truth_table.hpp"
