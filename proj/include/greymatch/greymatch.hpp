#pragma once

#include "basis.hpp"
#include "closed_form.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "grey.hpp"
#include "matching.hpp"
#include "matrix.hpp"
#include "model_io.hpp"
#include "numerics.hpp"
#include "response.hpp"
#include "series.hpp"
#include "simulate.hpp"
#include "theory.hpp"
#include "water.hpp"
