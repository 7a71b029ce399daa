#pragma once

#include "ctlab/core.hpp"
#include "ctlab/fields.hpp"
#include "ctlab/flow.hpp"
#include "ctlab/lagrangian.hpp"
#include "ctlab/eulerian.hpp"
#include "ctlab/renorm.hpp"
#include "ctlab/bmo.hpp"
#include "ctlab/gronwall.hpp"
#include "ctlab/expr.hpp"
#include "ctlab/scenarios.hpp"
#include "ctlab/csv.hpp"
#include "ctlab/drivers.hpp"
