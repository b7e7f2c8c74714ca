#pragma once

#include "banzhaf/numeric.hpp"
#include "banzhaf/lineage.hpp"
#include "banzhaf/budget.hpp"
#include "banzhaf/dtree.hpp"
#include "banzhaf/exact.hpp"
#include "banzhaf/bounds.hpp"
#include "banzhaf/adaban.hpp"
#include "banzhaf/ranking.hpp"
#include "banzhaf/baselines.hpp"
#include "banzhaf/query.hpp"
#include "banzhaf/attribution.hpp"
