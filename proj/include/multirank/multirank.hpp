#pragma once

#include "multirank/baselines.hpp"
#include "multirank/configurations.hpp"
#include "multirank/engine.hpp"
#include "multirank/experiments.hpp"
#include "multirank/generators.hpp"
#include "multirank/measures.hpp"
#include "multirank/multiplex.hpp"
#include "multirank/version.hpp"
