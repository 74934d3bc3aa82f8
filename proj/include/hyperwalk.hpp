#pragma once

#include "hyperwalk/doob.hpp"
#include "hyperwalk/explore.hpp"
#include "hyperwalk/io.hpp"
#include "hyperwalk/mc.hpp"
#include "hyperwalk/oracle.hpp"
#include "hyperwalk/random.hpp"
#include "hyperwalk/stats.hpp"
#include "hyperwalk/theory.hpp"
#include "hyperwalk/verify.hpp"
