#pragma once

#include "samplebench/sampling/generate.hpp"
#include "samplebench/sampling/nucleus.hpp"
#include "samplebench/sampling/penalties.hpp"
#include "samplebench/sampling/sampler.hpp"
#include "samplebench/sampling/types.hpp"
