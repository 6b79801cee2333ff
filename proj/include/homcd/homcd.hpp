#pragma once

#include "homcd/algebra.hpp"
#include "homcd/bundle.hpp"
#include "homcd/kernel.hpp"
#include "homcd/mobius.hpp"
#include "homcd/operator.hpp"
