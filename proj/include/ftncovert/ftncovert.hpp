#pragma once

#include "common.hpp"
#include "config.hpp"
#include "covertness.hpp"
#include "csv.hpp"
#include "detection.hpp"
#include "experiment.hpp"
#include "isi.hpp"
#include "power.hpp"
#include "pulse.hpp"
#include "quadrature.hpp"
#include "rate.hpp"
#include "rng.hpp"
#include "version.hpp"
