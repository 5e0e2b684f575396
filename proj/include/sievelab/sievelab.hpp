#pragma once

#include "sievelab/common.hpp"
#include "sievelab/arith.hpp"
#include "sievelab/eisenstein.hpp"
#include "sievelab/cubic_sieve.hpp"
#include "sievelab/sieve_matrix.hpp"
#include "sievelab/gl3_hecke.hpp"
#include "sievelab/sieve_norms.hpp"
#include "sievelab/analytic.hpp"
#include "sievelab/experiments.hpp"
#include "sievelab/acceptance.hpp"
