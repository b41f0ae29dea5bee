#pragma once

#include "persuade/audit.hpp"
#include "persuade/coverage.hpp"
#include "persuade/coverage_lp.hpp"
#include "persuade/election.hpp"
#include "persuade/errors.hpp"
#include "persuade/generate.hpp"
#include "persuade/io.hpp"
#include "persuade/lp.hpp"
#include "persuade/noisy.hpp"
#include "persuade/parallel.hpp"
#include "persuade/private_solver.hpp"
#include "persuade/public_oracle.hpp"
#include "persuade/public_solver.hpp"
#include "persuade/random.hpp"
#include "persuade/semipublic_solver.hpp"
#include "persuade/stability.hpp"
