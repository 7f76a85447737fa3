#pragma once

#include "hslab/params.hpp"
#include "hslab/grid.hpp"
#include "hslab/profile.hpp"
#include "hslab/energy.hpp"
#include "hslab/solvers.hpp"
#include "hslab/pohozaev.hpp"
#include "hslab/concentration.hpp"
#include "hslab/io.hpp"
