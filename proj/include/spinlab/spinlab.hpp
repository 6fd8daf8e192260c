#pragma once

#include "spinlab/constants.hpp"
#include "spinlab/dynamics.hpp"
#include "spinlab/exact.hpp"
#include "spinlab/group.hpp"
#include "spinlab/hamiltonian.hpp"
#include "spinlab/io.hpp"
#include "spinlab/montecarlo.hpp"
#include "spinlab/multiplets.hpp"
#include "spinlab/params.hpp"
#include "spinlab/symbolic.hpp"
#include "spinlab/tensors.hpp"
#include "spinlab/version.hpp"
