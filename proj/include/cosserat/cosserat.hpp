#pragma once

#include "cosserat/assembly.hpp"
#include "cosserat/config.hpp"
#include "cosserat/export.hpp"
#include "cosserat/material.hpp"
#include "cosserat/mesh.hpp"
#include "cosserat/mms.hpp"
#include "cosserat/msh_io.hpp"
#include "cosserat/operator_table.hpp"
#include "cosserat/postproc.hpp"
#include "cosserat/solver.hpp"
#include "cosserat/splitting.hpp"
