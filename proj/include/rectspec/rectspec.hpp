#pragma once

#include "rectspec/errors.hpp"
#include "rectspec/hypergraph.hpp"
#include "rectspec/solvers.hpp"
#include "rectspec/structure.hpp"
#include "rectspec/tensor.hpp"
#include "rectspec/tensor_io.hpp"
#include "rectspec/verification.hpp"
