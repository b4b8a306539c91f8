#ifndef PGLB_PGLB_HPP_
#define PGLB_PGLB_HPP_

#include "analyzer.hpp"
#include "bench.hpp"
#include "config.hpp"
#include "family.hpp"
#include "instruction.hpp"
#include "projector.hpp"
#include "syntax.hpp"
#include "validate.hpp"
#include "vm.hpp"

#endif  // PGLB_PGLB_HPP_
