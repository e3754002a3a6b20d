#pragma once

#include "bratteli/bigint.hpp"
#include "bratteli/diagram.hpp"
#include "bratteli/error.hpp"
#include "bratteli/generators.hpp"
#include "bratteli/json_io.hpp"
#include "bratteli/ktheory.hpp"
#include "bratteli/matrix.hpp"
#include "bratteli/paths.hpp"
#include "bratteli/snf.hpp"
#include "bratteli/soe.hpp"
