#pragma once

#include "fp.hpp"
#include "hypergeometric.hpp"
#include "io.hpp"
#include "numtheory.hpp"
#include "rational.hpp"
#include "relation.hpp"
#include "structure.hpp"
#include "verification.hpp"
