#pragma once

#include "sigpole/blowup.hpp"
#include "sigpole/combinatorics.hpp"
#include "sigpole/errors.hpp"
#include "sigpole/poles.hpp"
#include "sigpole/quadrature.hpp"
#include "sigpole/rational.hpp"
#include "sigpole/serialize.hpp"
#include "sigpole/signature.hpp"
#include "sigpole/subset.hpp"
#include "sigpole/verify.hpp"
#include "sigpole/version.hpp"
