#pragma once

#include "pkam/cohomology.hpp"
#include "pkam/diagnostics.hpp"
#include "pkam/diophantine.hpp"
#include "pkam/errors.hpp"
#include "pkam/fourier.hpp"
#include "pkam/geometry.hpp"
#include "pkam/io.hpp"
#include "pkam/models.hpp"
#include "pkam/newton.hpp"
#include "pkam/parallel.hpp"
#include "pkam/reducibility.hpp"
#include "pkam/uniqueness.hpp"
