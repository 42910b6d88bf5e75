#pragma once

#include "pencilqp/errors.hpp"
#include "pencilqp/io.hpp"
#include "pencilqp/krein.hpp"
#include "pencilqp/oracle.hpp"
#include "pencilqp/pencil.hpp"
#include "pencilqp/qp1eqc.hpp"
#include "pencilqp/spectral.hpp"
#include "pencilqp/tolerances.hpp"
