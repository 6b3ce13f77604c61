#pragma once

#include "affcredit/affine_core.hpp"
#include "affcredit/black_scholes.hpp"
#include "affcredit/context.hpp"
#include "affcredit/credit_pricing.hpp"
#include "affcredit/errors.hpp"
#include "affcredit/fourier.hpp"
#include "affcredit/heston_jtd.hpp"
#include "affcredit/io.hpp"
#include "affcredit/measures.hpp"
#include "affcredit/montecarlo.hpp"
#include "affcredit/ode.hpp"
#include "affcredit/quadrature.hpp"
#include "affcredit/riccati.hpp"
