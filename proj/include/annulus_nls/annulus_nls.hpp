#pragma once

#include "annulus_nls/asymptotics.hpp"
#include "annulus_nls/dynamics.hpp"
#include "annulus_nls/errors.hpp"
#include "annulus_nls/interpolate.hpp"
#include "annulus_nls/io.hpp"
#include "annulus_nls/mass_curve.hpp"
#include "annulus_nls/mesh.hpp"
#include "annulus_nls/ode.hpp"
#include "annulus_nls/powerlaw.hpp"
#include "annulus_nls/problem.hpp"
#include "annulus_nls/quadrature.hpp"
#include "annulus_nls/radial_bvp.hpp"
#include "annulus_nls/rootfind.hpp"
#include "annulus_nls/soliton.hpp"
#include "annulus_nls/svg.hpp"
#include "annulus_nls/tridiag.hpp"
