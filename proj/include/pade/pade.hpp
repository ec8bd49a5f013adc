#ifndef PADE_PADE_HPP
#define PADE_PADE_HPP

#include "pade/analysis.hpp"
#include "pade/cfrac.hpp"
#include "pade/core.hpp"
#include "pade/diagnostics.hpp"
#include "pade/pencil.hpp"
#include "pade/residues.hpp"
#include "pade/signal.hpp"
#include "pade/spectral.hpp"
#include "pade/tridiagonal.hpp"

#endif // PADE_PADE_HPP
