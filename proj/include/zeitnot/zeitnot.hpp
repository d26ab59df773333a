#pragma once
// Umbrella header: competing-buyer optimal stopping on record chains —
// generic solver, single- and two-quality models, duel simulator, root
// finder, and reporting.

#include "bivariant.hpp"
#include "chain.hpp"
#include "duel.hpp"
#include "io.hpp"
#include "monovariant.hpp"
#include "numeric.hpp"
#include "report.hpp"
#include "rootfind.hpp"
#include "stopping.hpp"
#include "threshold.hpp"
#include "version.hpp"
