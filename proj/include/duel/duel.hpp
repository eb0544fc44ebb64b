#pragma once

#include "duel/case_study.hpp"
#include "duel/classical.hpp"
#include "duel/curves.hpp"
#include "duel/engine.hpp"
#include "duel/errors.hpp"
#include "duel/inversion_check.hpp"
#include "duel/laplace.hpp"
#include "duel/renewal.hpp"
#include "duel/report.hpp"
#include "duel/rng.hpp"
#include "duel/scenario.hpp"
#include "duel/stats.hpp"
#include "duel/transform.hpp"
