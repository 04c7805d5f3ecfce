#pragma once

// Umbrella header for the driftlearn toolkit: PAC sample-size planning,
// kernel classifiers over finite sign spaces, possible-world ensembles for
// drifting reference populations, therapy-plan ranking, and the synthetic
// population simulator.

#include "driftlearn/config.hpp"
#include "driftlearn/domain.hpp"
#include "driftlearn/drift.hpp"
#include "driftlearn/errors.hpp"
#include "driftlearn/experiments.hpp"
#include "driftlearn/kernel.hpp"
#include "driftlearn/model_io.hpp"
#include "driftlearn/oracle_io.hpp"
#include "driftlearn/pac.hpp"
#include "driftlearn/parallel.hpp"
#include "driftlearn/population.hpp"
#include "driftlearn/report.hpp"
#include "driftlearn/rng.hpp"
#include "driftlearn/textio.hpp"
#include "driftlearn/therapy.hpp"
