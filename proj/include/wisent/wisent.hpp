#pragma once

// Umbrella header for the whole library.

#include "wisent/activity_classifier.hpp"
#include "wisent/caf.hpp"
#include "wisent/config.hpp"
#include "wisent/estimators.hpp"
#include "wisent/harness.hpp"
#include "wisent/io.hpp"
#include "wisent/phase_extraction.hpp"
#include "wisent/pipeline.hpp"
#include "wisent/records.hpp"
#include "wisent/signal_model.hpp"
#include "wisent/types.hpp"
