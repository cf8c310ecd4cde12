#pragma once

#include "signallab/classify/features.hpp"
#include "signallab/classify/labels.hpp"
#include "signallab/classify/tree.hpp"
#include "signallab/classify/weekly.hpp"
#include "signallab/core/csv.hpp"
#include "signallab/core/date.hpp"
#include "signallab/core/error.hpp"
#include "signallab/core/format.hpp"
#include "signallab/core/rng.hpp"
#include "signallab/core/series.hpp"
#include "signallab/events/event_study.hpp"
#include "signallab/ingest/ingest.hpp"
#include "signallab/ingest/records.hpp"
#include "signallab/ingest/series_io.hpp"
#include "signallab/synth/generate.hpp"
#include "signallab/tsa/correlation.hpp"
#include "signallab/tsa/dist.hpp"
#include "signallab/tsa/granger.hpp"
#include "signallab/tsa/ols.hpp"
#include "signallab/tsa/stationarity.hpp"
