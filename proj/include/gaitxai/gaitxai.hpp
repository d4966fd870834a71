#pragma once

#include "gaitxai/error.hpp"
#include "gaitxai/keypoints.hpp"
#include "gaitxai/signal.hpp"
#include "gaitxai/features.hpp"
#include "gaitxai/dataset.hpp"
#include "gaitxai/mlp.hpp"
#include "gaitxai/svm.hpp"
#include "gaitxai/explainer.hpp"
#include "gaitxai/evaluation.hpp"
#include "gaitxai/stats.hpp"
#include "gaitxai/synth.hpp"
#include "gaitxai/io.hpp"
#include "gaitxai/reports.hpp"
#include "gaitxai/plot.hpp"
#include "gaitxai/pipeline.hpp"
#include "gaitxai/config.hpp"
