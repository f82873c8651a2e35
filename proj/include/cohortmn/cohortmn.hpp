#pragma once

#include "cohortmn/bayes.hpp"
#include "cohortmn/cohort.hpp"
#include "cohortmn/compare.hpp"
#include "cohortmn/csv.hpp"
#include "cohortmn/errors.hpp"
#include "cohortmn/matrix.hpp"
#include "cohortmn/microsim.hpp"
#include "cohortmn/model_file.hpp"
#include "cohortmn/moments.hpp"
#include "cohortmn/occupancy.hpp"
#include "cohortmn/rng.hpp"
#include "cohortmn/schedule.hpp"
#include "cohortmn/state_space.hpp"
#include "cohortmn/text_io.hpp"
#include "cohortmn/version.hpp"
