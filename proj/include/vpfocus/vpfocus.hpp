#pragma once

#include "vpfocus/error.hpp"
#include "vpfocus/numeric.hpp"
#include "vpfocus/parallel.hpp"
#include "vpfocus/phase_space.hpp"
#include "vpfocus/initial_data.hpp"
#include "vpfocus/field_solver.hpp"
#include "vpfocus/characteristics.hpp"
#include "vpfocus/oracle.hpp"
#include "vpfocus/bounds.hpp"
#include "vpfocus/property_suite.hpp"
#include "vpfocus/run_record.hpp"
#include "vpfocus/theorem_designer.hpp"
#include "vpfocus/io/ini.hpp"
#include "vpfocus/io/config.hpp"
#include "vpfocus/io/csv.hpp"
#include "vpfocus/io/pipeline.hpp"
#include "vpfocus/io/report.hpp"
