#pragma once

#include <ostream>
#include <string>

#include "mps/conditions.hpp"
#include "mps/weakconv.hpp"

namespace mps {

// RFC-4180 field quoting; applied only when the field needs it.
std::string csv_field(const std::string& raw);

// 17 significant digits, '.' decimal separator.
std::string format_real(double value);

// Flat CSV: statistic,n,ell,delta,eps,value,threshold,verdict
void write_condition_csv(std::ostream& out, const ConditionReport& report);

// Structured text mirror of the same report, including the resolved context.
void write_condition_text(std::ostream& out, const ConditionReport& report);

// One row per replicate; fdd ensembles get one column per grid point.
void write_ensemble_csv(std::ostream& out, const ReplicateEnsemble& ensemble);

}  // namespace mps
