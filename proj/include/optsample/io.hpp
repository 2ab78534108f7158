#pragma once

// CSV point sets and JSON reports.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "optsample/rates.hpp"
#include "optsample/scattered.hpp"
#include "optsample/subsample.hpp"

namespace optsample {

/// printf("%.17g"): round-trips every double.
std::string format_double(double v);

/// Header x_1..x_d,w then one point per row.
void write_design_csv(std::ostream& out, const SampledDesign& design);
/// Inverse of write_design_csv. Throws ConfigError on malformed input.
SampledDesign read_design_csv(std::istream& in);

nlohmann::json to_json(const SpectralCertificate& cert);
nlohmann::json to_json(const GreedyCertificate& cert);
/// Corner, side and point count per cube.
nlohmann::json to_json(const CubeDecomposition& dec);
nlohmann::json to_json(const RateFit& fit);

}  // namespace optsample
