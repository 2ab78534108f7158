#include "optsample/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace optsample {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_design_csv(std::ostream& out, const SampledDesign& design) {
  design.validate();
  const std::size_t dim = design.points.front().dim();
  for (std::size_t k = 0; k < dim; ++k) out << "x_" << (k + 1) << ',';
  out << "w\n";
  for (std::size_t i = 0; i < design.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) out << format_double(design.points[i][k]) << ',';
    out << format_double(design.weights[i]) << '\n';
  }
}

SampledDesign read_design_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("design CSV is empty");
  const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 2 || columns > Point::kMaxDim + 1) throw ConfigError("design CSV needs 1 to 3 coordinates plus a weight");
  const std::size_t dim = columns - 1;
  std::string expected;
  for (std::size_t k = 1; k <= dim; ++k) expected += "x_" + std::to_string(k) + ",";
  expected += "w";
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) throw ConfigError("design CSV header must be '" + expected + "'");
  SampledDesign design;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("design CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    if (vals.size() != columns) throw ConfigError("design CSV row " + std::to_string(row) + ": wrong column count");
    Point p = Point::zeros(dim);
    for (std::size_t k = 0; k < dim; ++k) p[k] = vals[k];
    design.points.push_back(p);
    design.weights.push_back(vals.back());
  }
  try {
    design.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("design CSV: ") + e.what());
  }
  return design;
}

nlohmann::json to_json(const SpectralCertificate& cert) {
  nlohmann::json j;
  j["lambda_min"] = cert.lambda_min;
  j["lambda_max"] = cert.lambda_max;
  if (std::isfinite(cert.stability_K)) {
    j["stability_K"] = cert.stability_K;
  } else {
    j["stability_K"] = "inf";
  }
  return j;
}

nlohmann::json to_json(const GreedyCertificate& cert) {
  nlohmann::json j;
  j["r"] = cert.params.r;
  j["sigma"] = cert.params.sigma;
  j["s"] = cert.params.s;
  j["delta_star"] = cert.params.delta_star;
  j["zeta_star"] = cert.params.zeta_star;
  j["design_gram"] = to_json(cert.design);
  j["accumulated_lower"] = cert.accumulated_lower;
  j["lower_bound"] = cert.lower_bound;
  j["upper_value"] = cert.upper_value;
  j["upper_bound"] = cert.upper_bound;
  j["stability_bound"] = cert.stability_bound;
  j["lower_holds"] = cert.lower_holds;
  j["upper_holds"] = cert.upper_holds;
  j["suggestions"] = cert.suggestions;
  return j;
}

nlohmann::json to_json(const CubeDecomposition& dec) {
  nlohmann::json cubes = nlohmann::json::array();
  for (const auto& c : dec.cubes) {
    nlohmann::json corner = nlohmann::json::array();
    for (std::size_t k = 0; k < dec.dim; ++k) corner.push_back(c.corner(k));
    cubes.push_back({{"corner", corner}, {"side", c.side()}, {"points", c.point_count}});
  }
  return {{"dim", dec.dim}, {"ell", dec.ell}, {"tested", dec.tested}, {"cubes", cubes}};
}

nlohmann::json to_json(const RateFit& fit) {
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
}

}  // namespace optsample
