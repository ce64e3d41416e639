#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlbellman/config.hpp"
#include "nlbellman/controls.hpp"
#include "nlbellman/diagnostics.hpp"
#include "nlbellman/problem.hpp"
#include "nlbellman/quadrature.hpp"
#include "nlbellman/solver.hpp"

namespace nlb {

using Json = nlohmann::ordered_json;

/// Strict object reader: typed lookups with defaults, unknown keys rejected by
/// finish(). Errors name the field as "where.key".
class JsonReader {
public:
    JsonReader(const Json& j, std::string where);

    /// Marks the key as seen; true when present and not null.
    bool has(const std::string& key);
    const Json& at(const std::string& key);
    double num(const std::string& key);
    double num(const std::string& key, double def);
    int integer(const std::string& key, int def);
    bool flag(const std::string& key, bool def);
    std::string str(const std::string& key);
    std::string str(const std::string& key, const std::string& def);
    std::vector<double> numbers(const std::string& key);
    std::vector<double> numbers(const std::string& key, std::vector<double> def);
    std::vector<Point> points(const std::string& key, int dim);
    Point point(const std::string& key, int dim);
    Mat matrix(const std::string& key);
    std::string field(const std::string& key) const;
    void finish() const;

    static double as_num(const Json& v, const std::string& where);

private:
    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

/// Reading throws InvalidArgument naming the offending field.
Json to_json(const OperatorConfig& config);
OperatorConfig operator_config_from_json(const Json& j);

Json to_json(const QuadratureScheme& scheme);
QuadratureScheme scheme_from_json(const Json& j);

Json to_json(const ControlSetSpec& spec);
ControlSetSpec control_spec_from_json(const Json& j);
/// Members as an array of row-major matrices.
Json to_json(const ControlSet& set);
std::vector<ControlMatrix> control_members_from_json(const Json& j);

Json to_json(const AnalyticFunction& f);
AnalyticFunction analytic_from_json(const Json& j, int dim);

Json to_json(const ExteriorRule& rule);
ExteriorRule exterior_from_json(const Json& j, int dim);

Json to_json(const Nonlinearity& f);
Nonlinearity nonlinearity_from_json(const Json& j);

Json to_json(const Geometry& g);
Geometry geometry_from_json(const Json& j);

Json to_json(const ProblemSpec& p);
ProblemSpec problem_from_json(const Json& j);

Json to_json(const Point& p, int dim);
Point point_from_json(const Json& j, int dim);

Json to_json(const Evaluation& e);
Json to_json(const SolveReport& r);
Json to_json(const PlaneSweepReport& r, int dim);
Json to_json(const SlideReport& r, int dim);
Json to_json(const SlideTruncation& t, int dim);
Json to_json(const RadialReport& r);
Json to_json(const SchrodingerRecord& r, int dim);
Json to_json(const DecayProbe& p, int dim);
Json to_json(const AsymptoticReport& r);
Json to_json(const MaLimitTable& t, int dim);
Json to_json(const DecayFit& f);
Json to_json(const HypothesisReport& r);

/// CSV writer with a header row; fields are written with 17 significant digits.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);
    CsvWriter& row(const std::vector<double>& values);
    CsvWriter& row(const std::vector<std::string>& values);

private:
    std::ostream* os_;
    std::size_t columns_;
};

std::string format_double(double v);

}  // namespace nlb
