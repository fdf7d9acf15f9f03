#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "robust/asian.hpp"
#include "robust/btp.hpp"
#include "robust/measures.hpp"
#include "robust/mot.hpp"
#include "robust/structure.hpp"

namespace robust::io {

using Json = nlohmann::json;

/// Reads a whole file; ValidationError naming the path if it cannot be opened.
std::string read_file(const std::string& path);
Json parse_json(const std::string& text, const std::string& origin);
Json load_json(const std::string& path);

/// Number or "num/den" / decimal string. `field` names the location for errors.
template <class S>
S scalar_from_json(const Json& j, const std::string& field);

/// Rationals as "num/den" strings (integers without a denominator), doubles as numbers.
template <class S>
Json scalar_to_json(const S& v);

/// {"atoms": [{"x": .., "p": ..}, ...]}
template <class S>
DiscreteMeasure<S> measure_from_json(const Json& j, const std::string& field);

template <class S>
Json measure_to_json(const DiscreteMeasure<S>& m);

/// {"breakpoints": [..], "values": [..], "left_slope": .., "right_slope": ..},
/// or the shorthands {"kind": "call"|"put"|"abs", "strike"|"center": ..}.
template <class S>
PiecewiseLinear<S> piecewise_from_json(const Json& j, const std::string& field);

/// {"marginals": [measure | {"free": [grid]}, ...], "payoff": {...},
///  "direction": "max"|"min"|"both", "secondary": "on"|"off"}
template <class S>
struct ProblemFile {
  MotProblem<S> problem;
  std::vector<Direction> directions;
  bool secondary = false;
};

template <class S>
ProblemFile<S> problem_from_json(const Json& j);

/// "strike,price" rows.
template <class S>
CallCurve<S> call_curve_from_csv(const std::string& text, const std::string& origin);

/// "t,value" rows.
template <class S>
DiscretePath<S> path_from_csv(const std::string& text, const std::string& origin);

/// Array of 7-node records: either [x, x-, x+, y--, y-+, y+-, y++] or objects
/// with keys x, x_minus, x_plus, y_mm, y_mp, y_pm, y_pp.
template <class S>
std::vector<std::vector<S>> btp_nodes_from_json(const Json& j);

template <class S>
Json coupling_to_json(const Coupling<S>& c);

/// One row per support point: x_1, ..., x_n, mass.
template <class S>
std::string coupling_to_csv(const Coupling<S>& c);

/// Reads the format written by coupling_to_csv.
template <class S>
Coupling<S> coupling_from_csv(const std::string& text, const std::string& origin);

/// x, y, mass, branch
template <class S>
std::string structure_to_csv(const SupportStructure<S>& s);

template <class S>
Json bounds_to_json(const BoundsReport<S>& r, const MotProblem<S>& problem);

template <class S>
Json certificate_to_json(const DualCertificate<S>& c);

struct PlotBox {
  double x_min = -1, x_max = 1, y_min = -1, y_max = 1;
};

/// Box covering every support point and the diagonals' crossing, padded by 5%.
template <class S>
PlotBox plot_box(const SupportStructure<S>& s);

/// 640x640 SVG, 10 px margins: axes, dotted y = x and y = -x guides and one
/// colored point cloud per branch (marker area follows mass).
template <class S>
std::string emit_support_svg(const SupportStructure<S>& s, const PlotBox& box, const std::string& title = "");

void write_file(const std::string& path, const std::string& content);

}  // namespace robust::io
