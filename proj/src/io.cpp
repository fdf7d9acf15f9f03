#include "robust/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace robust::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

// Non-empty lines; the first must equal `header` (case-insensitive, spaces ignored)
// unless header is empty.
std::vector<std::vector<std::string>> csv_rows(const std::string& text, const std::string& origin,
                                               const std::vector<std::string>& header, std::size_t width) {
  std::stringstream ss(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool seen_header = header.empty();
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (!seen_header) {
      for (auto& c : cells) std::transform(c.begin(), c.end(), c.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (cells != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        throw ValidationError(origin + ": line " + std::to_string(lineno) + ": expected header \"" + want + "\"");
      }
      seen_header = true;
      continue;
    }
    if (width != 0 && cells.size() != width) {
      throw ValidationError(origin + ": line " + std::to_string(lineno) + ": expected " + std::to_string(width) +
                            " columns, got " + std::to_string(cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (!seen_header) throw ValidationError(origin + ": empty file (missing header)");
  return rows;
}

template <class S>
S parse_cell(const std::string& text, const std::string& where) {
  try {
    S v = ScalarTraits<S>::parse(text);
    if (!ScalarTraits<S>::is_finite(v)) throw ValidationError("non-finite value");
    return v;
  } catch (const std::exception& e) {
    throw ValidationError(where + ": cannot parse \"" + text + "\" (" + e.what() + ")");
  }
}

const Json& member(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(field + "." + key + ": missing");
  return *it;
}

const Json& array_member(const Json& j, const char* key, const std::string& field) {
  const Json& a = member(j, key, field);
  if (!a.is_array()) throw ValidationError(field + "." + key + ": expected an array");
  return a;
}

std::string string_member(const Json& j, const char* key, const std::string& field, const std::string& fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) throw ValidationError(field + "." + key + ": expected a string");
  return it->get<std::string>();
}

template <class S>
std::vector<S> scalar_array(const Json& a, const std::string& field) {
  if (!a.is_array()) throw ValidationError(field + ": expected an array");
  std::vector<S> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(scalar_from_json<S>(a[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* branch_color(Branch b) {
  switch (b) {
    case Branch::Upper: return "#d62728";
    case Branch::Lower: return "#1f77b4";
    case Branch::Diagonal: return "#2ca02c";
    case Branch::Residual: return "#7f7f7f";
  }
  return "#000000";
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(origin + ": malformed JSON (" + e.what() + ")");
  }
}

Json load_json(const std::string& path) { return parse_json(read_file(path), path); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot write file");
  out << content;
}

template <class S>
S scalar_from_json(const Json& j, const std::string& field) {
  if (j.is_number_integer()) return S(j.get<long long>());
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (!std::isfinite(d)) throw ValidationError(field + ": non-finite number");
    return ScalarTraits<S>::from_double(d);
  }
  if (j.is_string()) return parse_cell<S>(j.get<std::string>(), field);
  throw ValidationError(field + ": expected a number or a \"num/den\" string");
}

template <class S>
Json scalar_to_json(const S& v) {
  if constexpr (ScalarTraits<S>::exact) {
    return ScalarTraits<S>::format(v);
  } else {
    return v;
  }
}

template <class S>
DiscreteMeasure<S> measure_from_json(const Json& j, const std::string& field) {
  const Json& atoms = array_member(j, "atoms", field);
  std::vector<S> xs, ps;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string f = field + ".atoms[" + std::to_string(i) + "]";
    xs.push_back(scalar_from_json<S>(member(atoms[i], "x", f), f + ".x"));
    ps.push_back(scalar_from_json<S>(member(atoms[i], "p", f), f + ".p"));
  }
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<S> sx, sp;
  for (auto i : order) {
    if (!sx.empty() && xs[i] == sx.back()) throw ValidationError(field + ".atoms: duplicate atom " + ScalarTraits<S>::format(xs[i]));
    sx.push_back(xs[i]);
    sp.push_back(ps[i]);
  }
  try {
    return DiscreteMeasure<S>(std::move(sx), std::move(sp));
  } catch (const ValidationError& e) {
    throw ValidationError(field + ": " + e.what());
  }
}

template <class S>
Json measure_to_json(const DiscreteMeasure<S>& m) {
  Json atoms = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) atoms.push_back({{"x", scalar_to_json(m.atom(i))}, {"p", scalar_to_json(m.weight(i))}});
  return {{"atoms", atoms}};
}

template <class S>
PiecewiseLinear<S> piecewise_from_json(const Json& j, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field + ": expected an object");
  const std::string kind = string_member(j, "kind", field, "piecewise");
  try {
    if (kind == "call") return PiecewiseLinear<S>::call(scalar_from_json<S>(member(j, "strike", field), field + ".strike"));
    if (kind == "put") return PiecewiseLinear<S>::put(scalar_from_json<S>(member(j, "strike", field), field + ".strike"));
    if (kind == "abs") {
      return PiecewiseLinear<S>::abs(j.contains("center") ? scalar_from_json<S>(j["center"], field + ".center") : S(0));
    }
    if (kind != "piecewise") throw ValidationError(field + ".kind: unknown function kind \"" + kind + "\"");
    return PiecewiseLinear<S>(scalar_array<S>(member(j, "breakpoints", field), field + ".breakpoints"),
                              scalar_array<S>(member(j, "values", field), field + ".values"),
                              scalar_from_json<S>(member(j, "left_slope", field), field + ".left_slope"),
                              scalar_from_json<S>(member(j, "right_slope", field), field + ".right_slope"));
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind(field, 0) == 0) throw;
    throw ValidationError(field + ": " + what);
  }
}

template <class S>
ProblemFile<S> problem_from_json(const Json& j) {
  ProblemFile<S> out;
  const Json& ms = array_member(j, "marginals", "problem");
  if (ms.size() < 2) throw ValidationError("problem.marginals: need at least two periods");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string f = "problem.marginals[" + std::to_string(i) + "]";
    if (ms[i].is_object() && ms[i].contains("free")) {
      auto grid = scalar_array<S>(ms[i]["free"], f + ".free");
      std::sort(grid.begin(), grid.end());
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
      if (grid.empty()) throw ValidationError(f + ".free: empty grid");
      out.problem.periods.push_back(Period<S>::free(std::move(grid)));
    } else {
      out.problem.periods.push_back(Period<S>::constrained(measure_from_json<S>(ms[i], f)));
    }
  }

  const Json& p = member(j, "payoff", "problem");
  const std::string kind = string_member(p, "kind", "problem.payoff", "");
  const std::string pf = "problem.payoff";
  if (kind == "abs_sum") {
    out.problem.cost = CostSpec<S>::abs_sum();
  } else if (kind == "call_on_sum") {
    out.problem.cost = CostSpec<S>::call_on_sum(scalar_from_json<S>(member(p, "strike", pf), pf + ".strike"));
  } else if (kind == "straddle") {
    out.problem.cost = CostSpec<S>::straddle();
  } else if (kind == "convex_of_weighted_avg") {
    auto w = scalar_array<S>(member(p, "weights", pf), pf + ".weights");
    if (w.size() != ms.size()) throw ValidationError(pf + ".weights: need one weight per marginal");
    auto f = piecewise_from_json<S>(member(p, "phi", pf), pf + ".phi");
    if (!f.is_convex()) throw ValidationError(pf + ".phi: payoff function is not convex");
    out.problem.cost = CostSpec<S>::convex_of_weighted_avg(std::move(w), std::move(f));
  } else if (kind == "custom_table") {
    out.problem.cost = CostSpec<S>::custom_table(scalar_array<S>(member(p, "values", pf), pf + ".values"));
  } else if (kind.empty()) {
    throw ValidationError(pf + ".kind: missing");
  } else {
    throw ValidationError(pf + ".kind: unknown payoff kind \"" + kind + "\"");
  }

  const std::string dir = string_member(j, "direction", "problem", "both");
  if (dir == "max") {
    out.directions = {Direction::Max};
  } else if (dir == "min") {
    out.directions = {Direction::Min};
  } else if (dir == "both") {
    out.directions = {Direction::Min, Direction::Max};
  } else {
    throw ValidationError("problem.direction: expected \"max\", \"min\" or \"both\", got \"" + dir + "\"");
  }
  const std::string sec = string_member(j, "secondary", "problem", "off");
  if (sec != "on" && sec != "off") throw ValidationError("problem.secondary: expected \"on\" or \"off\"");
  out.secondary = sec == "on";
  try {
    out.problem.cost.validate(out.problem.dims(), out.problem.cells());
  } catch (const ValidationError& e) {
    throw ValidationError(pf + ": " + e.what());
  }
  return out;
}

template <class S>
CallCurve<S> call_curve_from_csv(const std::string& text, const std::string& origin) {
  CallCurve<S> c;
  std::size_t i = 0;
  for (const auto& r : csv_rows(text, origin, {"strike", "price"}, 2)) {
    ++i;
    c.strikes.push_back(parse_cell<S>(r[0], origin + ": row " + std::to_string(i) + " strike"));
    c.prices.push_back(parse_cell<S>(r[1], origin + ": row " + std::to_string(i) + " price"));
    if (c.strikes.size() > 1 && !(c.strikes[c.strikes.size() - 2] < c.strikes.back())) {
      throw ValidationError(origin + ": row " + std::to_string(i) + " strike: strikes must be strictly increasing");
    }
  }
  if (c.strikes.empty()) throw ValidationError(origin + ": no rows");
  return c;
}

template <class S>
DiscretePath<S> path_from_csv(const std::string& text, const std::string& origin) {
  DiscretePath<S> p;
  std::size_t i = 0;
  for (const auto& r : csv_rows(text, origin, {"t", "value"}, 2)) {
    ++i;
    p.times.push_back(parse_cell<S>(r[0], origin + ": row " + std::to_string(i) + " t"));
    p.values.push_back(parse_cell<S>(r[1], origin + ": row " + std::to_string(i) + " value"));
  }
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  return p;
}

template <class S>
std::vector<std::vector<S>> btp_nodes_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("btps: expected a JSON array of 7-node records");
  static const char* keys[] = {"x", "x_minus", "x_plus", "y_mm", "y_mp", "y_pm", "y_pp"};
  std::vector<std::vector<S>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = "btps[" + std::to_string(i) + "]";
    std::vector<S> n;
    if (j[i].is_array()) {
      if (j[i].size() != 7) throw ValidationError(f + ": expected 7 nodes, got " + std::to_string(j[i].size()));
      n = scalar_array<S>(j[i], f);
    } else if (j[i].is_object()) {
      for (const char* k : keys) n.push_back(scalar_from_json<S>(member(j[i], k, f), f + "." + k));
    } else {
      throw ValidationError(f + ": expected an array or an object");
    }
    out.push_back(std::move(n));
  }
  return out;
}

template <class S>
Json coupling_to_json(const Coupling<S>& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) {
    Json x = Json::array();
    for (const auto& v : p.x) x.push_back(scalar_to_json(v));
    pts.push_back({{"x", x}, {"mass", scalar_to_json(p.mass)}});
  }
  return {{"dims", c.dims}, {"points", pts}};
}

template <class S>
std::string coupling_to_csv(const Coupling<S>& c) {
  std::ostringstream os;
  for (std::size_t k = 0; k < c.dims; ++k) os << "x" << (k + 1) << ",";
  os << "mass\n";
  for (const auto& p : c.points) {
    for (const auto& v : p.x) os << ScalarTraits<S>::format(v) << ",";
    os << ScalarTraits<S>::format(p.mass) << "\n";
  }
  return os.str();
}

template <class S>
Coupling<S> coupling_from_csv(const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line) && trim(line).empty()) {
  }
  auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "mass") {
    throw ValidationError(origin + ": expected header \"x1,...,xn,mass\"");
  }
  for (std::size_t k = 0; k + 1 < header.size(); ++k) {
    if (header[k] != "x" + std::to_string(k + 1)) {
      throw ValidationError(origin + ": header column " + std::to_string(k + 1) + " should be x" + std::to_string(k + 1));
    }
  }
  Coupling<S> c{header.size() - 1, {}};
  std::size_t i = 0;
  for (const auto& r : csv_rows(text, origin, {}, header.size())) {
    if (i++ == 0) continue;  // header
    typename Coupling<S>::Point p;
    const std::string where = origin + ": row " + std::to_string(i - 1);
    for (std::size_t k = 0; k + 1 < r.size(); ++k) p.x.push_back(parse_cell<S>(r[k], where + " x" + std::to_string(k + 1)));
    p.mass = parse_cell<S>(r.back(), where + " mass");
    if (p.mass < S(0)) throw ValidationError(where + " mass: negative");
    c.points.push_back(std::move(p));
  }
  return c;
}

template <class S>
std::string structure_to_csv(const SupportStructure<S>& s) {
  std::ostringstream os;
  os << "x,y,mass,branch\n";
  for (const auto& p : s.points) {
    os << ScalarTraits<S>::format(p.x) << "," << ScalarTraits<S>::format(p.y) << "," << ScalarTraits<S>::format(p.mass)
       << "," << to_string(p.branch) << "\n";
  }
  return os.str();
}

template <class S>
Json certificate_to_json(const DualCertificate<S>& c) {
  Json phi = Json::array();
  for (const auto& v : c.phi) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(scalar_to_json(x));
    phi.push_back(a);
  }
  Json h = Json::array();
  for (const auto& v : c.h) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(scalar_to_json(x));
    h.push_back(a);
  }
  return {{"kind", c.kind == HedgeKind::Super ? "super" : "sub"},
          {"price", scalar_to_json(c.price)},
          {"cash", scalar_to_json(c.cash)},
          {"static_payoffs", phi},
          {"trading", h},
          {"max_violation", c.max_violation},
          {"duality_gap", c.duality_gap}};
}

template <class S>
Json bounds_to_json(const BoundsReport<S>& r, const MotProblem<S>& problem) {
  auto side = [&](const MotResult<S>& m, const DualCertificate<S>& cert, const S& gap) {
    Json j{{"value", scalar_to_json(m.value)},
           {"coupling", coupling_to_json(m.coupling)},
           {"certificate", certificate_to_json(cert)},
           {"duality_gap", scalar_to_json(gap)}};
    const auto res = coupling_residuals(m.coupling, problem);
    j["residuals"] = {{"mass", res.mass}, {"marginal", res.marginal}, {"martingale", res.martingale}};
    if (m.secondary_value) j["secondary_value"] = scalar_to_json(*m.secondary_value);
    return j;
  };
  return {{"mode", ScalarTraits<S>::name},
          {"lower", scalar_to_json(r.lower)},
          {"upper", scalar_to_json(r.upper)},
          {"minimizer", side(r.minimizer, r.sub_certificate, r.gap_lower)},
          {"maximizer", side(r.maximizer, r.super_certificate, r.gap_upper)}};
}

template <class S>
PlotBox plot_box(const SupportStructure<S>& s) {
  if (s.points.empty()) return {};
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  for (const auto& p : s.points) {
    x0 = std::min(x0, to_double(p.x));
    x1 = std::max(x1, to_double(p.x));
    y0 = std::min(y0, to_double(p.y));
    y1 = std::max(y1, to_double(p.y));
  }
  const double px = std::max(x1 - x0, 1e-9) * 0.05, py = std::max(y1 - y0, 1e-9) * 0.05;
  return {x0 - px, x1 + px, y0 - py, y1 + py};
}

template <class S>
std::string emit_support_svg(const SupportStructure<S>& s, const PlotBox& box, const std::string& title) {
  constexpr double size = 640, margin = 10, inner = size - 2 * margin;
  const double wx = box.x_max - box.x_min, wy = box.y_max - box.y_min;
  auto sx = [&](double x) { return margin + (x - box.x_min) / wx * inner; };
  auto sy = [&](double y) { return size - margin - (y - box.y_min) / wy * inner; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
  if (!title.empty()) os << "<title>" << title << "</title>\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"10\" y=\"10\" width=\"620\" height=\"620\"/></clipPath></defs>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"640\" fill=\"white\"/>\n";
  os << "<rect x=\"10\" y=\"10\" width=\"620\" height=\"620\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  os << "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"0.75\">\n";
  if (box.y_min <= 0 && 0 <= box.y_max) {
    os << "<line x1=\"" << fixed(margin) << "\" y1=\"" << fixed(sy(0)) << "\" x2=\"" << fixed(size - margin) << "\" y2=\""
       << fixed(sy(0)) << "\"/>\n";
  }
  if (box.x_min <= 0 && 0 <= box.x_max) {
    os << "<line x1=\"" << fixed(sx(0)) << "\" y1=\"" << fixed(margin) << "\" x2=\"" << fixed(sx(0)) << "\" y2=\""
       << fixed(size - margin) << "\"/>\n";
  }
  os << "</g>\n";
  const double lo = std::min(box.x_min, std::min(box.y_min, -box.y_max));
  const double hi = std::max(box.x_max, std::max(box.y_max, -box.y_min));
  os << "<g id=\"guides\" clip-path=\"url(#plot)\" stroke=\"#555555\" stroke-width=\"0.75\" stroke-dasharray=\"2,3\">\n";
  os << "<line x1=\"" << fixed(sx(lo)) << "\" y1=\"" << fixed(sy(lo)) << "\" x2=\"" << fixed(sx(hi)) << "\" y2=\""
     << fixed(sy(hi)) << "\"/>\n";
  os << "<line x1=\"" << fixed(sx(lo)) << "\" y1=\"" << fixed(sy(-lo)) << "\" x2=\"" << fixed(sx(hi)) << "\" y2=\""
     << fixed(sy(-hi)) << "\"/>\n";
  os << "</g>\n";
  double max_mass = 0;
  for (const auto& p : s.points) max_mass = std::max(max_mass, to_double(p.mass));
  for (Branch b : {Branch::Upper, Branch::Lower, Branch::Diagonal, Branch::Residual}) {
    bool any = false;
    for (const auto& p : s.points) any = any || p.branch == b;
    if (!any) continue;
    os << "<g id=\"branch-" << to_string(b) << "\" fill=\"" << branch_color(b) << "\" clip-path=\"url(#plot)\">\n";
    for (const auto& p : s.points) {
      if (p.branch != b) continue;
      const double r = 1.0 + 2.5 * std::sqrt(to_double(p.mass) / max_mass);
      os << "<circle cx=\"" << fixed(sx(to_double(p.x))) << "\" cy=\"" << fixed(sy(to_double(p.y))) << "\" r=\""
         << fixed(r) << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

#define ROBUST_IO_INSTANTIATE(S)                                                                  \
  template S scalar_from_json(const Json&, const std::string&);                                   \
  template Json scalar_to_json(const S&);                                                         \
  template DiscreteMeasure<S> measure_from_json(const Json&, const std::string&);                 \
  template Json measure_to_json(const DiscreteMeasure<S>&);                                       \
  template PiecewiseLinear<S> piecewise_from_json(const Json&, const std::string&);               \
  template ProblemFile<S> problem_from_json(const Json&);                                         \
  template CallCurve<S> call_curve_from_csv(const std::string&, const std::string&);              \
  template DiscretePath<S> path_from_csv(const std::string&, const std::string&);                 \
  template std::vector<std::vector<S>> btp_nodes_from_json(const Json&);                          \
  template Json coupling_to_json(const Coupling<S>&);                                             \
  template std::string coupling_to_csv(const Coupling<S>&);                                       \
  template Coupling<S> coupling_from_csv(const std::string&, const std::string&);                 \
  template std::string structure_to_csv(const SupportStructure<S>&);                              \
  template Json bounds_to_json(const BoundsReport<S>&, const MotProblem<S>&);                     \
  template Json certificate_to_json(const DualCertificate<S>&);                                   \
  template PlotBox plot_box(const SupportStructure<S>&);                                          \
  template std::string emit_support_svg(const SupportStructure<S>&, const PlotBox&, const std::string&);

ROBUST_IO_INSTANTIATE(double)
ROBUST_IO_INSTANTIATE(Rational)

}  // namespace robust::io
