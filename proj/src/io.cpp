#include "toric/io.hpp"

#include "toric/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace toric {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json polytope_value(const Polytope2& polytope) {
  json vertices = json::array();
  for (const Point2& v : polytope.vertices()) vertices.push_back({v.x(), v.y()});
  json edges = json::array();
  for (const Edge& e : polytope.edges()) {
    edges.push_back({{"start", e.start},
                     {"end", e.end},
                     {"direction", {e.direction.x(), e.direction.y()}},
                     {"inward_normal", {e.inward_normal.x(), e.inward_normal.y()}},
                     {"lattice_length", e.lattice_length}});
  }
  return {{"vertices", vertices},
          {"edges", edges},
          {"delzant", polytope.is_delzant()},
          {"measure", polytope.measure() == BoundaryMeasure::Lattice ? "lattice" : "euclidean"}};
}

json minimum_value(const ScanMinimum& m, int case_id) {
  if (!m.found) return nullptr;
  return {{"case", case_id},
          {"value", m.value},
          {"e", m.e},
          {"f", m.f},
          {"orientation", m.orientation == 0 ? "pos" : "neg"}};
}

json point_value(const Point2& p) { return json::array({p.x(), p.y()}); }

}  // namespace

Polytope2 parse_polytope_json(const std::string& text, BoundaryMeasure measure) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("invalid polytope JSON: ") + ex.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array()) {
    throw ValidationError("polytope JSON must be an object with a \"vertices\" array");
  }
  std::vector<Point2> points;
  for (const json& v : doc["vertices"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ValidationError("each vertex must be a pair of numbers");
    }
    points.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  return Polytope2::from_vertices(std::move(points), measure);
}

Polytope2 read_polytope_json(const std::string& path, BoundaryMeasure measure) {
  return parse_polytope_json(slurp(path), measure);
}

std::string polytope_json(const Polytope2& polytope) { return polytope_value(polytope).dump(2); }

std::vector<CsvRow> read_scan_csv(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string line;
  if (!std::getline(in, line) || line != "case,e,f,df_pos,df_neg,valid") {
    throw IoError("'" + path + "' does not start with the scan CSV header");
  }
  std::vector<CsvRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell[6];
    for (auto& c : cell) std::getline(fields, c, ',');
    try {
      CsvRow r;
      r.case_id = std::stoi(cell[0]);
      r.e = std::stod(cell[1]);
      r.f = std::stod(cell[2]);
      r.df_pos = std::stod(cell[3]);
      r.df_neg = std::stod(cell[4]);
      r.valid = std::stoi(cell[5]) != 0;
      rows.push_back(r);
    } catch (const std::exception&) {
      throw IoError("malformed row " + std::to_string(lineno) + " in '" + path + "'");
    }
  }
  return rows;
}

std::map<int, ScanMinimum> csv_minima(const std::vector<CsvRow>& rows) {
  std::map<int, std::vector<ScanNode>> by_case;
  for (const CsvRow& r : rows) {
    ScanNode node;
    node.e = r.e;
    node.f = r.f;
    node.df_pos = r.df_pos;
    node.df_neg = r.df_neg;
    node.valid = r.valid;
    by_case[r.case_id].push_back(node);
  }
  std::map<int, ScanMinimum> out;
  for (const auto& [id, nodes] : by_case) out[id] = table_minimum(nodes, false);
  return out;
}

std::string report_json(const Polytope2& polytope, const AffineFn2& f, double n, const StabilityReport& report) {
  json cases = json::array();
  for (const ScanTable& t : report.tables) {
    const CreaseCase& c = t.crease_case;
    int degenerate = 0;
    int invalid = 0;
    for (const ScanNode& node : t.nodes) {
      degenerate += node.valid && node.degenerate ? 1 : 0;
      invalid += node.valid ? 0 : 1;
    }
    json refined = json::array();
    for (const RefinedMinimum& r : report.refined) {
      if (r.case_id != c.id) continue;
      refined.push_back({{"orientation", r.orientation == 0 ? "pos" : "neg"},
                         {"e", r.e},
                         {"f", r.f},
                         {"df", r.df},
                         {"normalized_df", r.normalized},
                         {"evaluations", r.evaluations}});
    }
    cases.push_back({{"case", c.id},
                     {"u_edge", c.u_edge.edge},
                     {"v_edge", c.v_edge.edge},
                     {"u", {{"origin", point_value(c.u_edge.origin)}, {"step", point_value(c.u_edge.step)}}},
                     {"v", {{"origin", point_value(c.v_edge.origin)}, {"step", point_value(c.v_edge.step)}}},
                     {"e_range", {0.0, c.e_max()}},
                     {"f_range", {0.0, c.f_max()}},
                     {"grid", t.grid},
                     {"minimum", minimum_value(t.minimum, c.id)},
                     {"minimum_nondegenerate", minimum_value(t.minimum_nondegenerate, c.id)},
                     {"degenerate_nodes", degenerate},
                     {"invalid_nodes", invalid},
                     {"refined", refined}});
  }
  json doc = {{"polytope", polytope_value(polytope)},
              {"f", {f.a, f.b, f.c}},
              {"n", n},
              {"k", -2},
              {"verdict", to_string(report.verdict)},
              {"explanation", report.explanation},
              {"tolerance", {{"df", report.tol}, {"normalized_df", report.normalized_tol}, {"df_scale", report.df_scale}}},
              {"minimum", minimum_value(report.minimum, report.minimum_case)},
              {"witness", report.witness ? minimum_value(*report.witness, report.witness_case) : json(nullptr)},
              {"cases", cases}};
  return doc.dump(2) + "\n";
}

std::string critical_rays_json(const Polytope2& polytope, double n, const std::vector<CriticalRay>& rays) {
  json list = json::array();
  for (const CriticalRay& r : rays) {
    json item = {{"f", {r.f.a, r.f.b, r.f.c}},
                 {"eh", r.eh},
                 {"grad_norm", r.grad_norm},
                 {"futaki_residuals", {r.futaki_residuals(0), r.futaki_residuals(1), r.futaki_residuals(2)}},
                 {"futaki_scale", r.futaki_scale},
                 {"cd_gap", r.cd_gap},
                 {"tangent_eigenvalues", {r.tangent_eigenvalues(0), r.tangent_eigenvalues(1)}},
                 {"classification", to_string(r.classification)}};
    if (r.family) {
      item["family"] = {{"branch", to_string(r.family->branch)},
                        {"sign_flipped", r.family->sign_flipped},
                        {"angle", r.family->angle}};
    } else {
      item["family"] = nullptr;
    }
    list.push_back(item);
  }
  json doc = {{"polytope", polytope_value(polytope)}, {"n", n}, {"rays", list}};
  return doc.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace toric
