#include "pkam/io.hpp"

#include "pkam/errors.hpp"

#include <json.hpp>
#include <toml.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace pkam {

using nlohmann::json;

namespace {

bool lex_nonnegative(const std::vector<int>& k) {
  for (int v : k) {
    if (v != 0) return v > 0;
  }
  return true;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Exact match; -0.0 is kept distinct so round trips stay bit-exact.
bool is_plus_zero(double v) { return v == 0.0 && !std::signbit(v); }

}  // namespace

// ------------------------------------------------------------------ torus

std::string torus_to_json(const TorusEmbedding& K) {
  const FourierSeries& u = K.periodic();
  json doc;
  doc["d"] = K.d();
  doc["n"] = K.n();
  doc["truncation"] = u.radius();
  doc["rho"] = K.rho();
  if (K.winding() == angle_identity_winding(K.d(), K.n())) {
    doc["winding_convention"] = "angle-identity";
  } else {
    doc["winding_convention"] = "custom";
    json rows = json::array();
    for (int r = 0; r < K.winding().rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < K.winding().cols(); ++c) row.push_back(K.winding()(r, c));
      rows.push_back(row);
    }
    doc["winding"] = rows;
  }
  json coeffs = json::array();
  for (std::size_t idx = 0; idx < u.mode_count(); ++idx) {
    const auto k = u.mode(idx);
    if (!lex_nonnegative(k)) continue;
    std::vector<double> re, im;
    bool all_zero = true;
    for (int c = 0; c < u.components(); ++c) {
      const Complex z = u.coeff(c, idx);
      re.push_back(z.real());
      // the average is real; drop a signed zero so the text round-trips
      im.push_back(idx == u.zero_index() ? 0.0 : z.imag());
      all_zero = all_zero && is_plus_zero(z.real()) && is_plus_zero(z.imag());
    }
    if (all_zero && idx != u.zero_index()) continue;
    coeffs.push_back({{"k", k}, {"re", re}, {"im", im}});
  }
  doc["coeffs"] = coeffs;
  return doc.dump(1);
}

TorusEmbedding torus_from_json(const std::string& text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("<document>", e.what());
  }
  if (!doc.is_object()) throw SchemaError("<document>", "expected an object");
  auto require = [&](const char* key) -> const json& {
    if (!doc.contains(key)) throw SchemaError(key, "missing");
    return doc.at(key);
  };
  const json& jd = require("d");
  const json& jn = require("n");
  if (!jd.is_number_integer() || !jn.is_number_integer()) {
    throw SchemaError(jd.is_number_integer() ? "n" : "d", "expected an integer");
  }
  const int d = jd.get<int>();
  const int n = jn.get<int>();
  if (d < 1 || n < 0) throw SchemaError("d", "need d >= 1 and n >= 0");
  const int q = d + n;
  const int dim = 2 * d + n;

  const json& jt = require("truncation");
  if (!jt.is_array() || static_cast<int>(jt.size()) != q) {
    throw DimensionMismatch("truncation must list d+n = " + std::to_string(q) + " radii");
  }
  std::vector<int> radius;
  for (const auto& v : jt) {
    if (!v.is_number_integer() || v.get<int>() < 0) {
      throw SchemaError("truncation", "radii must be nonnegative integers");
    }
    radius.push_back(v.get<int>());
  }

  double rho = 0.0;
  if (doc.contains("rho")) {
    if (!doc["rho"].is_number()) throw SchemaError("rho", "expected a number");
    rho = doc["rho"].get<double>();
  } else {
    const std::string msg = "torus file has no \"rho\"; defaulting to 0";
    if (warnings != nullptr) {
      warnings->push_back(msg);
    } else {
      std::cerr << "warning: " << msg << "\n";
    }
  }

  Mat winding = angle_identity_winding(d, n);
  if (doc.contains("winding_convention")) {
    const auto conv = doc["winding_convention"].get<std::string>();
    if (conv == "custom") {
      if (!doc.contains("winding")) throw SchemaError("winding", "custom winding needs a matrix");
      const json& w = doc["winding"];
      if (!w.is_array() || static_cast<int>(w.size()) != dim) {
        throw DimensionMismatch("winding must have 2d+n rows");
      }
      for (int r = 0; r < dim; ++r) {
        if (!w[r].is_array() || static_cast<int>(w[r].size()) != q) {
          throw DimensionMismatch("winding rows must have d+n entries");
        }
        for (int c = 0; c < q; ++c) winding(r, c) = w[r][c].get<double>();
      }
    } else if (conv != "angle-identity") {
      throw SchemaError("winding_convention", "unknown convention '" + conv + "'");
    }
  }

  FourierSeries u(dim, 1, radius);
  std::vector<char> seen(u.mode_count(), 0);
  const json& jc = require("coeffs");
  if (!jc.is_array()) throw SchemaError("coeffs", "expected an array");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const std::string where = "coeffs[" + std::to_string(i) + "]";
    const json& e = jc[i];
    if (!e.is_object() || !e.contains("k") || !e.contains("re") || !e.contains("im")) {
      throw SchemaError(where, "entries need k, re and im");
    }
    if (!e["k"].is_array() || static_cast<int>(e["k"].size()) != q) {
      throw DimensionMismatch(where + ".k must have d+n entries");
    }
    std::vector<int> k;
    for (const auto& v : e["k"]) {
      if (!v.is_number_integer()) throw SchemaError(where + ".k", "expected integers");
      k.push_back(v.get<int>());
    }
    if (!u.in_band(k)) throw SchemaError(where + ".k", "mode outside the truncation");
    const json& re = e["re"];
    const json& im = e["im"];
    if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != dim ||
        static_cast<int>(im.size()) != dim) {
      throw DimensionMismatch(where + " must carry 2d+n real and imaginary parts");
    }
    std::vector<int> neg(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) neg[a] = -k[a];
    const std::size_t idx = u.mode_index(k);
    const std::size_t nidx = u.mode_index(neg);
    const bool zero = idx == nidx;
    for (int c = 0; c < dim; ++c) {
      const Complex z(re[c].get<double>(), im[c].get<double>());
      if (zero && z.imag() != 0.0) {
        throw SchemaError(where + ".im", "the k = 0 coefficient must be real");
      }
      if (seen[idx] && u.coeff(c, idx) != z) {
        throw SchemaError(where, "Hermitian symmetry violated: conflicts with the entry for -k");
      }
    }
    if (seen[idx] && !zero) continue;
    if (seen[idx] && zero) throw SchemaError(where, "duplicate k = 0 entry");
    for (int c = 0; c < dim; ++c) {
      const Complex z(re[c].get<double>(), im[c].get<double>());
      u.coeff(c, idx) = z;
      u.coeff(c, nidx) = std::conj(z);
    }
    seen[idx] = 1;
    seen[nidx] = 1;
  }
  TorusEmbedding K(d, n, std::move(u), rho);
  K.set_winding(winding);
  return K;
}

void save_torus(const std::string& path, const TorusEmbedding& K) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << torus_to_json(K) << "\n";
  if (!out) throw ConfigError("write failed for " + path);
}

TorusEmbedding load_torus(const std::string& path, std::vector<std::string>* warnings) {
  return torus_from_json(read_file(path), warnings);
}

// --------------------------------------------------------------- families

std::vector<std::string> builtin_families() { return {"coupled_standard"}; }

MapFamily make_family(const FamilySpec& spec) {
  if (spec.name == "coupled_standard") {
    return coupled_standard_family(spec.strength, spec.coupling, spec.drift, spec.y_bound);
  }
  if (spec.name == "coupled_standard_fd") {
    const MapFamily exact =
        coupled_standard_family(spec.strength, spec.coupling, spec.drift, spec.y_bound);
    MapFamily fd = finite_difference_family("coupled_standard_fd", 1, 1, 3, exact.map);
    fd.exact_at_zero = true;
    fd.y_bound = spec.y_bound;
    return fd;
  }
  throw ConfigError("unknown family '" + spec.name + "'");
}

PresymplecticStructure make_structure(const StructureSpec& spec, int d, int n) {
  if (spec.standard_J && spec.standard_primitive) return PresymplecticStructure::standard(d, n);
  Mat J = spec.J;
  if (spec.standard_J) {
    J = Mat::Zero(2 * d, 2 * d);
    J.block(0, d, d, d) = -Mat::Identity(d, d);
    J.block(d, 0, d, d) = Mat::Identity(d, d);
  }
  Mat P = spec.P;
  if (spec.standard_primitive) {
    P = Mat::Zero(2 * d + n, 2 * d + n);
    for (int i = 0; i < d; ++i) P(i, d + i) = 1.0;
  }
  return PresymplecticStructure::constant(d, n, J, P);
}

// ----------------------------------------------------------------- config

namespace {

class TomlReader {
 public:
  explicit TomlReader(const toml::table& root) : root_(root) {}

  const toml::node* get(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    const toml::node* sec = root_.get(section);
    if (sec == nullptr) return nullptr;
    const toml::table* t = sec->as_table();
    if (t == nullptr) throw ConfigError("[" + section + "] must be a table");
    return t->get(key);
  }

  double number(const std::string& s, const std::string& k, double fallback) {
    const toml::node* node = get(s, k);
    if (node == nullptr) return fallback;
    if (auto v = node->value<double>()) return *v;
    throw ConfigError(s + "." + k + " must be a number");
  }

  int integer(const std::string& s, const std::string& k, int fallback) {
    const toml::node* node = get(s, k);
    if (node == nullptr) return fallback;
    if (auto v = node->value<int64_t>()) return static_cast<int>(*v);
    throw ConfigError(s + "." + k + " must be an integer");
  }

  bool boolean(const std::string& s, const std::string& k, bool fallback) {
    const toml::node* node = get(s, k);
    if (node == nullptr) return fallback;
    if (auto v = node->value<bool>()) return *v;
    throw ConfigError(s + "." + k + " must be true or false");
  }

  std::string string(const std::string& s, const std::string& k, const std::string& fallback) {
    const toml::node* node = get(s, k);
    if (node == nullptr) return fallback;
    if (auto v = node->value<std::string>()) return *v;
    throw ConfigError(s + "." + k + " must be a string");
  }

  bool has(const std::string& s, const std::string& k) { return get(s, k) != nullptr; }

  std::vector<double> numbers(const std::string& s, const std::string& k) {
    const toml::node* node = get(s, k);
    std::vector<double> out;
    if (node == nullptr) return out;
    const toml::array* arr = node->as_array();
    if (arr == nullptr) throw ConfigError(s + "." + k + " must be an array of numbers");
    for (const auto& el : *arr) {
      auto v = el.value<double>();
      if (!v) throw ConfigError(s + "." + k + " must be an array of numbers");
      out.push_back(*v);
    }
    return out;
  }

  std::vector<bool> booleans(const std::string& s, const std::string& k) {
    const toml::node* node = get(s, k);
    std::vector<bool> out;
    if (node == nullptr) return out;
    const toml::array* arr = node->as_array();
    if (arr == nullptr) throw ConfigError(s + "." + k + " must be an array of booleans");
    for (const auto& el : *arr) {
      auto v = el.value<bool>();
      if (!v) throw ConfigError(s + "." + k + " must be an array of booleans");
      out.push_back(*v);
    }
    return out;
  }

  Mat matrix(const std::string& s, const std::string& k, int rows, int cols) {
    const toml::node* node = get(s, k);
    const toml::array* arr = node != nullptr ? node->as_array() : nullptr;
    if (arr == nullptr || static_cast<int>(arr->size()) != rows) {
      throw ConfigError(s + "." + k + " must be a " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " matrix");
    }
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      const toml::array* row = (*arr)[static_cast<std::size_t>(r)].as_array();
      if (row == nullptr || static_cast<int>(row->size()) != cols) {
        throw ConfigError(s + "." + k + " row " + std::to_string(r) + " has the wrong length");
      }
      for (int c = 0; c < cols; ++c) {
        auto v = (*row)[static_cast<std::size_t>(c)].value<double>();
        if (!v) throw ConfigError(s + "." + k + " entries must be numbers");
        m(r, c) = *v;
      }
    }
    return m;
  }

  /// Rejects keys nobody asked for (typos).
  void check_unused() const {
    for (const auto& [section, node] : root_) {
      const toml::table* t = node.as_table();
      const std::string sname(section.str());
      if (t == nullptr) throw ConfigError("top-level key '" + sname + "' must be a table");
      for (const auto& [key, value] : *t) {
        const std::string full = sname + "." + std::string(key.str());
        if (used_.count(full) == 0) throw ConfigError("unknown config key '" + full + "'");
      }
    }
  }

 private:
  const toml::table& root_;
  std::set<std::string> used_;
};

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

std::string vec_toml(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + "]";
}

std::string mat_toml(const Mat& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) s += (r ? ", " : "") + vec_toml(m.row(r).transpose());
  return s + "]";
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string("TOML parse error: ") + std::string(e.description()));
  }
  TomlReader r(root);
  RunConfig c;

  // frequency first: it fixes d + n.
  const auto omega = r.numbers("frequency", "omega");
  if (omega.empty()) throw ConfigError("frequency.omega is required");
  c.omega = to_vec(omega);

  c.family.name = r.string("family", "name", "coupled_standard");
  c.family.strength = r.number("family", "strength", 0.0);
  c.family.coupling = r.number("family", "coupling", 0.0);
  c.d = 1;
  c.n = 1;
  if (c.omega.size() != c.d + c.n) {
    throw ConfigError("family '" + c.family.name + "' needs a frequency of dimension " +
                      std::to_string(c.d + c.n));
  }
  c.family.drift = r.number("family", "drift", c.omega(c.d));
  c.family.y_bound = r.number("family", "y_bound", 50.0);
  const int m = 2 * c.d + c.n;
  const auto l0 = r.numbers("family", "lambda0");
  c.family.lambda0 = l0.empty() ? Vec(Vec::Zero(m)) : to_vec(l0);
  const auto lref = r.numbers("family", "reference_lambda");
  c.family.lambda_ref = lref.empty() ? Vec(Vec::Zero(m)) : to_vec(lref);
  if (c.family.lambda0.size() != m || c.family.lambda_ref.size() != m) {
    throw ConfigError("family parameter vectors must have " + std::to_string(m) + " entries");
  }
  make_family(c.family);  // validates the name

  const int q = c.d + c.n;
  c.sigma = r.number("frequency", "sigma", static_cast<double>(q));
  if (c.sigma < q) {
    throw ConfigError("frequency.sigma = " + fmt(c.sigma) +
                      " violates Diophantine admissibility: sigma must be >= d+n = " +
                      std::to_string(q));
  }

  const auto trunc = r.numbers("torus", "truncation");
  if (trunc.empty()) {
    c.truncation.assign(static_cast<std::size_t>(q), 32);
  } else {
    if (static_cast<int>(trunc.size()) != q) {
      throw ConfigError("torus.truncation must list d+n radii");
    }
    for (double v : trunc) {
      if (v < 0 || v != std::floor(v)) throw ConfigError("torus.truncation must be integers");
      c.truncation.push_back(static_cast<int>(v));
    }
  }
  const auto y0 = r.numbers("torus", "y0");
  c.y0 = y0.empty() ? Vec(c.omega.head(c.d) - c.family.lambda0.head(c.d)) : to_vec(y0);
  if (c.y0.size() != c.d) throw ConfigError("torus.y0 must have d entries");
  c.rho = r.number("torus", "rho", 0.0);
  c.initial_torus = r.string("torus", "initial", "");
  if (!c.initial_torus.empty() && std::filesystem::path(c.initial_torus).is_relative()) {
    c.initial_torus = (std::filesystem::path(base_dir) / c.initial_torus).string();
  }

  int radius_sum = 0;
  for (int v : c.truncation) radius_sum += v;
  c.scan_radius = r.integer("frequency", "scan_radius", std::max(radius_sum, 1));

  if (r.has("structure", "J")) {
    const toml::node* node = r.get("structure", "J");
    if (auto s = node->value<std::string>()) {
      if (*s != "standard") throw ConfigError("structure.J must be \"standard\" or a matrix");
    } else {
      c.structure.standard_J = false;
      c.structure.J = r.matrix("structure", "J", 2 * c.d, 2 * c.d);
    }
  }
  if (r.has("structure", "primitive")) {
    const toml::node* node = r.get("structure", "primitive");
    if (auto s = node->value<std::string>()) {
      if (*s != "y_dx") throw ConfigError("structure.primitive must be \"y_dx\" or a matrix");
    } else {
      c.structure.standard_primitive = false;
      c.structure.P = r.matrix("structure", "primitive", m, m);
    }
  }
  make_structure(c.structure, c.d, c.n);  // validates

  SolveConfig& s = c.solve;
  s.max_iterations = r.integer("solve", "max_iterations", s.max_iterations);
  s.target_error = r.number("solve", "target_error", s.target_error);
  s.error_rho = r.number("solve", "error_rho", s.error_rho);
  s.grow_truncation = r.boolean("solve", "grow_truncation", s.grow_truncation);
  s.tail_factor = r.number("solve", "tail_factor", s.tail_factor);
  s.max_radius = r.integer("solve", "max_radius", s.max_radius);
  s.damping = r.boolean("solve", "damping", s.damping);
  s.max_halvings = r.integer("solve", "max_halvings", s.max_halvings);
  s.parameter_mask = r.booleans("solve", "parameter_mask");
  if (s.parameter_mask.empty()) s.parameter_mask.assign(static_cast<std::size_t>(m), true);
  s.use_twist = r.boolean("solve", "use_twist", s.use_twist);
  s.avg_tolerance = r.number("solve", "avg_tolerance", s.avg_tolerance);
  s.delta0 = r.number("solve", "delta0", s.delta0);
  s.coefficient_floor = r.number("solve", "coefficient_floor", s.coefficient_floor);
  s.sigma = c.sigma;
  s.validate(m);

  c.knob = r.string("continuation", "knob", "strength");
  if (c.knob != "strength" && c.knob != "coupling" && c.knob != "drift") {
    throw ConfigError("continuation.knob must be strength, coupling or drift");
  }
  c.schedule = r.numbers("continuation", "values");

  c.seed = static_cast<std::uint64_t>(r.integer("run", "seed", 1));
  c.threads = r.integer("run", "threads", 0);
  r.check_unused();

  c.frequency = certify(c.omega, c.sigma, c.scan_radius);
  if (c.frequency.rejected) {
    std::string l;
    for (int v : c.frequency.worst_l) l += (l.empty() ? "" : ",") + std::to_string(v);
    throw ConfigError("frequency rejected: l.omega is an integer for l = (" + l + ")");
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_run_config(read_file(path), base.empty() ? "." : base);
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[family]\n"
    << "name = \"" << c.family.name << "\"\n"
    << "strength = " << fmt(c.family.strength) << "\n"
    << "coupling = " << fmt(c.family.coupling) << "\n"
    << "drift = " << fmt(c.family.drift) << "\n"
    << "y_bound = " << fmt(c.family.y_bound) << "\n"
    << "lambda0 = " << vec_toml(c.family.lambda0) << "\n"
    << "reference_lambda = " << vec_toml(c.family.lambda_ref) << "\n\n"
    << "[frequency]\n"
    << "omega = " << vec_toml(c.omega) << "\n"
    << "sigma = " << fmt(c.sigma) << "\n"
    << "scan_radius = " << c.scan_radius << "\n\n"
    << "[torus]\n"
    << "truncation = [";
  for (std::size_t i = 0; i < c.truncation.size(); ++i) o << (i ? ", " : "") << c.truncation[i];
  o << "]\n"
    << "y0 = " << vec_toml(c.y0) << "\n"
    << "rho = " << fmt(c.rho) << "\n";
  if (!c.initial_torus.empty()) o << "initial = \"" << c.initial_torus << "\"\n";
  o << "\n[structure]\n";
  if (c.structure.standard_J) {
    o << "J = \"standard\"\n";
  } else {
    o << "J = " << mat_toml(c.structure.J) << "\n";
  }
  if (c.structure.standard_primitive) {
    o << "primitive = \"y_dx\"\n";
  } else {
    o << "primitive = " << mat_toml(c.structure.P) << "\n";
  }
  const SolveConfig& s = c.solve;
  o << "\n[solve]\n"
    << "max_iterations = " << s.max_iterations << "\n"
    << "target_error = " << fmt(s.target_error) << "\n"
    << "error_rho = " << fmt(s.error_rho) << "\n"
    << "grow_truncation = " << (s.grow_truncation ? "true" : "false") << "\n"
    << "tail_factor = " << fmt(s.tail_factor) << "\n"
    << "max_radius = " << s.max_radius << "\n"
    << "damping = " << (s.damping ? "true" : "false") << "\n"
    << "max_halvings = " << s.max_halvings << "\n"
    << "parameter_mask = [";
  for (std::size_t i = 0; i < s.parameter_mask.size(); ++i) {
    o << (i ? ", " : "") << (s.parameter_mask[i] ? "true" : "false");
  }
  o << "]\n"
    << "use_twist = " << (s.use_twist ? "true" : "false") << "\n"
    << "avg_tolerance = " << fmt(s.avg_tolerance) << "\n"
    << "coefficient_floor = " << fmt(s.coefficient_floor) << "\n"
    << "delta0 = " << fmt(s.delta0) << "\n\n"
    << "[continuation]\n"
    << "knob = \"" << c.knob << "\"\n"
    << "values = " << vec_toml(to_vec(c.schedule)) << "\n\n"
    << "[run]\n"
    << "seed = " << c.seed << "\n"
    << "threads = " << c.threads << "\n";
  return o.str();
}

TorusEmbedding initial_torus(const RunConfig& c) {
  if (!c.initial_torus.empty()) {
    TorusEmbedding K = load_torus(c.initial_torus);
    if (K.d() != c.d || K.n() != c.n) throw DimensionMismatch("initial torus has wrong dimensions");
    return K;
  }
  return TorusEmbedding::flat(c.d, c.n, c.truncation, c.y0, c.rho);
}

MapFamily family_at(const RunConfig& c, double value) {
  FamilySpec spec = c.family;
  if (c.knob == "strength") {
    spec.strength = value;
  } else if (c.knob == "coupling") {
    spec.coupling = value;
  } else {
    spec.drift = value;
  }
  return make_family(spec);
}

// -------------------------------------------------------------------- csv

std::string csv_columns() {
  return "iter,err_before,err_after,delta_norm,eps_norm,divisor_floor,condV,rank_avg_lambda,"
         "tail_ratio,accepted";
}

std::string csv_row(const StepReport& r) {
  return std::to_string(r.iteration) + "," + fmt(r.err_before) + "," + fmt(r.err_after) + "," +
         fmt(r.delta_norm) + "," + fmt(r.eps_norm) + "," + fmt(r.divisor_floor) + "," +
         fmt(r.cond_V) + "," + std::to_string(r.rank_avg_lambda) + "," + fmt(r.tail_ratio) + "," +
         (r.accepted ? "1" : "0");
}

void write_csv_log(std::ostream& out, const std::string& header,
                   const std::vector<StepReport>& reports) {
  std::istringstream lines(header);
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << "\n";
  out << csv_columns() << "\n";
  for (const auto& r : reports) out << csv_row(r) << "\n";
}

}  // namespace pkam
