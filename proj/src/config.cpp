#include "levynls/config.hpp"

#include "levynls/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace levynls {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
  }
}

long long to_int(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
  }
}

bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + s + "'");
}

/// Reader that remembers which keys were consumed so unknown keys are reported.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> get(const std::string& key) {
    used_.push_back(key);
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }
  double number(const std::string& key, double fallback) {
    const auto v = get(key);
    return v ? to_double(*v, key) : fallback;
  }
  long long integer(const std::string& key, long long fallback) {
    const auto v = get(key);
    return v ? to_int(*v, key) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) {
    const auto v = get(key);
    return v ? to_bool(*v, key) : fallback;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    const auto v = get(key);
    return v ? *v : fallback;
  }

  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      for (const auto& [key, value] : body) {
        const std::string full = section + "." + key;
        if (std::find(used_.begin(), used_.end(), full) == used_.end()) {
          throw ConfigError("unknown configuration key '" + full + "'");
        }
      }
      if (body.empty() && !body.data().empty()) {
        throw ConfigError("key '" + section + "' outside of a section");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string> used_;
};

/// "kind key=value key=value" tokens.
std::pair<std::string, std::vector<std::pair<std::string, std::string>>> parse_entry(
    const std::string& entry, const std::string& key) {
  std::istringstream in(entry);
  std::string kind;
  in >> kind;
  std::vector<std::pair<std::string, std::string>> kv;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("key '" + key + "': malformed token '" + tok + "'");
    kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return {kind, kv};
}

std::vector<NoiseSymbol> parse_symbols(const std::string& text) {
  std::vector<NoiseSymbol> out;
  for (const auto& entry : split(text, ';')) {
    const auto [kind, kv] = parse_entry(entry, "noise.symbols");
    NoiseSymbol s;
    if (kind == "const") {
      s.kind = NoiseSymbol::Kind::Constant;
    } else if (kind == "cos") {
      s.kind = NoiseSymbol::Kind::Cos;
    } else if (kind == "sin") {
      s.kind = NoiseSymbol::Kind::Sin;
    } else if (kind == "bump") {
      s.kind = NoiseSymbol::Kind::Bump;
    } else {
      throw ConfigError("noise.symbols: unknown symbol kind '" + kind + "'");
    }
    for (const auto& [k, v] : kv) {
      const std::string key = "noise.symbols." + k;
      if (k == "amp") s.amplitude = to_double(v, key);
      else if (k == "kx") s.kx = static_cast<int>(to_int(v, key));
      else if (k == "ky") s.ky = static_cast<int>(to_int(v, key));
      else if (k == "x0") s.x0 = to_double(v, key);
      else if (k == "y0") s.y0 = to_double(v, key);
      else if (k == "width") s.width = to_double(v, key);
      else throw ConfigError("noise.symbols: unknown parameter '" + k + "'");
    }
    out.push_back(s);
  }
  return out;
}

std::string symbols_text(const std::vector<NoiseSymbol>& symbols) {
  std::string out;
  for (const auto& s : symbols) {
    if (!out.empty()) out += "; ";
    switch (s.kind) {
      case NoiseSymbol::Kind::Constant:
        out += "const amp=" + format_double(s.amplitude);
        break;
      case NoiseSymbol::Kind::Cos:
      case NoiseSymbol::Kind::Sin:
        out += (s.kind == NoiseSymbol::Kind::Cos ? "cos" : "sin");
        out += " kx=" + std::to_string(s.kx) + " ky=" + std::to_string(s.ky) +
               " amp=" + format_double(s.amplitude);
        break;
      case NoiseSymbol::Kind::Bump:
        out += "bump x0=" + format_double(s.x0) + " y0=" + format_double(s.y0) +
               " width=" + format_double(s.width) + " amp=" + format_double(s.amplitude);
        break;
    }
  }
  return out;
}

std::vector<Atom> parse_atoms(const std::string& text) {
  std::vector<Atom> atoms;
  for (const auto& entry : split(text, ';')) {
    std::istringstream in(entry);
    std::vector<double> nums;
    std::string tok;
    while (in >> tok) nums.push_back(to_double(tok, "measure.atoms"));
    if (nums.size() < 2) throw ConfigError("measure.atoms: each atom is 'weight mark...'");
    Atom a;
    a.weight = nums[0];
    a.mark = Eigen::Map<Eigen::VectorXd>(nums.data() + 1, static_cast<Eigen::Index>(nums.size() - 1));
    atoms.push_back(a);
  }
  return atoms;
}

std::string atoms_text(const std::vector<Atom>& atoms) {
  std::string out;
  for (const auto& a : atoms) {
    if (!out.empty()) out += "; ";
    out += format_double(a.weight);
    for (Eigen::Index i = 0; i < a.mark.size(); ++i) out += " " + format_double(a.mark[i]);
  }
  return out;
}

std::vector<InitialModeSpec> parse_modes(const std::string& text) {
  std::vector<InitialModeSpec> out;
  for (const auto& entry : split(text, ';')) {
    // Entries have no kind token: prepend a dummy so parse_entry can be reused.
    const auto [kind, kv] = parse_entry("mode " + entry, "initial.modes");
    (void)kind;
    InitialModeSpec m;
    double re = 0.0;
    double im = 0.0;
    for (const auto& [k, v] : kv) {
      const std::string key = "initial.modes." + k;
      if (k == "kx") m.wavenumber.k1 = static_cast<int>(to_int(v, key));
      else if (k == "ky") m.wavenumber.k2 = static_cast<int>(to_int(v, key));
      else if (k == "re") re = to_double(v, key);
      else if (k == "im") im = to_double(v, key);
      else throw ConfigError("initial.modes: unknown parameter '" + k + "'");
    }
    m.value = {re, im};
    out.push_back(m);
  }
  return out;
}

std::string modes_text(const std::vector<InitialModeSpec>& modes) {
  std::string out;
  for (const auto& m : modes) {
    if (!out.empty()) out += "; ";
    out += "kx=" + std::to_string(m.wavenumber.k1) + " ky=" + std::to_string(m.wavenumber.k2) +
           " re=" + format_double(m.value.real()) + " im=" + format_double(m.value.imag());
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ", ";
    out += fmt(x);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(to_double(s, key));
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

RunConfig::RunConfig() {
  measure.kind = AtomicMeasure{{Atom{1.0, Eigen::VectorXd::Constant(1, 0.3)},
                                Atom{1.0, Eigen::VectorXd::Constant(1, -0.3)}}};
  measure.epsilon = 0.0;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  Reader r(tree);
  RunConfig c;

  const std::string kind = r.text("domain.kind", "torus1d");
  if (kind == "torus1d") {
    c.domain = Torus1D{r.number("domain.length", Torus1D{}.length)};
  } else if (kind == "torus2d") {
    c.domain = Torus2D{r.number("domain.length_x", Torus2D{}.length_x),
                       r.number("domain.length_y", Torus2D{}.length_y)};
  } else if (kind == "dirichlet") {
    c.domain = IntervalDirichlet{r.number("domain.length", IntervalDirichlet{}.length)};
  } else if (kind == "neumann") {
    c.domain = IntervalNeumann{r.number("domain.length", IntervalNeumann{}.length)};
  } else {
    throw ConfigError("domain.kind: unsupported domain '" + kind + "'");
  }
  c.beta = r.number("domain.beta", c.beta);
  c.max_level = static_cast<int>(r.integer("domain.max_level", c.max_level));
  c.dealias = static_cast<int>(r.integer("domain.dealias", c.dealias));

  if (const auto lv = r.get("galerkin.levels")) {
    c.levels.clear();
    for (const auto& s : split(*lv, ',')) c.levels.push_back(static_cast<int>(to_int(s, "galerkin.levels")));
    if (c.levels.empty()) throw ConfigError("galerkin.levels must not be empty");
  }

  c.nonlinearity.alpha = r.number("nonlinearity.alpha", c.nonlinearity.alpha);
  const std::string sign = r.text("nonlinearity.sign", "defocusing");
  if (sign == "defocusing") c.nonlinearity.sign = NonlinearitySign::Defocusing;
  else if (sign == "focusing") c.nonlinearity.sign = NonlinearitySign::Focusing;
  else throw ConfigError("nonlinearity.sign must be defocusing or focusing");

  if (const auto s = r.get("noise.symbols")) c.symbols = parse_symbols(*s);

  const std::string mkind = r.text("measure.kind", "atomic");
  if (mkind == "atomic") {
    if (const auto a = r.get("measure.atoms")) {
      c.measure.kind = AtomicMeasure{parse_atoms(*a)};
    }
  } else if (mkind == "radial_stable") {
    RadialStableMeasure s;
    s.activity = r.number("measure.activity", s.activity);
    s.index = r.number("measure.index", s.index);
    s.dimension = static_cast<int>(r.integer("measure.dimension", s.dimension));
    c.measure.kind = s;
  } else {
    throw ConfigError("measure.kind must be atomic or radial_stable");
  }
  if (mkind == "atomic") {
    r.get("measure.activity");
    r.get("measure.index");
    r.get("measure.dimension");
  } else {
    r.get("measure.atoms");
  }
  c.measure.epsilon = r.number("measure.epsilon", c.measure.epsilon);

  const std::string ikind = r.text("initial.kind", "gaussian");
  if (ikind == "gaussian") c.initial.kind = InitialSpec::Kind::Gaussian;
  else if (ikind == "modes") c.initial.kind = InitialSpec::Kind::Modes;
  else if (ikind == "decay") c.initial.kind = InitialSpec::Kind::Decay;
  else throw ConfigError("initial.kind must be gaussian, modes or decay");
  c.initial.amplitude = r.number("initial.amplitude", c.initial.amplitude);
  c.initial.x0 = r.number("initial.x0", c.initial.x0);
  c.initial.y0 = r.number("initial.y0", c.initial.y0);
  c.initial.width = r.number("initial.width", c.initial.width);
  c.initial.power = r.number("initial.power", c.initial.power);
  c.initial.phase = r.number("initial.phase", c.initial.phase);
  if (const auto m = r.get("initial.modes")) c.initial.modes = parse_modes(*m);

  const std::string mode = r.text("solver.mode", "midpoint");
  if (mode == "midpoint") c.solver.mode = SolverMode::FaithfulMidpoint;
  else if (mode == "splitstep") c.solver.mode = SolverMode::SplitStep;
  else throw ConfigError("solver.mode must be midpoint or splitstep");
  c.solver.dt = r.number("solver.dt", c.solver.dt);
  c.solver.tolerance = r.number("solver.tolerance", c.solver.tolerance);
  c.solver.max_iterations = static_cast<int>(r.integer("solver.max_iterations", c.solver.max_iterations));
  c.solver.min_step = r.number("solver.min_step", c.solver.min_step);
  const std::string closure = r.text("solver.closure", "auto");
  if (closure == "auto") c.solver.closure = ClosureMode::Auto;
  else if (closure == "taylor2") c.solver.closure = ClosureMode::Taylor2;
  else if (closure == "atomic_exact") c.solver.closure = ClosureMode::AtomicExact;
  else throw ConfigError("solver.closure must be auto, taylor2 or atomic_exact");
  c.horizon = r.number("solver.horizon", c.horizon);

  c.trajectories = static_cast<int>(r.integer("run.trajectories", c.trajectories));
  if (const auto s = r.get("run.seed")) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(*s, &used, 0);
      if (used != s->size()) throw std::invalid_argument(*s);
    } catch (const std::exception&) {
      throw ConfigError("run.seed: expected an unsigned 64-bit integer");
    }
  }
  c.threads = static_cast<int>(r.integer("run.threads", c.threads));
  c.out_dir = r.text("run.out", c.out_dir);
  c.snapshots = r.boolean("run.snapshots", c.snapshots);
  c.events = r.boolean("run.events", c.events);

  if (const auto s = r.get("moments.orders")) c.moment_orders = parse_doubles(*s, "moments.orders");
  if (const auto s = r.get("moments.thetas")) c.aldous_thetas = parse_doubles(*s, "moments.thetas");
  c.aldous_eta = r.number("moments.eta", c.aldous_eta);
  const std::string stop = r.text("moments.stopping", "deterministic");
  if (stop == "deterministic") c.stopping.kind = StoppingRule::Kind::Deterministic;
  else if (stop == "first_jump") c.stopping.kind = StoppingRule::Kind::FirstJumpAfter;
  else throw ConfigError("moments.stopping must be deterministic or first_jump");
  c.stopping.t0 = r.number("moments.t0", c.stopping.t0);

  c.verify.unitarity_tol = r.number("verify.unitarity_tol", c.verify.unitarity_tol);
  c.verify.group_tol = r.number("verify.group_tol", c.verify.group_tol);
  c.verify.flow_tol = r.number("verify.flow_tol", c.verify.flow_tol);
  c.verify.ode_tol = r.number("verify.ode_tol", c.verify.ode_tol);
  c.verify.mass_tol = r.number("verify.mass_tol", c.verify.mass_tol);
  c.verify.parseval_tol = r.number("verify.parseval_tol", c.verify.parseval_tol);
  c.verify.trials = static_cast<int>(r.integer("verify.trials", c.verify.trials));
  c.verify.inject_fault = r.text("verify.inject_fault", c.verify.inject_fault);

  r.reject_unknown();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read configuration file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[domain]\n";
  o << "kind = " << domain_name(c.domain) << "\n";
  if (const auto* t = std::get_if<Torus1D>(&c.domain)) o << "length = " << format_double(t->length) << "\n";
  if (const auto* t = std::get_if<Torus2D>(&c.domain)) {
    o << "length_x = " << format_double(t->length_x) << "\n";
    o << "length_y = " << format_double(t->length_y) << "\n";
  }
  if (const auto* t = std::get_if<IntervalDirichlet>(&c.domain)) o << "length = " << format_double(t->length) << "\n";
  if (const auto* t = std::get_if<IntervalNeumann>(&c.domain)) o << "length = " << format_double(t->length) << "\n";
  o << "beta = " << format_double(c.beta) << "\n";
  o << "max_level = " << c.max_level << "\n";
  o << "dealias = " << c.dealias << "\n\n";

  o << "[galerkin]\nlevels = " << join(c.levels, [](int v) { return std::to_string(v); }) << "\n\n";

  o << "[nonlinearity]\nalpha = " << format_double(c.nonlinearity.alpha) << "\n";
  o << "sign = " << (c.nonlinearity.sign == NonlinearitySign::Defocusing ? "defocusing" : "focusing")
    << "\n\n";

  o << "[noise]\nsymbols = " << symbols_text(c.symbols) << "\n\n";

  o << "[measure]\n";
  if (const auto* a = std::get_if<AtomicMeasure>(&c.measure.kind)) {
    o << "kind = atomic\natoms = " << atoms_text(a->atoms) << "\n";
  } else {
    const auto& s = std::get<RadialStableMeasure>(c.measure.kind);
    o << "kind = radial_stable\nactivity = " << format_double(s.activity) << "\n";
    o << "index = " << format_double(s.index) << "\ndimension = " << s.dimension << "\n";
  }
  o << "epsilon = " << format_double(c.measure.epsilon) << "\n\n";

  o << "[initial]\nkind = ";
  switch (c.initial.kind) {
    case InitialSpec::Kind::Gaussian: o << "gaussian\n"; break;
    case InitialSpec::Kind::Modes: o << "modes\n"; break;
    case InitialSpec::Kind::Decay: o << "decay\n"; break;
  }
  o << "amplitude = " << format_double(c.initial.amplitude) << "\n";
  o << "x0 = " << format_double(c.initial.x0) << "\ny0 = " << format_double(c.initial.y0) << "\n";
  o << "width = " << format_double(c.initial.width) << "\n";
  o << "power = " << format_double(c.initial.power) << "\nphase = " << format_double(c.initial.phase) << "\n";
  o << "modes = " << modes_text(c.initial.modes) << "\n\n";

  o << "[solver]\nmode = " << (c.solver.mode == SolverMode::FaithfulMidpoint ? "midpoint" : "splitstep")
    << "\n";
  o << "dt = " << format_double(c.solver.dt) << "\ntolerance = " << format_double(c.solver.tolerance) << "\n";
  o << "max_iterations = " << c.solver.max_iterations << "\nmin_step = " << format_double(c.solver.min_step)
    << "\n";
  o << "closure = ";
  switch (c.solver.closure) {
    case ClosureMode::Auto: o << "auto\n"; break;
    case ClosureMode::Taylor2: o << "taylor2\n"; break;
    case ClosureMode::AtomicExact: o << "atomic_exact\n"; break;
  }
  o << "horizon = " << format_double(c.horizon) << "\n\n";

  o << "[run]\ntrajectories = " << c.trajectories << "\nseed = " << c.seed << "\nthreads = " << c.threads
    << "\n";
  o << "out = " << c.out_dir << "\nsnapshots = " << (c.snapshots ? "true" : "false")
    << "\nevents = " << (c.events ? "true" : "false") << "\n\n";

  o << "[moments]\norders = " << join(c.moment_orders, format_double) << "\n";
  o << "thetas = " << join(c.aldous_thetas, format_double) << "\n";
  o << "eta = " << format_double(c.aldous_eta) << "\n";
  o << "stopping = " << (c.stopping.kind == StoppingRule::Kind::Deterministic ? "deterministic" : "first_jump")
    << "\n";
  o << "t0 = " << format_double(c.stopping.t0) << "\n\n";

  o << "[verify]\nunitarity_tol = " << format_double(c.verify.unitarity_tol) << "\n";
  o << "group_tol = " << format_double(c.verify.group_tol) << "\n";
  o << "flow_tol = " << format_double(c.verify.flow_tol) << "\n";
  o << "ode_tol = " << format_double(c.verify.ode_tol) << "\n";
  o << "mass_tol = " << format_double(c.verify.mass_tol) << "\n";
  o << "parseval_tol = " << format_double(c.verify.parseval_tol) << "\n";
  o << "trials = " << c.verify.trials << "\n";
  o << "inject_fault = " << c.verify.inject_fault << "\n";
  return o.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  // Where results go and how many workers compute them do not change them.
  RunConfig canonical = config;
  canonical.out_dir = "-";
  canonical.threads = 1;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : serialize_config(canonical)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void validate_config(const RunConfig& c) {
  if (!(c.beta > 0.0)) throw ConfigError("domain.beta must be positive");
  if (c.max_level < 0) throw ConfigError("domain.max_level must be nonnegative");
  if (c.dealias < 2) throw ConfigError("domain.dealias must be at least 2");
  for (const int n : c.levels) {
    if (n < 0 || n > c.max_level) throw ConfigError("galerkin.levels must lie in [0, max_level]");
  }
  validate_nonlinearity(c.nonlinearity, spatial_dimension(c.domain), c.beta);
  c.measure.validate();
  const auto* atomic = std::get_if<AtomicMeasure>(&c.measure.kind);
  if (!(atomic && atomic->atoms.empty()) &&
      static_cast<int>(c.symbols.size()) != c.measure.dimension()) {
    throw ConfigError("noise.symbols count must equal the noise dimension");
  }
  c.solver.validate();
  if (!(c.horizon >= 0.0)) throw ConfigError("solver.horizon must be nonnegative");
  if (c.trajectories < 1) throw ConfigError("run.trajectories must be at least 1");
  if (c.threads < 1) throw ConfigError("run.threads must be at least 1");
  if (c.out_dir.empty()) throw ConfigError("run.out must not be empty");
  resolve_closure(c.measure, c.solver.closure);
}

std::shared_ptr<const SpectralModel> build_model(const RunConfig& c) {
  return std::make_shared<const SpectralModel>(c.domain, c.beta, c.max_level, c.dealias);
}

Coeffs build_initial(const RunConfig& c, const SpectralModel& model) {
  switch (c.initial.kind) {
    case InitialSpec::Kind::Gaussian: {
      GridField g(model.grid_size());
      for (Eigen::Index j = 0; j < g.size(); ++j) {
        const auto& x = model.nodes()[static_cast<std::size_t>(j)];
        const double dx = x[0] - c.initial.x0;
        const double dy = model.dimension() == 2 ? x[1] - c.initial.y0 : 0.0;
        g[j] = c.initial.amplitude *
               std::exp(-(dx * dx + dy * dy) / (2.0 * c.initial.width * c.initial.width));
      }
      return model.from_grid(g, model.size());
    }
    case InitialSpec::Kind::Modes: {
      Coeffs u = Coeffs::Zero(model.size());
      for (const auto& m : c.initial.modes) {
        const auto idx = model.find_mode(m.wavenumber);
        if (idx < 0) {
          throw ConfigError("initial.modes: wavenumber (" + std::to_string(m.wavenumber.k1) + ", " +
                            std::to_string(m.wavenumber.k2) + ") is not retained by the model");
        }
        u[idx] += m.value;
      }
      return u;
    }
    case InitialSpec::Kind::Decay: {
      Coeffs u(model.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double mag = c.initial.amplitude * std::pow(model.eigenvalues_S()[i], -c.initial.power);
        u[i] = std::polar(mag, c.initial.phase * model.mode_index()[static_cast<std::size_t>(i)].k1);
      }
      return u;
    }
  }
  return Coeffs::Zero(model.size());
}

GalerkinProblem build_problem(const RunConfig& c, std::shared_ptr<const SpectralModel> model,
                              int level) {
  const Coeffs u0 = build_initial(c, *model);
  return make_problem(std::move(model), level, c.nonlinearity, c.symbols, c.measure, u0, c.horizon);
}

}  // namespace levynls
