#include "cli_config.hpp"

#include "membrane/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace membrane::cli {
namespace {

namespace pt = boost::property_tree;

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    bad(field, "expected a number, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty())
    bad(field, "expected an integer, got '" + text + "'");
  return v;
}

int parse_int(const std::string& field, const std::string& text) {
  const long long v = parse_integer(field, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    bad(field, "out of range");
  return static_cast<int>(v);
}

std::uint64_t parse_seed(const std::string& text) {
  const long long v = parse_integer("seed", text);
  if (v < 0) bad("seed", "must be non-negative");
  return static_cast<std::uint64_t>(v);
}

// Reads section keys, remembering which ones were consumed.
class Section {
 public:
  Section(std::string title, const pt::ptree& tree) : title_(std::move(title)), tree_(tree) {
    for (const auto& [key, child] : tree) {
      if (!child.empty()) bad(key, "nested keys are not supported");
      values_[key] = trim(child.data());
    }
  }

  const std::string* get(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  bool has_prefix(const std::string& prefix) const {
    for (const auto& [k, v] : values_)
      if (k.rfind(prefix, 0) == 0) return true;
    return false;
  }

  void reject_unused() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) bad(k, "unknown key in section [" + title_ + "]");
  }

 private:
  std::string title_;
  const pt::ptree& tree_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

template <class Config>
void apply_custom_object(Section& s, Config& c) {
  if (!s.has_prefix("object.")) return;
  auto need = [&](const std::string& key) -> const std::string& {
    const std::string* v = s.get(key);
    if (!v) bad(key, "required when any object.* key is given");
    return *v;
  };
  const auto center = parse_number_list("object.center", need("object.center"));
  const auto radii = parse_number_list("object.radii", need("object.radii"));
  const double amplitude = parse_double("object.amplitude", need("object.amplitude"));
  const double sigma = parse_double("object.sigma", need("object.sigma"));
  const std::string& prof = need("object.profile");
  Profile profile;
  if (prof == "smooth") profile = Profile::smooth;
  else if (prof == "rough") profile = Profile::rough;
  else bad("object.profile", "expected smooth or rough, got '" + prof + "'");
  const std::size_t d = static_cast<std::size_t>(c.dimension);
  if (center.size() != d) bad("object.center", "expected " + std::to_string(d) + " values");
  if (radii.size() != d) bad("object.radii", "expected " + std::to_string(d) + " values");
  try {
    if (d == 2) {
      for (const char* k : {"object.lambda_c", "object.theta_c", "object.exponent_sign"})
        if (s.get(k)) bad(k, "only valid for 3D objects");
      c.custom_2d = TestObject2D(IdealShape2D(center[0], center[1], radii[0], radii[1]), amplitude,
                                 sigma, profile);
    } else {
      auto opt = [&](const char* key, double fallback) {
        const std::string* v = s.get(key);
        return v ? parse_double(key, *v) : fallback;
      };
      c.custom_3d = TestObject3D(
          IdealShape3D(center[0], center[1], center[2], radii[0], radii[1], radii[2]), amplitude,
          sigma, opt("object.lambda_c", 0.0), opt("object.theta_c", kPi / 2), profile,
          opt("object.exponent_sign", -1.0));
    }
  } catch (const ValidationError& e) {
    bad("object", e.what());
  }
  if (!s.get("object")) c.object = "custom";
}

KernelFamily kernel_from(const std::string& text) {
  try {
    return parse_kernel_family(text);
  } catch (const Error& e) {
    bad("kernel", e.what());
  }
}

// Shared by both section kinds: fields every config type has.
template <class Config>
void apply_common(Section& s, Config& c) {
  if (auto v = s.get("kernel")) c.kernel = kernel_from(*v);
  if (auto v = s.get("m")) c.m = parse_int("m", *v);
  if (auto v = s.get("seed")) c.seed = parse_seed(*v);
  apply_custom_object(s, c);
}

template <class Config>
std::vector<Config> expand(std::vector<Config> base, Section& s) {
  if (auto v = s.get("dimension")) {
    const int dim = parse_int("dimension", *v);
    for (auto& c : base) c.dimension = dim;
  }
  if (auto v = s.get("object")) {
    std::vector<Config> kept;
    for (auto& c : base)
      if (c.object == *v) kept.push_back(c);
    if (kept.empty()) {
      kept = {base.front()};
      kept.front().object = *v;
    }
    base = kept;
  }
  return base;
}

StudyRun study_section(const std::string& name, const pt::ptree& tree, std::uint64_t seed,
                       const std::filesystem::path& cache_dir) {
  Section s("study " + name, tree);
  std::vector<StudyConfig> configs{StudyConfig{}};
  if (auto p = s.get("preset")) configs = study_preset(*p);
  for (auto& c : configs) c.seed = seed, c.cache_dir = cache_dir;
  configs = expand(configs, s);
  const std::string* models = s.get("models");
  const std::string* quantities = s.get("quantities");
  const std::string* n_list = s.get("n_list");
  const std::string* eps = s.get("epsilon");
  const std::string* md = s.get("md_dir");
  for (auto& c : configs) {
    apply_common(s, c);
    if (models) {
      c.models.clear();
      for (const auto& m : split_list(*models)) c.models.push_back(parse_model(m));
    }
    if (quantities) {
      c.quantities.clear();
      for (const auto& q : split_list(*quantities)) c.quantities.push_back(parse_quantity(q));
    }
    if (n_list) {
      c.n_list.clear();
      for (const auto& n : split_list(*n_list)) c.n_list.push_back(parse_int("n_list", n));
    }
    if (eps) c.epsilon = parse_double("epsilon", *eps);
    if (md) c.md_dir = *md;
  }
  s.reject_unused();
  for (const auto& c : configs) c.validate();
  return {name, configs};
}

SweepRun sweep_section(const std::string& name, const pt::ptree& tree, std::uint64_t seed,
                       const std::filesystem::path& cache_dir) {
  Section s("sweep " + name, tree);
  std::vector<SweepConfig> configs{SweepConfig{}};
  if (auto p = s.get("preset")) configs = sweep_preset(*p);
  for (auto& c : configs) c.seed = seed, c.cache_dir = cache_dir;
  configs = expand(configs, s);
  const std::string* n = s.get("n");
  const std::string* eps = s.get("epsilons");
  const std::string* lo = s.get("eps_lo");
  const std::string* hi = s.get("eps_hi");
  const std::string* count = s.get("eps_count");
  if (eps && (lo || hi || count)) bad("epsilons", "give either epsilons or eps_lo/eps_hi/eps_count");
  if ((lo || hi || count) && !(lo && hi && count))
    bad("eps_count", "eps_lo, eps_hi and eps_count go together");
  for (auto& c : configs) {
    apply_common(s, c);
    if (n) c.n = parse_int("n", *n);
    if (eps) c.epsilons = parse_number_list("epsilons", *eps);
    if (lo) {
      const int k = parse_int("eps_count", *count);
      if (k < 1) bad("eps_count", "must be at least 1");
      c.epsilons = logspace(parse_double("eps_lo", *lo), parse_double("eps_hi", *hi), k);
    }
  }
  s.reject_unused();
  for (const auto& c : configs) c.validate();
  return {name, configs};
}

nlohmann::json object_json(int dimension, const std::optional<TestObject2D>& o2,
                           const std::optional<TestObject3D>& o3) {
  if (dimension == 2 && o2) {
    const auto& i = o2->ideal();
    return {{"center", {i.xc(), i.yc()}}, {"radii", {i.a(), i.b()}},
            {"amplitude", o2->amplitude()}, {"sigma", o2->sigma()},
            {"profile", to_string(o2->profile())}};
  }
  if (dimension == 3 && o3) {
    const auto& i = o3->ideal();
    return {{"center", {i.xc(), i.yc(), i.zc()}}, {"radii", {i.a(), i.b(), i.c()}},
            {"amplitude", o3->amplitude()}, {"sigma", o3->sigma()},
            {"profile", to_string(o3->profile())}, {"lambda_c", o3->lambda_c()},
            {"theta_c", o3->theta_c()}, {"exponent_sign", o3->exponent_sign()}};
  }
  return nullptr;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(field, item));
  return out;
}

ConfigFile parse_config(std::istream& in, std::uint64_t seed, const std::filesystem::path& cache_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.line(), e.message());
  }
  ConfigFile file;
  for (const auto& [title, section] : tree) {
    if (section.empty()) throw ConfigError("config: key '" + title + "' outside a section");
    std::istringstream words(title);
    std::string kind, name, extra;
    words >> kind >> name >> extra;
    if (name.empty() || !extra.empty())
      throw ConfigError("config section [" + title + "]: expected [study NAME] or [sweep NAME]");
    if (kind == "study") file.studies.push_back(study_section(name, section, seed, cache_dir));
    else if (kind == "sweep") file.sweeps.push_back(sweep_section(name, section, seed, cache_dir));
    else throw ConfigError("config section [" + title + "]: unknown kind '" + kind + "'");
  }
  return file;
}

ConfigFile load_config(const std::filesystem::path& path, std::uint64_t seed,
                       const std::filesystem::path& cache_dir) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, seed, cache_dir);
}

nlohmann::json to_json(const StudyConfig& c) {
  nlohmann::json models = nlohmann::json::array(), quantities = nlohmann::json::array();
  for (Model m : c.models) models.push_back(to_string(m));
  for (Quantity q : c.quantities) quantities.push_back(to_string(q));
  return {{"dimension", c.dimension},      {"object", c.object},
          {"custom_object", object_json(c.dimension, c.custom_2d, c.custom_3d)},
          {"models", models},              {"quantities", quantities},
          {"n_list", c.n_list},            {"m", c.m},
          {"kernel", to_string(c.kernel)}, {"epsilon", c.epsilon},
          {"seed", c.seed},                {"cache_dir", c.cache_dir.string()},
          {"md_dir", c.md_dir.string()}};
}

nlohmann::json to_json(const SweepConfig& c) {
  return {{"dimension", c.dimension}, {"object", c.object},
          {"custom_object", object_json(c.dimension, c.custom_2d, c.custom_3d)},
          {"n", c.n},                 {"m", c.m},
          {"kernel", to_string(c.kernel)},
          {"epsilons", c.epsilons},   {"seed", c.seed},
          {"cache_dir", c.cache_dir.string()}};
}

nlohmann::json to_json(const TimingConfig& c) {
  return {{"dimension", c.dimension}, {"object", c.object},
          {"custom_object", object_json(c.dimension, c.custom_2d, c.custom_3d)},
          {"model", to_string(c.model)}, {"n", c.n}, {"m", c.m},
          {"kernel", to_string(c.kernel)}, {"epsilon", c.epsilon},
          {"trials", c.trials}, {"warmup", c.warmup}, {"seed", c.seed},
          {"cache_dir", c.cache_dir.string()}};
}

}  // namespace membrane::cli
