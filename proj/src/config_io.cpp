#include "gfra/config_io.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace gfra {

using nlohmann::json;

namespace {

template <typename Enum>
Enum parse_enum(const json& v, const std::map<std::string, Enum>& names, const std::string& key) {
  const auto s = v.get<std::string>();
  const auto it = names.find(s);
  if (it == names.end()) throw std::invalid_argument("config: bad value '" + s + "' for " + key);
  return it->second;
}

const std::map<std::string, ChannelModel> kChannelModels{{"tdl", ChannelModel::kTdl},
                                                         {"bem_subspace", ChannelModel::kBemSubspace}};
const std::map<std::string, AngleModel> kAngleModels{{"uniform", AngleModel::kUniform},
                                                     {"on_grid", AngleModel::kOnGrid}};
const std::map<std::string, NoiseDomain> kNoiseDomains{{"angular", NoiseDomain::kAngular},
                                                       {"space", NoiseDomain::kSpace}};
const std::map<std::string, ObservationPath> kObservationPaths{
    {"bem", ObservationPath::kBem}, {"physical", ObservationPath::kPhysical}};
const std::map<std::string, Eta2Rule> kEta2Rules{{"posterior_trace", Eta2Rule::kPosteriorTrace},
                                                 {"printed", Eta2Rule::kPrinted}};
const std::map<std::string, NoiseEmNorm> kNoiseEmNorms{
    {"coefficients", NoiseEmNorm::kCoefficients}, {"observations", NoiseEmNorm::kObservations}};
const std::map<std::string, MrfInputSource> kMrfInputs{
    {"bg_extrinsic", MrfInputSource::kBgExtrinsic},
    {"lmmse_extrinsic", MrfInputSource::kLmmseExtrinsic}};

template <typename Enum>
std::string enum_name(Enum v, const std::map<std::string, Enum>& names) {
  for (const auto& [k, e] : names)
    if (e == v) return k;
  return "?";
}

using Setter = std::function<void(SystemConfig&, const json&)>;

template <typename T, typename Field>
Setter field(Field f) {
  return [f](SystemConfig& c, const json& v) { f(c) = v.get<T>(); };
}

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table{
      {"system",
       {
           {"subcarriers", field<int>([](SystemConfig& c) -> int& { return c.subcarriers; })},
           {"symbols", field<int>([](SystemConfig& c) -> int& { return c.symbols; })},
           {"devices", field<int>([](SystemConfig& c) -> int& { return c.devices; })},
           {"array_y", field<int>([](SystemConfig& c) -> int& { return c.array_y; })},
           {"array_z", field<int>([](SystemConfig& c) -> int& { return c.array_z; })},
           {"taps", field<int>([](SystemConfig& c) -> int& { return c.taps; })},
           {"basis_order", field<int>([](SystemConfig& c) -> int& { return c.basis_order; })},
           {"subcarrier_spacing",
            field<double>([](SystemConfig& c) -> double& { return c.subcarrier_spacing; })},
           {"max_doppler", field<double>([](SystemConfig& c) -> double& { return c.max_doppler; })},
       }},
      {"scenario",
       {
           {"activity_prob",
            field<double>([](SystemConfig& c) -> double& { return c.activity_prob; })},
           {"paths_per_device",
            field<int>([](SystemConfig& c) -> int& { return c.paths_per_device; })},
           {"delay_spread", field<double>([](SystemConfig& c) -> double& { return c.delay_spread; })},
           {"seed", field<std::uint64_t>([](SystemConfig& c) -> std::uint64_t& { return c.seed; })},
           {"channel_model",
            [](SystemConfig& c, const json& v) {
              c.channel_model = parse_enum(v, kChannelModels, "scenario.channel_model");
            }},
           {"angle_model",
            [](SystemConfig& c, const json& v) {
              c.angle_model = parse_enum(v, kAngleModels, "scenario.angle_model");
            }},
       }},
      {"link",
       {
           {"snr_db", field<double>([](SystemConfig& c) -> double& { return c.snr_db; })},
           {"threshold", field<double>([](SystemConfig& c) -> double& { return c.threshold; })},
           {"noise_domain",
            [](SystemConfig& c, const json& v) {
              c.noise_domain = parse_enum(v, kNoiseDomains, "link.noise_domain");
            }},
           {"observation_path",
            [](SystemConfig& c, const json& v) {
              c.observation_path = parse_enum(v, kObservationPaths, "link.observation_path");
            }},
       }},
      {"solver",
       {
           {"alpha", field<double>([](SystemConfig& c) -> double& { return c.solver.alpha; })},
           {"beta", field<double>([](SystemConfig& c) -> double& { return c.solver.beta; })},
           {"max_iterations",
            field<int>([](SystemConfig& c) -> int& { return c.solver.max_iterations; })},
           {"mrf_iterations",
            field<int>([](SystemConfig& c) -> int& { return c.solver.mrf_iterations; })},
           {"stop_tolerance",
            field<double>([](SystemConfig& c) -> double& { return c.solver.stop_tolerance; })},
           {"damping", field<double>([](SystemConfig& c) -> double& { return c.solver.damping; })},
           {"gamma1_init",
            field<double>([](SystemConfig& c) -> double& { return c.solver.gamma1_init; })},
           {"mrf_enabled",
            field<bool>([](SystemConfig& c) -> bool& { return c.solver.mrf_enabled; })},
           {"em_enabled", field<bool>([](SystemConfig& c) -> bool& { return c.solver.em_enabled; })},
           {"eta2_rule",
            [](SystemConfig& c, const json& v) {
              c.solver.eta2_rule = parse_enum(v, kEta2Rules, "solver.eta2_rule");
            }},
           {"noise_em_norm",
            [](SystemConfig& c, const json& v) {
              c.solver.noise_em_norm = parse_enum(v, kNoiseEmNorms, "solver.noise_em_norm");
            }},
           {"mrf_input",
            [](SystemConfig& c, const json& v) {
              c.solver.mrf_input = parse_enum(v, kMrfInputs, "solver.mrf_input");
            }},
       }},
  };
  return table;
}

}  // namespace

json config_to_json(const SystemConfig& c) {
  json j;
  j["system"] = {{"subcarriers", c.subcarriers},
                 {"symbols", c.symbols},
                 {"devices", c.devices},
                 {"array_y", c.array_y},
                 {"array_z", c.array_z},
                 {"taps", c.taps},
                 {"basis_order", c.basis_order},
                 {"subcarrier_spacing", c.subcarrier_spacing},
                 {"max_doppler", c.max_doppler}};
  j["scenario"] = {{"activity_prob", c.activity_prob},
                   {"paths_per_device", c.paths_per_device},
                   {"delay_spread", c.delay_spread},
                   {"seed", c.seed},
                   {"channel_model", enum_name(c.channel_model, kChannelModels)},
                   {"angle_model", enum_name(c.angle_model, kAngleModels)}};
  j["link"] = {{"snr_db", c.snr_db},
               {"threshold", c.threshold},
               {"noise_domain", enum_name(c.noise_domain, kNoiseDomains)},
               {"observation_path", enum_name(c.observation_path, kObservationPaths)}};
  j["solver"] = {{"alpha", c.solver.alpha},
                 {"beta", c.solver.beta},
                 {"max_iterations", c.solver.max_iterations},
                 {"mrf_iterations", c.solver.mrf_iterations},
                 {"stop_tolerance", c.solver.stop_tolerance},
                 {"damping", c.solver.damping},
                 {"gamma1_init", c.solver.gamma1_init},
                 {"mrf_enabled", c.solver.mrf_enabled},
                 {"em_enabled", c.solver.em_enabled},
                 {"eta2_rule", enum_name(c.solver.eta2_rule, kEta2Rules)},
                 {"noise_em_norm", enum_name(c.solver.noise_em_norm, kNoiseEmNorms)},
                 {"mrf_input", enum_name(c.solver.mrf_input, kMrfInputs)}};
  return j;
}

SystemConfig config_from_json(const json& doc, const SystemConfig& base) {
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
  SystemConfig cfg = base;
  const auto& table = setters();
  for (const auto& [section, body] : doc.items()) {
    const auto sec = table.find(section);
    if (sec == table.end()) throw std::invalid_argument("config: unknown section '" + section + "'");
    if (!body.is_object())
      throw std::invalid_argument("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end())
        throw std::invalid_argument("config: unknown key '" + section + "." + key + "'");
      try {
        it->second(cfg, value);
      } catch (const json::exception& e) {
        throw std::invalid_argument("config: bad type for '" + section + "." + key + "': " + e.what());
      }
    }
  }
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path, const SystemConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc, base);
}

void save_config(const SystemConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file " + path.string());
  out << config_to_json(cfg).dump(2) << '\n';
}

}  // namespace gfra
