#include "liqsurf/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "presets_data.hpp"

namespace liqsurf {

namespace pt = boost::property_tree;

namespace {

std::string fmt_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

pt::ptree parse_ini(std::string_view text, const std::string& origin)
{
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    return tree;
}

template <typename T>
T get_value(const pt::ptree& node, const std::string& key)
{
    const auto text = node.get_value<std::string>();
    std::istringstream in(text);
    T v{};
    if (!(in >> v) || !(in >> std::ws).eof()) {
        throw ConfigError("bad value for " + key + ": '" + text + "'");
    }
    return v;
}

bool get_bool(const pt::ptree& node, const std::string& key)
{
    const auto text = node.get_value<std::string>();
    if (text == "true" || text == "on" || text == "1") {
        return true;
    }
    if (text == "false" || text == "off" || text == "0") {
        return false;
    }
    throw ConfigError("bad value for " + key + ": '" + text + "' (expected true or false)");
}

Preset preset_from_section(const std::string& name, const pt::ptree& s)
{
    Preset p;
    p.name = name;
    try {
        p.description = s.get<std::string>("description", "");
        p.indicator.method = method_from_string(s.get<std::string>("method"));
        p.indicator.equation = equation_from_string(s.get<std::string>("equation"));
        p.indicator.plane = plane_from_string(s.get<std::string>("plane"));
        p.indicator.aggregation = aggregation_from_string(s.get<std::string>("aggregation"));
        p.threshold = s.get<double>("threshold");
        p.consistency = s.get<bool>("consistency");
        if (const double f = s.get<double>("region_fraction", 0.0); f > 0.0) {
            p.indicator.region = {RegionHeight::Mode::FractionOfVessel, f};
        }
    } catch (const pt::ptree_error& e) {
        throw ConfigError("preset " + name + ": " + e.what());
    }
    p.indicator.validate();
    return p;
}

std::vector<Preset> load_presets()
{
    const auto tree = parse_ini(kPresetsIni, "presets");
    std::vector<Preset> out;
    for (const auto& [name, section] : tree) {
        out.push_back(preset_from_section(name, section));
    }
    std::sort(out.begin(), out.end(), [](const Preset& a, const Preset& b) { return a.name < b.name; });
    return out;
}

std::string normalize_preset_name(std::string_view name)
{
    constexpr std::string_view prefix = "entry";
    if (name.substr(0, prefix.size()) != prefix) {
        return std::string(name);
    }
    const auto digits = name.substr(prefix.size());
    int n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
        return std::string(name);
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "entry%02d", n);
    return buf;
}

void apply_preset(DetectorConfig& cfg, const Preset& p)
{
    cfg.preset = p.name;
    cfg.indicator = p.indicator;
    cfg.selection.threshold = p.threshold;
    cfg.consistency.enabled = p.consistency;
}

using Setter = void (*)(DetectorConfig&, const pt::ptree&, const std::string&);

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table{
        {"indicator.method",
         [](DetectorConfig& c, const pt::ptree& n, const std::string&) {
             c.indicator.method = method_from_string(n.get_value<std::string>());
             c.preset.clear();
         }},
        {"indicator.equation",
         [](DetectorConfig& c, const pt::ptree& n, const std::string&) {
             c.indicator.equation = equation_from_string(n.get_value<std::string>());
             c.preset.clear();
         }},
        {"indicator.plane",
         [](DetectorConfig& c, const pt::ptree& n, const std::string&) {
             c.indicator.plane = plane_from_string(n.get_value<std::string>());
             c.preset.clear();
         }},
        {"indicator.aggregation",
         [](DetectorConfig& c, const pt::ptree& n, const std::string&) {
             c.indicator.aggregation = aggregation_from_string(n.get_value<std::string>());
             c.preset.clear();
         }},
        {"indicator.region_fraction",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             const double f = get_value<double>(n, k);
             c.indicator.region = f > 0.0 ? RegionHeight{RegionHeight::Mode::FractionOfVessel, f} : RegionHeight{};
             c.preset.clear();
         }},
        {"scan.max_height_fraction",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             c.scan.max_height_fraction = get_value<double>(n, k);
         }},
        {"scan.height_step",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) { c.scan.height_step = get_value<int>(n, k); }},
        {"scan.narrow_fraction",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             c.scan.narrow_fraction = get_value<double>(n, k);
         }},
        {"scan.row_step",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) { c.scan.row_step = get_value<int>(n, k); }},
        {"selection.threshold",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             c.selection.threshold = get_value<double>(n, k);
         }},
        {"selection.min_separation",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             if (n.get_value<std::string>().empty()) {
                 c.selection.min_separation.reset();
             } else {
                 c.selection.min_separation = get_value<double>(n, k);
             }
         }},
        {"selection.n_phases",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             if (n.get_value<std::string>().empty()) {
                 c.selection.n_phases.reset();
             } else {
                 c.selection.n_phases = get_value<int>(n, k);
             }
         }},
        {"consistency.enabled",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) { c.consistency.enabled = get_bool(n, k); }},
        {"consistency.fraction",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             c.consistency.fraction = get_value<double>(n, k);
         }},
        {"consistency.min_change",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             c.consistency.min_change = get_value<double>(n, k);
         }},
        {"canny.sigma",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) { c.canny.sigma = get_value<double>(n, k); }},
        {"canny.low",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             if (n.get_value<std::string>().empty()) {
                 c.canny.low.reset();
             } else {
                 c.canny.low = get_value<double>(n, k);
             }
         }},
        {"canny.high",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             if (n.get_value<std::string>().empty()) {
                 c.canny.high.reset();
             } else {
                 c.canny.high = get_value<double>(n, k);
             }
         }},
        {"canny.auto_percentile",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             c.canny.auto_percentile = get_value<double>(n, k);
         }},
        {"canny.auto_low_ratio",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) {
             c.canny.auto_low_ratio = get_value<double>(n, k);
         }},
        {"run.threads",
         [](DetectorConfig& c, const pt::ptree& n, const std::string& k) { c.threads = get_value<int>(n, k); }},
    };
    return table;
}

} // namespace

const std::vector<Preset>& presets()
{
    static const std::vector<Preset> all = load_presets();
    return all;
}

const Preset& find_preset(std::string_view name)
{
    const auto key = normalize_preset_name(name);
    for (const auto& p : presets()) {
        if (p.name == key) {
            return p;
        }
    }
    throw ConfigError("unknown preset: " + std::string(name));
}

void DetectorConfig::validate() const
{
    indicator.validate();
    try {
        scan.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    selection.validate();
    if (!(consistency.fraction > 0.0 && consistency.fraction <= 1.0)) {
        throw ConfigError("consistency fraction must be in (0, 1]");
    }
    if (!(consistency.min_change >= 0.0)) {
        throw ConfigError("consistency min_change must be >= 0");
    }
    if (!(canny.sigma > 0.0)) {
        throw ConfigError("canny sigma must be > 0");
    }
    if (!(canny.auto_percentile > 0.0 && canny.auto_percentile <= 1.0) ||
        !(canny.auto_low_ratio >= 0.0 && canny.auto_low_ratio <= 1.0)) {
        throw ConfigError("canny auto threshold parameters must be in (0, 1]");
    }
    if (canny.low.has_value() != canny.high.has_value()) {
        throw ConfigError("canny low and high must be given together");
    }
    if (canny.low && !(*canny.low >= 0.0 && *canny.low <= *canny.high)) {
        throw ConfigError("canny thresholds must satisfy 0 <= low <= high");
    }
    if (threads < 1) {
        throw ConfigError("threads must be >= 1");
    }
}

std::string DetectorConfig::canonical() const
{
    const auto opt = [](const auto& o) { return o ? fmt_double(static_cast<double>(*o)) : std::string(); };
    std::ostringstream s;
    s << "indicator.method=" << to_string(indicator.method) << '\n'
      << "indicator.equation=" << to_string(indicator.equation) << '\n'
      << "indicator.plane=" << to_string(indicator.plane) << '\n'
      << "indicator.aggregation=" << to_string(indicator.aggregation) << '\n'
      << "indicator.region_fraction="
      << fmt_double(indicator.region.mode == RegionHeight::Mode::OnePixel ? 0.0 : indicator.region.fraction) << '\n'
      << "scan.max_height_fraction=" << fmt_double(scan.max_height_fraction) << '\n'
      << "scan.height_step=" << scan.height_step << '\n'
      << "scan.narrow_fraction=" << fmt_double(scan.narrow_fraction) << '\n'
      << "scan.row_step=" << scan.row_step << '\n'
      << "selection.threshold=" << fmt_double(selection.threshold) << '\n'
      << "selection.min_separation=" << opt(selection.min_separation) << '\n'
      << "selection.n_phases=" << opt(selection.n_phases) << '\n'
      << "consistency.enabled=" << (consistency.enabled ? "true" : "false") << '\n'
      << "consistency.fraction=" << fmt_double(consistency.fraction) << '\n'
      << "consistency.min_change=" << fmt_double(consistency.min_change) << '\n'
      << "canny.sigma=" << fmt_double(canny.sigma) << '\n'
      << "canny.low=" << opt(canny.low) << '\n'
      << "canny.high=" << opt(canny.high) << '\n'
      << "canny.auto_percentile=" << fmt_double(canny.auto_percentile) << '\n'
      << "canny.auto_low_ratio=" << fmt_double(canny.auto_low_ratio) << '\n';
    return s.str();
}

std::string DetectorConfig::fingerprint() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

DetectorConfig config_from_preset(std::string_view name)
{
    DetectorConfig cfg;
    apply_preset(cfg, find_preset(name));
    cfg.selection.require_consistency = cfg.consistency.enabled;
    return cfg;
}

DetectorConfig parse_config(std::string_view text, const std::optional<std::string>& preset_override)
{
    const auto tree = parse_ini(text, "config");
    DetectorConfig cfg;

    std::string preset_name = "entry22";
    for (const auto& [key, node] : tree) {
        if (node.empty() && key == "preset") {
            preset_name = node.get_value<std::string>();
        } else if (node.empty()) {
            throw ConfigError("unknown config key: " + key);
        }
    }
    if (preset_override) {
        preset_name = *preset_override;
    }
    apply_preset(cfg, find_preset(preset_name));

    const auto& table = setters();
    for (const auto& [section, node] : tree) {
        if (node.empty()) {
            continue;
        }
        for (const auto& [name, value] : node) {
            const auto key = section + "." + name;
            const auto it = table.find(key);
            if (it == table.end()) {
                throw ConfigError("unknown config key: " + key);
            }
            it->second(cfg, value, key);
        }
    }
    cfg.selection.require_consistency = cfg.consistency.enabled;
    cfg.validate();
    return cfg;
}

DetectorConfig load_config(const std::filesystem::path& path, const std::optional<std::string>& preset_override)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file: " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), preset_override);
}

std::string to_config_text(const DetectorConfig& cfg)
{
    std::ostringstream s;
    if (!cfg.preset.empty()) {
        s << "preset = " << cfg.preset << "\n\n";
    }
    std::string current;
    std::istringstream lines(cfg.canonical());
    std::string line;
    while (std::getline(lines, line)) {
        const auto dot = line.find('.');
        const auto eq = line.find('=');
        const auto section = line.substr(0, dot);
        // A named preset already pins the indicator; restating it would
        // read back as a custom configuration.
        if (section == "indicator" && !cfg.preset.empty()) {
            continue;
        }
        if (section != current) {
            s << (current.empty() ? "" : "\n") << '[' << section << "]\n";
            current = section;
        }
        s << line.substr(dot + 1, eq - dot - 1) << " = " << line.substr(eq + 1) << '\n';
    }
    s << "\n[run]\nthreads = " << cfg.threads << '\n';
    return s.str();
}

} // namespace liqsurf
