#include "kepler/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kepler/interval.hpp"

namespace kepler {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

void Config::apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "tol_geom") tol_geom = parse_double(value);
        else if (key == "inflate_halfwidth") inflate_halfwidth = parse_double(value);
        else if (key == "vertex_tol") vertex_tol = parse_double(value);
        else if (key == "cutoff") cutoff = parse_double(value);
        else if (key == "interior_margin") interior_margin = parse_double(value);
        else if (key == "slack") slack = parse_double(value);
        else if (key == "max_depth") max_depth = static_cast<int>(parse_double(value));
        else if (key == "max_leaves") max_leaves = static_cast<long>(parse_double(value));
        else throw std::runtime_error("unknown config key: " + key);
    }
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    Config cfg;
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    cfg.apply(kv);
    return cfg;
}

} // namespace kepler
