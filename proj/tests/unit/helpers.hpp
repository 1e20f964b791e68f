#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "palps/parser.hpp"

namespace palps::testing {

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string model_path(const std::string& name) { return std::string(PALPS_MODELS) + "/" + name + ".palps"; }

inline Model load_model(const std::string& name) { return parse_model(slurp(model_path(name))); }

}  // namespace palps::testing
