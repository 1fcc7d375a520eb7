#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "symslice/parser.hpp"

inline std::string fixture_path(const std::string& name) {
  return std::string(SYMSLICE_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline symslice::Module load_fixture(const std::string& name) {
  auto res = symslice::parse_module(read_file(fixture_path(name)));
  if (!res.ok()) throw std::runtime_error("fixture " + name + " failed to parse");
  return std::move(res.module);
}
