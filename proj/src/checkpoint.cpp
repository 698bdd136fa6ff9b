#include "itema2c/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace itema2c::nn {

namespace {

constexpr const char* kMagic = "itema2c-checkpoint";

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

void expect(std::istream& in, const std::string& word) {
  std::string got;
  if (!(in >> got) || got != word) {
    throw std::runtime_error("checkpoint: expected '" + word + "', found '" + got + "'");
  }
}

}  // namespace

void save_checkpoint(std::ostream& out, const NamedStores& stores) {
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "stores " << stores.size() << '\n';
  for (const auto& [store_name, store] : stores) {
    out << "store " << store_name << ' ' << store->size() << '\n';
    for (const auto& name : store->names()) {
      const auto& v = store->value(name);
      out << "param " << name << ' ' << v.rows() << ' ' << v.cols() << '\n';
      for (Index r = 0; r < v.rows(); ++r) {
        for (Index c = 0; c < v.cols(); ++c) out << (c ? " " : "") << hex(v(r, c));
        out << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

void save_checkpoint_file(const std::string& path, const NamedStores& stores) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  save_checkpoint(out, stores);
}

std::map<std::string, ParameterStore> load_checkpoint(std::istream& in) {
  expect(in, kMagic);
  int version = 0;
  if (!(in >> version) || version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  expect(in, "stores");
  std::size_t n_stores = 0;
  if (!(in >> n_stores)) throw std::runtime_error("checkpoint: bad store count");

  std::map<std::string, ParameterStore> out;
  for (std::size_t s = 0; s < n_stores; ++s) {
    expect(in, "store");
    std::string store_name;
    std::size_t n_params = 0;
    if (!(in >> store_name >> n_params)) throw std::runtime_error("checkpoint: bad store header");
    ParameterStore store;
    for (std::size_t p = 0; p < n_params; ++p) {
      expect(in, "param");
      std::string name;
      Index rows = 0;
      Index cols = 0;
      if (!(in >> name >> rows >> cols)) throw std::runtime_error("checkpoint: bad parameter header");
      auto& value = store.add(name, rows, cols).value;
      std::string token;
      for (Index i = 0; i < rows * cols; ++i) {
        if (!(in >> token)) throw std::runtime_error("checkpoint: truncated values for " + name);
        char* end = nullptr;
        value.data()[i] = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') throw std::runtime_error("checkpoint: bad value '" + token + "'");
      }
    }
    out.emplace(store_name, std::move(store));
  }
  return out;
}

std::map<std::string, ParameterStore> load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  return load_checkpoint(in);
}

}  // namespace itema2c::nn
