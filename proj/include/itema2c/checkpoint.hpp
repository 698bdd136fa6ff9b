#pragma once

// Version-tagged text container: store name -> parameter name -> shape ->
// values. Values are written as hexadecimal floats so a save/load round trip
// is bit-exact.
//
//   itema2c-checkpoint 1
//   stores <count>
//   store <name> <param count>
//   param <name> <rows> <cols>
//   <rows lines of cols hex floats>

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "itema2c/nn.hpp"

namespace itema2c::nn {

inline constexpr int kCheckpointVersion = 1;

using NamedStores = std::vector<std::pair<std::string, const ParameterStore*>>;

void save_checkpoint(std::ostream& out, const NamedStores& stores);
void save_checkpoint_file(const std::string& path, const NamedStores& stores);

// Throws std::runtime_error on a malformed container or version mismatch.
std::map<std::string, ParameterStore> load_checkpoint(std::istream& in);
std::map<std::string, ParameterStore> load_checkpoint_file(const std::string& path);

}  // namespace itema2c::nn
