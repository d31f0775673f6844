#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "v2x/dqn.hpp"

namespace v2x {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Binary Q-network file:
///   "V2XQNET\0" | u32 version | u32 len + layout tag | u32 count + u64 layer sizes |
///   per layer: weights row-major, then bias; every value a little-endian IEEE-754 float64.
/// All integers are little-endian.
void save_checkpoint(const std::string& path, const dqn::QNetwork<double>& net, const std::string& layout);

/// Rejects files whose layer sizes or action layout differ from the expected ones.
dqn::QNetwork<double> load_checkpoint(const std::string& path, const std::vector<int>& expected_sizes,
                                      const std::string& expected_layout);

}  // namespace v2x
