// Copyright 2026 The ibsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IBSPLIT_SIM_WIRE_HPP_
#define IBSPLIT_SIM_WIRE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "ibsplit/cascade/cascade.hpp"

namespace ibsplit::sim {

/// Message layout (little-endian, bit-exact):
///   [1 byte mode tag: 0 = informative, 1 = compressed]
///   [4 byte u32 element count]
///   [count x 4 byte IEEE-754 float payload]
struct WireMessage {
  cascade::Mode mode = cascade::Mode::kInformative;
  std::vector<float> payload;
};

std::vector<std::uint8_t> encode_message(cascade::Mode mode,
                                         const Eigen::VectorXd& latent);

/// Inverse of encode_message; rejects bad tags, truncated buffers and length
/// mismatches.
WireMessage decode_message(const std::vector<std::uint8_t>& bytes);

/// Latent payload size on the wire: dimension x 4 bytes (excludes the 5-byte
/// message header; byte accounting in traces counts payload only).
std::size_t payload_bytes(cascade::Mode mode, const cascade::CascadeModel& model);

}  // namespace ibsplit::sim

#endif  // IBSPLIT_SIM_WIRE_HPP_
