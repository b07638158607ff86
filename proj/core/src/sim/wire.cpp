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

#include "ibsplit/sim/wire.hpp"

#include <bit>
#include <cstring>

#include "ibsplit/common/error.hpp"

namespace ibsplit::sim {

namespace {

constexpr std::size_t kHeaderBytes = 5;

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_message(cascade::Mode mode,
                                         const Eigen::VectorXd& latent) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + static_cast<std::size_t>(latent.size()) * 4);
  out.push_back(mode == cascade::Mode::kInformative ? 0 : 1);
  put_u32_le(out, static_cast<std::uint32_t>(latent.size()));
  for (Eigen::Index i = 0; i < latent.size(); ++i) {
    const auto f = static_cast<float>(latent(i));
    put_u32_le(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

WireMessage decode_message(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw DataError("wire message truncated: " + std::to_string(bytes.size()) +
                    " bytes, header needs " + std::to_string(kHeaderBytes));
  }
  WireMessage msg;
  if (bytes[0] == 0) {
    msg.mode = cascade::Mode::kInformative;
  } else if (bytes[0] == 1) {
    msg.mode = cascade::Mode::kCompressed;
  } else {
    throw DataError("wire message has unknown mode tag " +
                    std::to_string(static_cast<int>(bytes[0])));
  }
  const std::uint32_t count = get_u32_le(bytes.data() + 1);
  if (bytes.size() != kHeaderBytes + static_cast<std::size_t>(count) * 4) {
    throw DataError("wire message length mismatch: header says " +
                    std::to_string(count) + " floats, body has " +
                    std::to_string(bytes.size() - kHeaderBytes) + " bytes");
  }
  msg.payload.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t raw =
        get_u32_le(bytes.data() + kHeaderBytes + static_cast<std::size_t>(i) * 4);
    msg.payload[i] = std::bit_cast<float>(raw);
  }
  return msg;
}

std::size_t payload_bytes(cascade::Mode mode,
                          const cascade::CascadeModel& model) {
  return model.latent_dim(mode) * 4;
}

}  // namespace ibsplit::sim
