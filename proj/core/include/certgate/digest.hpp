#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace certgate {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::string_view data);

// Keyed authenticator (HMAC-SHA256) over a canonical byte string.
Digest hmac_sha256(std::string_view key, std::string_view data);

std::string to_hex(const Digest& d);
Digest from_hex(std::string_view hex);

inline Digest zero_digest() { return Digest{}; }

// Hash commitment to an evidence payload, used for selective disclosure.
// The committed string is prefixed so commitments are domain-separated
// from trace hashes.
Digest commit_payload(std::string_view payload);
bool verify_commitment(std::string_view payload, const Digest& commitment);

}  // namespace certgate
