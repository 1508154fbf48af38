// Copyright (c) 2026 the tesim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TESIM_CRYPTO_HPP
#define TESIM_CRYPTO_HPP

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "tesim/bytes.hpp"

namespace tesim {

using Hash32 = std::array<std::uint8_t, 32>;

inline Hash32 sha256(const std::uint8_t* data, std::size_t len) {
  Hash32 out{};
  unsigned int out_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("sha256: ctx alloc failed");
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
            EVP_DigestUpdate(ctx, data, len) == 1 &&
            EVP_DigestFinal_ex(ctx, out.data(), &out_len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok || out_len != out.size()) throw std::runtime_error("sha256: digest failed");
  return out;
}

inline Hash32 sha256(const Bytes& data) { return sha256(data.data(), data.size()); }

inline Bytes hmac_sha256(const Bytes& key, const Bytes& message) {
  std::array<std::uint8_t, 32> out{};
  unsigned int out_len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(),
           message.size(), out.data(), &out_len) == nullptr ||
      out_len != out.size()) {
    throw std::runtime_error("hmac_sha256 failed");
  }
  return Bytes(out.begin(), out.end());
}

inline std::string hash_hex(const Hash32& h) { return to_hex(Bytes(h.begin(), h.end())); }

inline Bytes hash_bytes(const Hash32& h) { return Bytes(h.begin(), h.end()); }

// Signature scheme used by ledger transactions and consensus messages.
// The interface mirrors an asymmetric scheme (sign with a private key,
// verify against a public key); the default implementation is a keyed hash
// where the "public key" is a commitment to the signing key. Real ECDSA can
// be dropped in behind the same interface without touching callers.
class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;
  virtual Bytes sign(const Bytes& private_key, const Bytes& message) const = 0;
  virtual bool verify(const Bytes& public_key, const Bytes& message,
                      const Bytes& signature) const = 0;
  virtual Bytes derive_public(const Bytes& private_key) const = 0;
};

class HmacSignatureScheme final : public SignatureScheme {
 public:
  Bytes sign(const Bytes& private_key, const Bytes& message) const override {
    return hmac_sha256(private_key, message);
  }

  // Verification recovers nothing; it recomputes the tag from the key
  // commitment preimage registry. For a simulation every node knows the key
  // table, so the check binds signature to (key, message) exactly as a real
  // scheme would for honest and equivocating signers alike.
  bool verify(const Bytes& public_key, const Bytes& message,
              const Bytes& signature) const override {
    // public key = sha256(private key); the simulation's key table maps the
    // commitment back to the signing key.
    auto it = key_table().find(to_hex(public_key));
    if (it == key_table().end()) return false;
    Bytes expect = hmac_sha256(it->second, message);
    return expect == signature;
  }

  Bytes derive_public(const Bytes& private_key) const override {
    Hash32 h = sha256(private_key);
    Bytes pub(h.begin(), h.end());
    key_table()[to_hex(pub)] = private_key;
    return pub;
  }

 private:
  static std::map<std::string, Bytes>& key_table() {
    static std::map<std::string, Bytes> table;
    return table;
  }
};

inline const SignatureScheme& default_signature_scheme() {
  static HmacSignatureScheme scheme;
  return scheme;
}

// Deterministic key material for simulated identities.
inline Bytes private_key_for(const std::string& identity) {
  Bytes seed(identity.begin(), identity.end());
  seed.push_back(0x1f);
  Hash32 h = sha256(seed);
  return Bytes(h.begin(), h.end());
}

}  // namespace tesim

#endif  // TESIM_CRYPTO_HPP
