#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ttpc {

/// Hex-encoded SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Raw SHA-1 digest (used only for version-5 UUID derivation).
std::array<std::uint8_t, 20> sha1_bytes(std::string_view data);

/// Incremental SHA-256, for digesting fitted state piecewise.
class Sha256Stream {
public:
    Sha256Stream();
    ~Sha256Stream();
    Sha256Stream(const Sha256Stream&) = delete;
    Sha256Stream& operator=(const Sha256Stream&) = delete;

    void update(std::string_view data);
    void update_double(double v);
    std::string hex();  // finalizes; further updates are invalid

private:
    void* ctx_ = nullptr;
};

}  // namespace ttpc
