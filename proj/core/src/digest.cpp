#include "ttpc/digest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstring>

#include "ttpc/errors.hpp"

namespace ttpc {

namespace {

std::string to_hex(const unsigned char* bytes, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out(n * 2, '0');
    for (std::size_t i = 0; i < n; ++i) {
        out[2 * i] = digits[bytes[i] >> 4];
        out[2 * i + 1] = digits[bytes[i] & 0xf];
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw InternalError("sha256 digest failed");
    return to_hex(md, len);
}

std::array<std::uint8_t, 20> sha1_bytes(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) || len != 20)
        throw InternalError("sha1 digest failed");
    std::array<std::uint8_t, 20> out{};
    std::memcpy(out.data(), md, 20);
    return out;
}

Sha256Stream::Sha256Stream() {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || !EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr))
        throw InternalError("sha256 init failed");
    ctx_ = ctx;
}

Sha256Stream::~Sha256Stream() {
    if (ctx_) EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_));
}

void Sha256Stream::update(std::string_view data) {
    if (!EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size()))
        throw InternalError("sha256 update failed");
}

void Sha256Stream::update_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g;", v);
    update(buf);
}

std::string Sha256Stream::hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), md, &len))
        throw InternalError("sha256 final failed");
    return to_hex(md, len);
}

}  // namespace ttpc
