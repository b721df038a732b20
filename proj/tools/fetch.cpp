#include "fetch.hpp"

#include "iwmc/data.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>

namespace iwmc::cli {

namespace {

std::size_t write_body(char* data, std::size_t size, std::size_t count, void* user) {
    auto* out = static_cast<std::ofstream*>(user);
    out->write(data, static_cast<std::streamsize>(size * count));
    return out->good() ? size * count : 0;
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw DataError("sha256: init failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string fetch(const std::string& url, const std::filesystem::path& dest,
                  const std::optional<std::string>& expected_sha256) {
    const std::filesystem::path tmp = dest.string() + ".part";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write " + tmp.string());
        std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
        if (!curl) throw DataError("fetch: curl initialization failed");
        char err[CURL_ERROR_SIZE] = {0};
        curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
        curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
        curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
        curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, write_body);
        curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &out);
        curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, err);
        const CURLcode rc = curl_easy_perform(curl.get());
        out.close();
        if (rc != CURLE_OK) {
            std::filesystem::remove(tmp);
            throw DataError("fetch: " + std::string(err[0] ? err : curl_easy_strerror(rc)));
        }
    }
    const std::string digest = sha256_file(tmp);
    if (expected_sha256 && lowercase(*expected_sha256) != digest) {
        std::filesystem::remove(tmp);
        throw DataError("fetch: sha256 mismatch (expected " + *expected_sha256 + ", got " + digest + ")");
    }
    std::filesystem::rename(tmp, dest);
    return digest;
}

}  // namespace iwmc::cli
