#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"
#include "ttpc/digest.hpp"
#include "ttpc/errors.hpp"
#include "ttpc/harvest.hpp"

namespace fs = std::filesystem;

namespace ttpc {
namespace {

struct ManifestEntry {
    std::string url;
    MediaType media_type = MediaType::html;
    std::string digest;
    FetchStatus status = FetchStatus::missing;
    std::string source_name;
};

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Media type from the URL's path extension; query and fragment ignored.
MediaType media_type_from_url(const std::string& url) {
    std::string path = url;
    const std::size_t cut = path.find_first_of("?#");
    if (cut != std::string::npos) path.resize(cut);
    path = lowercase(path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pdf") == 0) {
        return MediaType::pdf;
    }
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".txt") == 0) {
        return MediaType::plaintext;
    }
    return MediaType::html;
}

MediaType media_type_from_response(const std::string& content_type,
                                   const std::string& url) {
    const std::string ct = lowercase(content_type);
    if (ct.find("pdf") != std::string::npos) return MediaType::pdf;
    if (ct.find("text/plain") != std::string::npos) return MediaType::plaintext;
    if (ct.find("html") != std::string::npos) return MediaType::html;
    return media_type_from_url(url);
}

std::map<std::string, ManifestEntry> read_manifest(const fs::path& path) {
    std::map<std::string, ManifestEntry> entries;
    std::ifstream in(path, std::ios::binary);
    if (!in) return entries;
    std::string line;
    std::size_t line_start = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t this_start = line_start;
        line_start += line.size() + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("manifest line " + std::to_string(line_no) +
                                 " is not valid JSON: " + e.what(),
                             this_start + e.byte);
        }
        if (!obj.is_object() || !obj.contains("url") || !obj["url"].is_string()) {
            throw DataError("manifest line " + std::to_string(line_no) +
                            " has no url field");
        }
        ManifestEntry entry;
        entry.url = obj["url"].get<std::string>();
        entry.media_type =
            media_type_from_string(obj.value("media_type", "html"));
        entry.digest = obj.value("digest", "");
        entry.status = fetch_status_from_string(obj.value("status", "missing"));
        entry.source_name = obj.value("source_name", "");
        entries[entry.url] = std::move(entry);
    }
    return entries;
}

void write_manifest(const fs::path& path,
                    const std::map<std::string, ManifestEntry>& entries) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw UsageError("cannot write manifest '" + path.string() + "'");
    }
    for (const auto& [url, entry] : entries) {
        nlohmann::ordered_json obj;
        obj["url"] = entry.url;
        obj["media_type"] = to_string(entry.media_type);
        obj["digest"] = entry.digest;
        obj["status"] = to_string(entry.status);
        obj["source_name"] = entry.source_name;
        out << obj.dump() << '\n';
    }
}

RawDocument document_from_entry(const ManifestEntry& entry,
                                const std::string& source_name) {
    RawDocument doc;
    doc.url = entry.url;
    doc.media_type = entry.media_type;
    doc.fetch_status = entry.status;
    doc.content_digest = entry.status == FetchStatus::ok ? entry.digest : "";
    doc.source_name = source_name;
    return doc;
}

std::string read_file_or_throw(const fs::path& path, const std::string& url) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cache payload missing for '" + url + "' (expected " +
                        path.string() + ")");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

class HttpTransport : public Transport {
  public:
    FetchResult fetch(const std::string& url) override {
        FetchResult result;
        std::string scheme_host, path;
        if (!split_url(url, scheme_host, path)) return result;
        try {
            httplib::Client client(scheme_host);
            client.set_follow_location(true);
            client.set_connection_timeout(10);
            client.set_read_timeout(30);
            const httplib::Result res = client.Get(path);
            if (!res || res->status < 200 || res->status >= 300) return result;
            result.ok = true;
            result.body = res->body;
            result.content_type = res->get_header_value("Content-Type");
        } catch (...) {
            result.ok = false;
        }
        return result;
    }

  private:
    static bool split_url(const std::string& url, std::string& scheme_host,
                          std::string& path) {
        std::size_t scheme_end = url.find("://");
        if (scheme_end == std::string::npos) return false;
        const std::size_t host_start = scheme_end + 3;
        const std::size_t path_start = url.find('/', host_start);
        if (path_start == std::string::npos) {
            scheme_host = url;
            path = "/";
        } else {
            scheme_host = url.substr(0, path_start);
            path = url.substr(path_start);
        }
        return host_start < url.size() && url[host_start] != '/';
    }
};

}  // namespace

std::string to_string(MediaType type) {
    switch (type) {
        case MediaType::html: return "html";
        case MediaType::pdf: return "pdf";
        case MediaType::plaintext: return "plaintext";
    }
    throw InternalError("unhandled media type");
}

MediaType media_type_from_string(const std::string& name) {
    if (name == "html") return MediaType::html;
    if (name == "pdf") return MediaType::pdf;
    if (name == "plaintext") return MediaType::plaintext;
    throw DataError("unknown media type '" + name + "'");
}

std::string to_string(FetchStatus status) {
    switch (status) {
        case FetchStatus::ok: return "ok";
        case FetchStatus::missing: return "missing";
        case FetchStatus::failed: return "failed";
    }
    throw InternalError("unhandled fetch status");
}

FetchStatus fetch_status_from_string(const std::string& name) {
    if (name == "ok") return FetchStatus::ok;
    if (name == "missing") return FetchStatus::missing;
    if (name == "failed") return FetchStatus::failed;
    throw DataError("unknown fetch status '" + name + "'");
}

std::string payload_filename(const RawDocument& doc) {
    switch (doc.media_type) {
        case MediaType::html: return doc.content_digest + ".html";
        case MediaType::plaintext: return doc.content_digest + ".txt";
        case MediaType::pdf: return doc.content_digest + ".pdf";
    }
    throw InternalError("unhandled media type");
}

std::unique_ptr<Transport> make_http_transport() {
    return std::make_unique<HttpTransport>();
}

std::vector<RawDocument> harvest_documents(const LabelIndex& index,
                                           const std::string& cache_dir,
                                           HarvestMode mode,
                                           Transport* transport) {
    const fs::path dir(cache_dir);
    const fs::path manifest_path = dir / "manifest.jsonl";

    if (mode == HarvestMode::offline && !fs::exists(manifest_path)) {
        throw DataError("offline harvest requires a cache manifest at '" +
                        manifest_path.string() + "'");
    }
    std::map<std::string, ManifestEntry> entries = read_manifest(manifest_path);

    std::unique_ptr<Transport> default_transport;
    if (mode == HarvestMode::online) {
        fs::create_directories(dir);
        if (transport == nullptr) {
            default_transport = make_http_transport();
            transport = default_transport.get();
        }
    }

    std::vector<RawDocument> documents;
    documents.reserve(index.size());
    for (const auto& [url, label_entry] : index) {
        const auto it = entries.find(url);
        const bool cached_ok =
            it != entries.end() && it->second.status == FetchStatus::ok &&
            fs::exists(dir / payload_filename(
                                 document_from_entry(it->second, "")));

        if (cached_ok) {
            documents.push_back(
                document_from_entry(it->second, label_entry.source_name));
            continue;
        }
        if (mode == HarvestMode::offline) {
            // A recorded failure stays a failure; anything else is a miss.
            RawDocument doc;
            doc.url = url;
            doc.source_name = label_entry.source_name;
            doc.media_type = it != entries.end() ? it->second.media_type
                                                 : media_type_from_url(url);
            doc.fetch_status = (it != entries.end() &&
                                it->second.status == FetchStatus::failed)
                                   ? FetchStatus::failed
                                   : FetchStatus::missing;
            documents.push_back(std::move(doc));
            continue;
        }

        const FetchResult fetched = transport->fetch(url);
        ManifestEntry entry;
        entry.url = url;
        entry.source_name = label_entry.source_name;
        if (fetched.ok) {
            entry.status = FetchStatus::ok;
            entry.media_type = media_type_from_response(fetched.content_type, url);
            entry.digest = sha256_hex(fetched.body);
            RawDocument doc = document_from_entry(entry, label_entry.source_name);
            std::ofstream out(dir / payload_filename(doc),
                              std::ios::binary | std::ios::trunc);
            if (!out) {
                throw UsageError("cannot write cache payload for '" + url + "'");
            }
            out << fetched.body;
        } else {
            entry.status = FetchStatus::failed;
            entry.media_type = media_type_from_url(url);
        }
        entries[url] = entry;
        documents.push_back(document_from_entry(entry, label_entry.source_name));
    }

    if (mode == HarvestMode::online) {
        write_manifest(manifest_path, entries);
    }
    return documents;
}

bool is_valid_utf8(const std::string& data) {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data.data());
    std::size_t i = 0;
    const std::size_t n = data.size();
    while (i < n) {
        const unsigned char c = bytes[i];
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t extra;
        std::uint32_t cp;
        if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= n) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            if ((bytes[i + k] & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (bytes[i + k] & 0x3F);
        }
        // Overlong encodings, UTF-16 surrogates, and > U+10FFFF are invalid.
        static constexpr std::uint32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMin[extra] || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += extra + 1;
    }
    return true;
}

std::string load_document_text(const std::string& cache_dir,
                               const RawDocument& doc) {
    if (doc.fetch_status != FetchStatus::ok) {
        throw DataError("document '" + doc.url + "' was not fetched");
    }
    const fs::path dir(cache_dir);
    if (doc.media_type == MediaType::pdf) {
        const fs::path sidecar = dir / (doc.content_digest + ".pdf.txt");
        std::ifstream in(sidecar, std::ios::binary);
        if (!in) {
            throw DataError("pdf text sidecar required for '" + doc.url + "'");
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        std::string text = buffer.str();
        if (!is_valid_utf8(text)) {
            throw DataError("document '" + doc.url +
                            "' has a sidecar that is not valid UTF-8");
        }
        return text;
    }
    const std::string payload =
        read_file_or_throw(dir / payload_filename(doc), doc.url);
    return extract_text(doc, payload);
}

}  // namespace ttpc
