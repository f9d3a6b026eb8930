#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ttpc/attck.hpp"

namespace ttpc {

enum class MediaType { html, pdf, plaintext };
enum class FetchStatus { ok, missing, failed };

std::string to_string(MediaType type);
MediaType media_type_from_string(const std::string& name);
std::string to_string(FetchStatus status);
FetchStatus fetch_status_from_string(const std::string& name);

// One harvested (or unharvestable) document.  content_digest is the SHA-256
// of the payload and is non-empty exactly when fetch_status == ok.
struct RawDocument {
    std::string url;
    MediaType media_type = MediaType::html;
    std::string content_digest;
    FetchStatus fetch_status = FetchStatus::missing;
    std::string source_name;
};

// Minimal fetch abstraction so tests can fake the network and offline runs
// can prove no network access happens.
struct FetchResult {
    bool ok = false;
    std::string body;
    std::string content_type;  // e.g. "text/html"; may be empty
};

class Transport {
  public:
    virtual ~Transport() = default;
    virtual FetchResult fetch(const std::string& url) = 0;
};

// HTTP(S) transport used for online harvesting.
std::unique_ptr<Transport> make_http_transport();

enum class HarvestMode { offline, online };

// Resolves every indexed URL against the cache directory (offline) or the
// network via `transport` (online; fetched payloads are written back to the
// cache).  Returns one RawDocument per URL, sorted by URL, and rewrites
// manifest.jsonl sorted the same way.  Offline mode never touches
// `transport` and throws DataError when the cache has no manifest.
std::vector<RawDocument> harvest_documents(const LabelIndex& index,
                                           const std::string& cache_dir,
                                           HarvestMode mode,
                                           Transport* transport = nullptr);

// Extracts readable text from a fetched payload.  HTML is reduced to its
// visible text with script/style/nav and similar containers removed and
// paragraphs separated by blank lines; plaintext passes through unchanged.
// Throws DataError for payloads that are not valid UTF-8 and for PDF
// documents, whose text must come from a cache sidecar (see
// load_document_text).
std::string extract_text(const RawDocument& doc, const std::string& payload);

// Reads a harvested document's text from the cache: the payload file
// "<digest>.<ext>" for HTML and plaintext, or the pre-extracted
// "<digest>.pdf.txt" sidecar for PDFs (DataError when the sidecar is
// absent).
std::string load_document_text(const std::string& cache_dir,
                               const RawDocument& doc);

// Payload filename for a cache entry ("<digest>.html", ".txt", or ".pdf").
std::string payload_filename(const RawDocument& doc);

// True when `data` is well-formed UTF-8 (rejecting overlong encodings,
// surrogates, and out-of-range code points).
bool is_valid_utf8(const std::string& data);

}  // namespace ttpc
