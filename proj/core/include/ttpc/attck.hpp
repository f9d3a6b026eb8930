#pragma once

#include <map>
#include <string>
#include <vector>

namespace ttpc {

// Adversary-tactic entry (TAxxxx).  The shortname is the kill-chain phase
// token techniques use to reference it (e.g. "execution").
struct Tactic {
    std::string stix_id;
    std::string external_id;
    std::string name;
    std::string shortname;
};

// A document citation attached to a technique.
struct Reference {
    std::string url;
    std::string source_name;
};

// Technique entry (Txxxx or sub-technique Txxxx.yyy) with its resolved
// tactic ids and external citations (the canonical self-link is excluded).
struct Technique {
    std::string stix_id;
    std::string external_id;
    std::string name;
    std::vector<std::string> tactic_refs;  // TAxxxx, sorted unique
    std::vector<Reference> references;
};

// Everything the pipeline needs from one knowledge-base snapshot: the live
// (non-revoked, non-deprecated) tactics and techniques, sorted by external
// id, with unique external ids.
struct KnowledgeBase {
    std::vector<Tactic> tactics;
    std::vector<Technique> techniques;
    std::string snapshot_version;

    // Lookup by external id; nullptr when absent.
    const Tactic* tactic(const std::string& external_id) const;
    const Technique* technique(const std::string& external_id) const;
};

// Parses a STIX 2.x bundle file (the enterprise-attack.json layout).
// Throws UsageError when the file cannot be read, ParseError (with byte
// offset) on malformed JSON, and DataError when no usable objects remain.
KnowledgeBase load_attack_snapshot(const std::string& path);

// Labels inherited by every document a technique cites.
struct LabelIndexEntry {
    std::vector<std::string> techniques;  // sorted unique
    std::vector<std::string> tactics;     // sorted unique
    std::string source_name;              // lexicographically first citer
};

// URL -> labels of all techniques citing it (tactics are the union of the
// citing techniques' tactic_refs).  With fold_subtechniques, Txxxx.yyy
// contributes its parent Txxxx instead, when the parent is in the knowledge
// base; orphan sub-techniques keep their own id.
using LabelIndex = std::map<std::string, LabelIndexEntry>;

LabelIndex build_label_index(const KnowledgeBase& kb,
                             bool fold_subtechniques = true);

}  // namespace ttpc
