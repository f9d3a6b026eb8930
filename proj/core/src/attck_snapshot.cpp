#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ttpc/attck.hpp"
#include "ttpc/errors.hpp"

namespace ttpc {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open snapshot file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool truthy_flag(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it != obj.end() && it->is_boolean() && it->get<bool>();
}

std::string string_field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return {};
    return it->get<std::string>();
}

// The canonical entry whose external_id names the object.
std::string mitre_external_id(const json& obj) {
    const auto refs = obj.find("external_references");
    if (refs == obj.end() || !refs->is_array()) return {};
    for (const json& ref : *refs) {
        if (!ref.is_object()) continue;
        if (string_field(ref, "source_name") == "mitre-attack") {
            return string_field(ref, "external_id");
        }
    }
    return {};
}

bool is_valid_url(const std::string& url) {
    std::string rest;
    if (url.rfind("https://", 0) == 0) {
        rest = url.substr(8);
    } else if (url.rfind("http://", 0) == 0) {
        rest = url.substr(7);
    } else {
        return false;
    }
    const std::size_t slash = rest.find('/');
    const std::string host = slash == std::string::npos ? rest : rest.substr(0, slash);
    return !host.empty();
}

template <typename T>
void sort_and_check_unique(std::vector<T>& items, const char* what) {
    std::sort(items.begin(), items.end(), [](const T& a, const T& b) {
        return a.external_id < b.external_id;
    });
    for (std::size_t i = 1; i < items.size(); ++i) {
        if (items[i].external_id == items[i - 1].external_id) {
            throw DataError(std::string("snapshot contains duplicate ") + what +
                            " external id '" + items[i].external_id + "'");
        }
    }
}

}  // namespace

const Tactic* KnowledgeBase::tactic(const std::string& external_id) const {
    const auto it = std::lower_bound(
        tactics.begin(), tactics.end(), external_id,
        [](const Tactic& t, const std::string& id) { return t.external_id < id; });
    if (it == tactics.end() || it->external_id != external_id) return nullptr;
    return &*it;
}

const Technique* KnowledgeBase::technique(const std::string& external_id) const {
    const auto it = std::lower_bound(
        techniques.begin(), techniques.end(), external_id,
        [](const Technique& t, const std::string& id) {
            return t.external_id < id;
        });
    if (it == techniques.end() || it->external_id != external_id) return nullptr;
    return &*it;
}

KnowledgeBase load_attack_snapshot(const std::string& path) {
    const std::string content = read_file(path);
    json bundle;
    try {
        bundle = json::parse(content);
    } catch (const json::parse_error& e) {
        throw ParseError("snapshot '" + path + "' is not valid JSON: " + e.what(),
                         e.byte);
    }

    if (!bundle.is_object() || !bundle.contains("objects") ||
        !bundle["objects"].is_array() || bundle["objects"].empty()) {
        throw DataError("snapshot '" + path + "' contains no STIX objects");
    }

    KnowledgeBase kb;
    std::map<std::string, std::string> shortname_to_id;
    // Techniques keep their raw kill-chain phase names until every tactic is
    // known, since object order in a bundle is arbitrary.
    std::vector<std::vector<std::string>> phase_names;

    for (const json& obj : bundle["objects"]) {
        if (!obj.is_object()) continue;
        const std::string type = string_field(obj, "type");
        if (type == "x-mitre-collection") {
            if (kb.snapshot_version.empty()) {
                kb.snapshot_version = string_field(obj, "x_mitre_version");
            }
            continue;
        }
        if (truthy_flag(obj, "revoked") || truthy_flag(obj, "x_mitre_deprecated")) {
            continue;
        }
        if (type == "x-mitre-tactic") {
            Tactic tactic;
            tactic.stix_id = string_field(obj, "id");
            tactic.name = string_field(obj, "name");
            tactic.shortname = string_field(obj, "x_mitre_shortname");
            tactic.external_id = mitre_external_id(obj);
            if (tactic.external_id.empty() || tactic.shortname.empty()) {
                throw DataError("tactic object '" + tactic.stix_id +
                                "' lacks a mitre-attack external id or shortname");
            }
            shortname_to_id[tactic.shortname] = tactic.external_id;
            kb.tactics.push_back(std::move(tactic));
        } else if (type == "attack-pattern") {
            Technique technique;
            technique.stix_id = string_field(obj, "id");
            technique.name = string_field(obj, "name");
            technique.external_id = mitre_external_id(obj);
            if (technique.external_id.empty()) {
                throw DataError("attack-pattern object '" + technique.stix_id +
                                "' lacks a mitre-attack external id");
            }
            std::vector<std::string> phases;
            const auto chain = obj.find("kill_chain_phases");
            if (chain != obj.end() && chain->is_array()) {
                for (const json& phase : *chain) {
                    if (!phase.is_object()) continue;
                    if (string_field(phase, "kill_chain_name") != "mitre-attack") {
                        continue;
                    }
                    const std::string name = string_field(phase, "phase_name");
                    if (!name.empty()) phases.push_back(name);
                }
            }
            const auto refs = obj.find("external_references");
            if (refs != obj.end() && refs->is_array()) {
                for (const json& ref : *refs) {
                    if (!ref.is_object()) continue;
                    const std::string source = string_field(ref, "source_name");
                    if (source == "mitre-attack") continue;  // self-link
                    const std::string url = string_field(ref, "url");
                    if (!is_valid_url(url)) continue;
                    technique.references.push_back({url, source});
                }
            }
            kb.techniques.push_back(std::move(technique));
            phase_names.push_back(std::move(phases));
        }
    }

    if (kb.tactics.empty()) {
        throw DataError("snapshot '" + path +
                        "' yields an empty knowledge base: no usable "
                        "x-mitre-tactic objects");
    }
    if (kb.techniques.empty()) {
        throw DataError("snapshot '" + path +
                        "' yields an empty knowledge base: no usable "
                        "attack-pattern objects");
    }

    for (std::size_t i = 0; i < kb.techniques.size(); ++i) {
        std::set<std::string> resolved;
        for (const std::string& phase : phase_names[i]) {
            const auto it = shortname_to_id.find(phase);
            if (it != shortname_to_id.end()) resolved.insert(it->second);
        }
        kb.techniques[i].tactic_refs.assign(resolved.begin(), resolved.end());
    }

    sort_and_check_unique(kb.tactics, "tactic");
    sort_and_check_unique(kb.techniques, "technique");
    if (kb.snapshot_version.empty()) {
        kb.snapshot_version = string_field(bundle, "id");
    }
    if (kb.snapshot_version.empty()) {
        kb.snapshot_version = "unknown";
    }
    return kb;
}

LabelIndex build_label_index(const KnowledgeBase& kb, bool fold_subtechniques) {
    LabelIndex index;
    for (const Technique& technique : kb.techniques) {
        std::string label = technique.external_id;
        if (fold_subtechniques) {
            const std::size_t dot = label.find('.');
            if (dot != std::string::npos &&
                kb.technique(label.substr(0, dot)) != nullptr) {
                label = label.substr(0, dot);
            }
        }
        for (const Reference& ref : technique.references) {
            LabelIndexEntry& entry = index[ref.url];
            entry.techniques.push_back(label);
            if (!ref.source_name.empty() &&
                (entry.source_name.empty() ||
                 ref.source_name < entry.source_name)) {
                entry.source_name = ref.source_name;
            }
        }
    }
    for (auto& [url, entry] : index) {
        std::sort(entry.techniques.begin(), entry.techniques.end());
        entry.techniques.erase(
            std::unique(entry.techniques.begin(), entry.techniques.end()),
            entry.techniques.end());
        std::set<std::string> tactics;
        for (const std::string& id : entry.techniques) {
            const Technique* technique = kb.technique(id);
            if (technique == nullptr) continue;  // unreachable by construction
            tactics.insert(technique->tactic_refs.begin(),
                           technique->tactic_refs.end());
        }
        entry.tactics.assign(tactics.begin(), tactics.end());
    }
    return index;
}

}  // namespace ttpc
