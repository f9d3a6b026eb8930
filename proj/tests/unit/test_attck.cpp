#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ttpc/attck.hpp"
#include "ttpc/errors.hpp"

using namespace ttpc;

namespace {

const std::string kFixtures = TTPC_FIXTURE_DIR;

// Writes `content` to a throwaway file and removes it on scope exit.
struct ScratchFile {
    std::string path;
    explicit ScratchFile(const std::string& content, const char* tag) {
        path = "scratch_attck_" + std::string(tag) + ".json";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
    }
    ~ScratchFile() { std::remove(path.c_str()); }
};

// Minimal bundle with one tactic and one technique, used as a base for the
// error-path variants below.
std::string bundle_with_objects(const std::string& objects_json) {
    return R"({"type":"bundle","id":"bundle--0","objects":[)" + objects_json +
           "]}";
}

const char* kOneTactic = R"({
  "type": "x-mitre-tactic", "id": "x-mitre-tactic--1", "name": "Execution",
  "x_mitre_shortname": "execution",
  "external_references": [{"source_name": "mitre-attack", "external_id": "TA0002"}]
})";

const char* kOneTechnique = R"({
  "type": "attack-pattern", "id": "attack-pattern--1", "name": "Scripting",
  "kill_chain_phases": [{"kill_chain_name": "mitre-attack", "phase_name": "execution"}],
  "external_references": [{"source_name": "mitre-attack", "external_id": "T1059"}]
})";

}  // namespace

TEST_CASE("tiny snapshot loads the expected knowledge base") {
    const KnowledgeBase kb =
        load_attack_snapshot(kFixtures + "/attack_tiny.json");

    CHECK(kb.snapshot_version == "17.1-test");

    REQUIRE(kb.tactics.size() == 2);
    CHECK(kb.tactics[0].external_id == "TA0002");
    CHECK(kb.tactics[0].name == "Execution");
    CHECK(kb.tactics[0].shortname == "execution");
    CHECK(kb.tactics[1].external_id == "TA0005");
    CHECK(kb.tactics[1].shortname == "defense-evasion");

    // Revoked T9999 and deprecated T9998 are excluded before anything else
    // is read from them; the three live techniques come back sorted.
    REQUIRE(kb.techniques.size() == 3);
    CHECK(kb.techniques[0].external_id == "T1027");
    CHECK(kb.techniques[1].external_id == "T1059");
    CHECK(kb.techniques[2].external_id == "T1204");
    CHECK(kb.technique("T9999") == nullptr);
    CHECK(kb.technique("T9998") == nullptr);

    const Technique* t1059 = kb.technique("T1059");
    REQUIRE(t1059 != nullptr);
    CHECK(t1059->name == "Command and Scripting Interpreter");
    CHECK(t1059->tactic_refs == std::vector<std::string>{"TA0002"});
    // The mitre-attack self-link and the url-less citation are both dropped.
    REQUIRE(t1059->references.size() == 1);
    CHECK(t1059->references[0].url == "https://example.com/report-a");
    CHECK(t1059->references[0].source_name == "Alpha Report");

    // Unknown phase names and non-mitre kill chains resolve to nothing; the
    // ftp:// citation is not a fetchable reference.
    const Technique* t1027 = kb.technique("T1027");
    REQUIRE(t1027 != nullptr);
    CHECK(t1027->tactic_refs == std::vector<std::string>{"TA0005"});
    REQUIRE(t1027->references.size() == 1);
    CHECK(t1027->references[0].url == "https://example.com/report-b");

    const Tactic* ta0002 = kb.tactic("TA0002");
    REQUIRE(ta0002 != nullptr);
    CHECK(ta0002->name == "Execution");
    CHECK(kb.tactic("TA9999") == nullptr);
}

TEST_CASE("label index groups techniques by citation url") {
    const KnowledgeBase kb =
        load_attack_snapshot(kFixtures + "/attack_tiny.json");
    const LabelIndex index = build_label_index(kb);

    // report-c was only cited by excluded techniques, so it never appears.
    REQUIRE(index.size() == 2);

    const auto a = index.find("https://example.com/report-a");
    REQUIRE(a != index.end());
    CHECK(a->second.techniques == std::vector<std::string>{"T1059", "T1204"});
    CHECK(a->second.tactics == std::vector<std::string>{"TA0002"});
    // Two sources cite report-a; the lexicographically first one wins.
    CHECK(a->second.source_name == "Alpha Report");

    const auto b = index.find("https://example.com/report-b");
    REQUIRE(b != index.end());
    CHECK(b->second.techniques == std::vector<std::string>{"T1027"});
    CHECK(b->second.tactics == std::vector<std::string>{"TA0005"});
    CHECK(b->second.source_name == "Gamma Analysis");
}

TEST_CASE("sub-techniques fold into their parent when it exists") {
    const KnowledgeBase kb = load_attack_snapshot(kFixtures + "/attack_sub.json");
    CHECK(kb.snapshot_version == "sub-test");
    REQUIRE(kb.techniques.size() == 3);

    const LabelIndex folded = build_label_index(kb, true);
    REQUIRE(folded.size() == 2);
    const auto s = folded.find("https://example.com/report-s");
    REQUIRE(s != folded.end());
    // T1059.001 folds into T1059 and the two citations merge.
    CHECK(s->second.techniques == std::vector<std::string>{"T1059"});
    CHECK(s->second.tactics == std::vector<std::string>{"TA0002"});
    CHECK(s->second.source_name == "Parent Source");

    // T1234.001 has no parent in the snapshot, so it keeps its own id.
    const auto o = folded.find("https://example.com/report-o");
    REQUIRE(o != folded.end());
    CHECK(o->second.techniques == std::vector<std::string>{"T1234.001"});
    CHECK(o->second.tactics == std::vector<std::string>{"TA0002"});

    const LabelIndex unfolded = build_label_index(kb, false);
    const auto u = unfolded.find("https://example.com/report-s");
    REQUIRE(u != unfolded.end());
    CHECK(u->second.techniques ==
          std::vector<std::string>{"T1059", "T1059.001"});
}

TEST_CASE("snapshot loading rejects unusable inputs") {
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_attack_snapshot("no_such_snapshot.json"),
                        UsageError);
    }
    SUBCASE("malformed json carries a byte offset") {
        const ScratchFile f("{\"objects\": [", "malformed");
        try {
            load_attack_snapshot(f.path);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.byte_offset() > 0);
            CHECK(std::string(e.what()).find("not valid JSON") !=
                  std::string::npos);
        }
    }
    SUBCASE("no objects array") {
        const ScratchFile f(R"({"type":"bundle","objects":[]})", "empty");
        CHECK_THROWS_WITH_AS(load_attack_snapshot(f.path),
                             doctest::Contains("contains no STIX objects"),
                             DataError);
    }
    SUBCASE("tactics but no techniques") {
        const ScratchFile f(bundle_with_objects(kOneTactic), "notech");
        CHECK_THROWS_WITH_AS(load_attack_snapshot(f.path),
                             doctest::Contains("no usable attack-pattern"),
                             DataError);
    }
    SUBCASE("techniques but no tactics") {
        const ScratchFile f(bundle_with_objects(kOneTechnique), "notac");
        CHECK_THROWS_WITH_AS(load_attack_snapshot(f.path),
                             doctest::Contains("no usable x-mitre-tactic"),
                             DataError);
    }
    SUBCASE("duplicate external ids") {
        const ScratchFile f(
            bundle_with_objects(std::string(kOneTactic) + "," + kOneTechnique +
                                "," + kOneTechnique),
            "dup");
        CHECK_THROWS_WITH_AS(load_attack_snapshot(f.path),
                             doctest::Contains("duplicate technique"),
                             DataError);
    }
    SUBCASE("technique without an external id") {
        const ScratchFile f(
            bundle_with_objects(
                std::string(kOneTactic) +
                R"(,{"type":"attack-pattern","id":"attack-pattern--x","name":"Anon"})"),
            "noid");
        CHECK_THROWS_AS(load_attack_snapshot(f.path), DataError);
    }
}

TEST_CASE("snapshot version falls back to bundle id then to unknown") {
    const std::string objects =
        std::string(kOneTactic) + "," + kOneTechnique;
    SUBCASE("bundle id") {
        const ScratchFile f(
            R"({"type":"bundle","id":"bundle--fallback","objects":[)" +
                objects + "]}",
            "bid");
        CHECK(load_attack_snapshot(f.path).snapshot_version ==
              "bundle--fallback");
    }
    SUBCASE("unknown") {
        const ScratchFile f(R"({"type":"bundle","objects":[)" + objects + "]}",
                            "nover");
        CHECK(load_attack_snapshot(f.path).snapshot_version == "unknown");
    }
}
