// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "fixture_util.hpp"
#include "patchtrace/critical_vars.hpp"

using namespace patchtrace;
using namespace patchtrace::testing;

namespace {

std::vector<PatchStatement> case_patch_statements(const std::string& rel, SourceTree& vuln,
                                                  SourceTree& patched) {
    vuln = parse_source_tree(corpus_case(rel + "/vuln"), VersionTag::Vulnerable);
    patched = parse_source_tree(corpus_case(rel + "/patched"), VersionTag::Patched);
    return preprocess_diff(parse_diff(corpus_case(rel + "/patch.diff")), vuln, patched);
}

std::set<std::string> cv_names(const std::vector<CriticalVariable>& cvs) {
    std::set<std::string> out;
    for (const auto& cv : cvs)
        out.insert(cv.var.base);
    return out;
}

}  // namespace

TEST_CASE("P-9 control condition promotes struct members to the aggregate") {
    SourceTree vuln, patched;
    auto pss = case_patch_statements("figures/cve-2015-8662", vuln, patched);
    REQUIRE(!pss.empty());
    REQUIRE(pss[0].p_type == "P-9");
    auto cvs = identify_critical_variables(pss[0], 119);
    CHECK(cv_names(cvs) == std::set<std::string>{"s"});
    CHECK(cvs[0].level == 1);
    CHECK(cvs[0].scope == "ff_dwt_decode");
}

TEST_CASE("P-3 takes the argument variables, not the callee") {
    SourceTree vuln, patched;
    auto pss = case_patch_statements("ptype/p03-add-call", vuln, patched);
    REQUIRE(pss.size() == 1);
    REQUIRE(pss[0].p_type == "P-3");
    auto cvs = identify_critical_variables(pss[0], 119);
    CHECK(cv_names(cvs) == std::set<std::string>{"buf", "len"});
}

TEST_CASE("numeric-error CWEs take every variable of an assignment") {
    ParsedFixture fx("void f(int n, int size)\n{\n    int len;\n    len = n * size;\n}\n");
    PatchStatement ps;
    ps.action = PatchAction::Modify;
    ps.p_type = "P-2";
    ps.function = "f";
    ps.file = "fixture.c";
    ps.line_vuln = 4;
    ps.statement = *fx.tree.function("f")->first_stmt_at_line(4);
    auto with_190 = identify_critical_variables(ps, 190);
    CHECK(cv_names(with_190) == std::set<std::string>{"len", "n", "size"});
    auto with_119 = identify_critical_variables(ps, 119);
    CHECK(cv_names(with_119) == std::set<std::string>{"len"});
}

TEST_CASE("each P-type has exactly one extraction rule over the matrix") {
    struct Expect {
        const char* rel;
        int cwe;
        std::set<std::string> names;  // union over the case's patch statements
    };
    const Expect table[] = {
        {"ptype/p01-add-assignment", 119, {"size"}},
        {"ptype/p02-modify-assignment", 190, {"x", "a"}},  // numeric: all variables
        {"ptype/p03-add-call", 119, {"buf", "len"}},
        {"ptype/p04-modify-call", 119, {"len"}},          // modified argument only
        {"ptype/p05-add-decl", 401, {"guard"}},
        {"ptype/p06-modify-decl", 190, {"len"}},
        {"ptype/p07-add-function", 476, {"a"}},           // parameters of the added function
        {"ptype/p08-modify-function", 190, {"f"}},        // the added parameter
        {"ptype/p09-add-control", 119, {"n", "cap"}},
        {"ptype/p10-modify-control", 125, {"limit"}},     // modified variable in the control
        {"ptype/p11-add-return", 476, {"h"}},
    };
    for (const auto& e : table) {
        SourceTree vuln, patched;
        auto pss = case_patch_statements(e.rel, vuln, patched);
        REQUIRE(!pss.empty());
        std::set<std::string> got;
        for (const auto& ps : pss)
            for (const auto& cv : identify_critical_variables_or_empty(ps, e.cwe))
                got.insert(cv.var.base);
        CAPTURE(e.rel);
        CHECK(got == e.names);
    }
}

TEST_CASE("critical variables appear lexically in the patch statement") {
    for (const char* group : {"figures", "ttype", "ptype", "baseline"}) {
        for (const auto& entry : std::filesystem::directory_iterator(corpus_case(group))) {
            if (!entry.is_directory())
                continue;
            CaseManifest m = CaseManifest::load(entry.path().string());
            SourceTree vuln = parse_source_tree(m.vuln_root, VersionTag::Vulnerable);
            SourceTree patched = parse_source_tree(m.patched_root, VersionTag::Patched);
            auto pss = preprocess_diff(parse_diff(m.diff_path), vuln, patched);
            for (const auto& ps : pss) {
                for (const auto& cv : identify_critical_variables_or_empty(ps, m.cwe)) {
                    bool in_new = ps.text_new.find(cv.var.base) != std::string::npos;
                    bool in_old = ps.text_old.find(cv.var.base) != std::string::npos;
                    CAPTURE(entry.path().string());
                    CAPTURE(cv.var.base);
                    CHECK((in_new || in_old));
                    // literals and constants are never critical variables
                    CHECK(!isdigit(static_cast<unsigned char>(cv.var.base[0])));
                }
            }
        }
    }
}

TEST_CASE("no extraction rule leaves the set empty and reports it") {
    ParsedFixture fx("void f(void)\n{\n    int x;\n    x = 1;\n}\n");
    PatchStatement ps;
    ps.action = PatchAction::Add;
    ps.p_type = "P-11";
    ps.function = "f";
    ps.file = "fixture.c";
    ps.line_patched = 4;
    ps.statement.kind = StmtKind::Goto;  // P-11 kinds other than return: no rule
    ps.statement.jump_target = "out";
    CHECK(identify_critical_variables_or_empty(ps, 119).empty());
    CHECK_THROWS_AS(identify_critical_variables(ps, 119), NoCriticalVariablesError);
}
