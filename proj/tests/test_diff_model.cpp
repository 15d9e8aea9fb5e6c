// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "fixture_util.hpp"
#include "patchtrace/diff_model.hpp"

using namespace patchtrace;
using namespace patchtrace::testing;

TEST_CASE("parse_diff on the dwt guard patch") {
    DiffFile d = parse_diff(corpus_case("figures/cve-2015-8662/patch.diff"));
    REQUIRE(d.files.size() == 1);
    int adds = 0, dels = 0;
    for (const auto& h : d.hunks())
        for (const auto& l : h.lines) {
            adds += l.marker == LineMarker::Add;
            dels += l.marker == LineMarker::Del;
        }
    CHECK(adds == 3);
    CHECK(dels == 0);
}

TEST_CASE("parse_diff trivial inputs") {
    CHECK(parse_diff_text("").files.empty());
    // context-only hunk parses and yields nothing downstream
    std::string diff =
        "--- vuln/a.c\n"
        "+++ patched/a.c\n"
        "@@ -1,2 +1,2 @@\n"
        " int x;\n"
        " int y;\n";
    DiffFile d = parse_diff_text(diff);
    REQUIRE(d.hunks().size() == 1);
    TempDir dir;
    dir.write("vuln/a.c", "int x;\nint y;\n");
    dir.write("patched/a.c", "int x;\nint y;\n");
    SourceTree vuln = parse_source_tree((dir.path() / "vuln").string(), VersionTag::Vulnerable);
    SourceTree patched = parse_source_tree((dir.path() / "patched").string(), VersionTag::Patched);
    CHECK(preprocess_diff(d, vuln, patched).empty());
}

TEST_CASE("parse_diff rejects inconsistent hunk counters") {
    std::string diff =
        "--- a/x.c\n"
        "+++ b/x.c\n"
        "@@ -1,3 +1,3 @@\n"
        " only one line\n";
    CHECK_THROWS_AS(parse_diff_text(diff), MalformedDiffError);
    try {
        parse_diff_text(diff);
    } catch (const MalformedDiffError& e) {
        CHECK(e.line() == 3);
    }
}

namespace {

struct DiffFixture {
    TempDir dir;
    SourceTree vuln;
    SourceTree patched;

    DiffFixture(const std::string& vuln_src, const std::string& patched_src) {
        dir.write("vuln/a.c", vuln_src);
        dir.write("patched/a.c", patched_src);
        vuln = parse_source_tree((dir.path() / "vuln").string(), VersionTag::Vulnerable);
        patched = parse_source_tree((dir.path() / "patched").string(), VersionTag::Patched);
    }
};

}  // namespace

TEST_CASE("preprocess drops normalization-equal del/add pairs") {
    DiffFixture fx("void f(void)\n{\n    x=1; // old\n}\n",
                   "void f(void)\n{\n    x = 1;\n}\n");
    std::string diff =
        "--- vuln/a.c\n"
        "+++ patched/a.c\n"
        "@@ -3,1 +3,1 @@\n"
        "-    x=1; // old\n"
        "+    x = 1;\n";
    auto pss = preprocess_diff(parse_diff_text(diff), fx.vuln, fx.patched);
    CHECK(pss.empty());
}

TEST_CASE("preprocess pairs textual del/add into a modify") {
    DiffFixture fx("void f(void)\n{\n    int n;\n    n = a;\n}\n",
                   "void f(void)\n{\n    int n;\n    n = a + 1;\n}\n");
    std::string diff =
        "--- vuln/a.c\n"
        "+++ patched/a.c\n"
        "@@ -4,1 +4,1 @@\n"
        "-    n = a;\n"
        "+    n = a + 1;\n";
    auto pss = preprocess_diff(parse_diff_text(diff), fx.vuln, fx.patched);
    REQUIRE(pss.size() == 1);
    CHECK(pss[0].action == PatchAction::Modify);
    CHECK(pss[0].p_type == "P-2");
    CHECK(pss[0].line_vuln == 4);
    CHECK(pss[0].line_patched == 4);
    CHECK(pss[0].function == "f");
}

TEST_CASE("the dwt guard patch binds to ff_dwt_decode as pure adds") {
    SourceTree vuln = parse_source_tree(corpus_case("figures/cve-2015-8662/vuln"),
                                        VersionTag::Vulnerable);
    SourceTree patched = parse_source_tree(corpus_case("figures/cve-2015-8662/patched"),
                                           VersionTag::Patched);
    DiffFile d = parse_diff(corpus_case("figures/cve-2015-8662/patch.diff"));
    auto pss = preprocess_diff(d, vuln, patched);
    REQUIRE(pss.size() == 2);  // brace-only added line is structural
    for (const auto& ps : pss) {
        CHECK(ps.action == PatchAction::Add);
        CHECK(ps.function == "ff_dwt_decode");
    }
    CHECK(pss[0].p_type == "P-9");
    CHECK(pss[1].p_type == "P-11");
}

TEST_CASE("unanchored hunks are rejected") {
    DiffFixture fx("void f(void)\n{\n    x = 1;\n}\n", "void f(void)\n{\n    x = 2;\n}\n");
    std::string diff =
        "--- vuln/missing.c\n"
        "+++ patched/missing.c\n"
        "@@ -1,1 +1,1 @@\n"
        "-old line;\n"
        "+new line;\n";
    CHECK_THROWS_AS(preprocess_diff(parse_diff_text(diff), fx.vuln, fx.patched),
                    UnanchoredHunkError);
}

TEST_CASE("classify_patch_statement table") {
    auto make = [](StmtKind kind, ControlKind ctrl, PatchAction action, bool sig = false) {
        PatchStatement ps;
        ps.action = action;
        ps.is_signature = sig;
        ps.statement.kind = kind;
        ps.statement.control = ctrl;
        return classify_patch_statement(ps);
    };
    CHECK(make(StmtKind::Control, ControlKind::If, PatchAction::Add) == "P-9");
    CHECK(make(StmtKind::Assign, ControlKind::None, PatchAction::Modify) == "P-2");
    CHECK(make(StmtKind::Return, ControlKind::None, PatchAction::Add) == "P-11");
    CHECK(make(StmtKind::Call, ControlKind::None, PatchAction::Add) == "P-3");
    CHECK(make(StmtKind::Call, ControlKind::None, PatchAction::Modify) == "P-4");
    CHECK(make(StmtKind::Decl, ControlKind::None, PatchAction::Add) == "P-5");
    CHECK(make(StmtKind::Decl, ControlKind::None, PatchAction::Modify) == "P-6");
    CHECK(make(StmtKind::Assign, ControlKind::None, PatchAction::Add, true) == "P-7");
    CHECK(make(StmtKind::Assign, ControlKind::None, PatchAction::Modify, true) == "P-8");
    CHECK(make(StmtKind::Control, ControlKind::While, PatchAction::Modify) == "P-10");
    CHECK(make(StmtKind::Goto, ControlKind::None, PatchAction::Add) == "P-11");
    CHECK(make(StmtKind::Opaque, ControlKind::None, PatchAction::Delete) == "P-11");
}

TEST_CASE("preprocessing is deterministic and partitions changed lines") {
    for (const char* rel : {"figures/cve-2015-8662", "figures/cve-2013-1929",
                            "ptype/p09-add-control", "ptype/p10-modify-control"}) {
        SourceTree vuln =
            parse_source_tree(corpus_case(std::string(rel) + "/vuln"), VersionTag::Vulnerable);
        SourceTree patched =
            parse_source_tree(corpus_case(std::string(rel) + "/patched"), VersionTag::Patched);
        DiffFile d = parse_diff(corpus_case(std::string(rel) + "/patch.diff"));
        auto a = preprocess_diff(d, vuln, patched);
        auto b = preprocess_diff(d, vuln, patched);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].p_type == b[i].p_type);
            CHECK(a[i].text_new == b[i].text_new);
            CHECK(a[i].line_vuln == b[i].line_vuln);
            // exactly one p_type each
            CHECK(!a[i].p_type.empty());
        }
    }
}

TEST_CASE("multiple hunks and files keep their own counters") {
    std::string diff =
        "--- vuln/a.c\n"
        "+++ patched/a.c\n"
        "@@ -2,2 +2,2 @@\n"
        " int keep;\n"
        "-int old_a;\n"
        "+int new_a;\n"
        "@@ -10,1 +10,2 @@\n"
        " int tail;\n"
        "+int added;\n"
        "--- vuln/b.c\n"
        "+++ patched/b.c\n"
        "@@ -1,1 +1,1 @@\n"
        "-int old_b;\n"
        "+int new_b;\n";
    DiffFile d = parse_diff_text(diff);
    REQUIRE(d.files.size() == 2);
    CHECK(d.files[0].hunks.size() == 2);
    CHECK(d.files[1].hunks.size() == 1);
    auto touched = d.files_touched();
    REQUIRE(touched.size() == 2);
    CHECK(touched[0] == std::pair<std::string, std::string>{"vuln/a.c", "patched/a.c"});
    CHECK(touched[1].second == "patched/b.c");
}

TEST_CASE("deleted lines classify through the same table") {
    DiffFixture fx(
        "void f(int n)\n{\n    int len;\n    len = n;\n    len = n * 2;\n    use_len(len);\n}\n",
        "void f(int n)\n{\n    int len;\n    len = n;\n    use_len(len);\n}\n");
    std::string diff =
        "--- vuln/a.c\n"
        "+++ patched/a.c\n"
        "@@ -5,1 +4,0 @@\n"
        "-    len = n * 2;\n";
    auto pss = preprocess_diff(parse_diff_text(diff), fx.vuln, fx.patched);
    REQUIRE(pss.size() == 1);
    CHECK(pss[0].action == PatchAction::Delete);
    CHECK(pss[0].p_type == "P-1");
    CHECK(pss[0].line_vuln == 5);
    CHECK(!pss[0].line_patched);
    CHECK(pss[0].function == "f");
    CHECK(pss[0].text_old == "len = n * 2;");
    // the deleted statement still yields its critical variable
    auto cvs = identify_critical_variables(pss[0], 119);
    REQUIRE(cvs.size() == 1);
    CHECK(cvs[0].var.base == "len");
}
