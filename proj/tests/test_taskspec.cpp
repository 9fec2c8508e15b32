#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "codevo/taskspec.hpp"
#include "doctest.h"

using namespace codevo;

namespace {

using RawFiles = std::vector<std::pair<std::string, std::string>>;

TaskSpec parse_one(const std::string& text) { return parse_task({{"main.py", text}}); }

}  // namespace

TEST_CASE("marker lines are recognized per comment style") {
    bool is_start = false;
    CHECK(is_marker_line("# EVOLVE-BLOCK-START", is_start));
    CHECK(is_start);
    CHECK(is_marker_line("// EVOLVE-BLOCK-END\n", is_start));
    CHECK_FALSE(is_start);
    CHECK(is_marker_line("; EVOLVE-BLOCK-START", is_start));
    CHECK(is_marker_line("   #   EVOLVE-BLOCK-START   \n", is_start));
    CHECK(is_marker_line("EVOLVE-BLOCK-END", is_start));

    CHECK_FALSE(is_marker_line("# EVOLVE-BLOCK-STARTED", is_start));
    CHECK_FALSE(is_marker_line("# EVOLVE-BLOCK", is_start));
    CHECK_FALSE(is_marker_line("x = 1  # EVOLVE-BLOCK-START", is_start));
    CHECK_FALSE(is_marker_line("", is_start));
}

TEST_CASE("single block splits into three segments") {
    TaskSpec t = parse_one("a\n# EVOLVE-BLOCK-START\nx=1\n# EVOLVE-BLOCK-END\nb\n");
    REQUIRE(t.files.size() == 1);
    const auto& segs = t.files[0].segments;
    REQUIRE(segs.size() == 3);
    CHECK(segs[0].kind == Segment::Kind::skeleton);
    CHECK(segs[0].text == "a\n# EVOLVE-BLOCK-START\n");
    CHECK(segs[1].kind == Segment::Kind::evolve);
    CHECK(segs[1].text == "x=1\n");
    CHECK(segs[1].block_id == 0);
    CHECK(segs[2].kind == Segment::Kind::skeleton);
    CHECK(segs[2].text == "# EVOLVE-BLOCK-END\nb\n");
    CHECK(t.num_blocks() == 1);
}

TEST_CASE("reassembly invariant: segments concatenate to the original") {
    const std::string texts[] = {
        "a\n# EVOLVE-BLOCK-START\nx=1\n# EVOLVE-BLOCK-END\nb\n",
        "# EVOLVE-BLOCK-START\nonly\n# EVOLVE-BLOCK-END\n",
        "pre\n// EVOLVE-BLOCK-START\n\n// EVOLVE-BLOCK-END",     // empty block, no final \n
        "; EVOLVE-BLOCK-START\na\n; EVOLVE-BLOCK-END\nmid\n; EVOLVE-BLOCK-START\nb\n; EVOLVE-BLOCK-END\n",
    };
    for (const auto& text : texts) {
        TaskSpec t = parse_one(text);
        CHECK(t.files[0].original() == text);
    }
}

TEST_CASE("parse errors") {
    CHECK_THROWS_WITH_AS(parse_one("x = 1\ny = 2\n"), doctest::Contains("NoEvolveBlock"), Error);
    CHECK_THROWS_WITH_AS(parse_one("# EVOLVE-BLOCK-START\nx\n"), doctest::Contains("UnmatchedMarker"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_one("# EVOLVE-BLOCK-END\n"), doctest::Contains("UnmatchedMarker"),
                         Error);
    CHECK_THROWS_WITH_AS(
        parse_one("# EVOLVE-BLOCK-START\n# EVOLVE-BLOCK-START\n# EVOLVE-BLOCK-END\n"),
        doctest::Contains("NestedMarker"), Error);
}

TEST_CASE("blocks are numbered in file order then textual order") {
    RawFiles files = {
        {"a.py", "# EVOLVE-BLOCK-START\nA\n# EVOLVE-BLOCK-END\n"
                 "# EVOLVE-BLOCK-START\nB\n# EVOLVE-BLOCK-END\n"},
        {"b.py", "# EVOLVE-BLOCK-START\nC\n# EVOLVE-BLOCK-END\n"},
    };
    TaskSpec t = parse_task(files);
    CHECK(t.num_blocks() == 3);
    auto blocks = initial_blocks(t);
    REQUIRE(blocks.size() == 3);
    CHECK(blocks[0] == "A\n");
    CHECK(blocks[1] == "B\n");
    CHECK(blocks[2] == "C\n");
    CHECK(t.files[0].segments[1].block_id == 0);
    CHECK(t.files[0].segments[3].block_id == 1);
    CHECK(t.files[1].segments[1].block_id == 2);
}

TEST_CASE("assemble round-trips the original and replaces single blocks") {
    const std::string text = "a\n# EVOLVE-BLOCK-START\nx=1\n# EVOLVE-BLOCK-END\nb\n";
    TaskSpec t = parse_one(text);

    auto same = assemble(t, initial_blocks(t));
    REQUIRE(same.size() == 1);
    CHECK(same[0].first == "main.py");
    CHECK(same[0].second == text);

    auto changed = assemble(t, {"x=2\n"});
    CHECK(changed[0].second == "a\n# EVOLVE-BLOCK-START\nx=2\n# EVOLVE-BLOCK-END\nb\n");

    auto removed = assemble(t, {""});
    CHECK(removed[0].second == "a\n# EVOLVE-BLOCK-START\n# EVOLVE-BLOCK-END\nb\n");

    CHECK_THROWS_WITH_AS(assemble(t, {}), doctest::Contains("ArityMismatch"), Error);
    CHECK_THROWS_WITH_AS(assemble(t, {"a\n", "b\n"}), doctest::Contains("ArityMismatch"), Error);
}

TEST_CASE("extract_blocks inverts assemble and rejects skeleton edits") {
    RawFiles files = {
        {"a.py", "h\n# EVOLVE-BLOCK-START\nA\n# EVOLVE-BLOCK-END\nt\n"},
        {"b.py", "u\n# EVOLVE-BLOCK-START\nB\n# EVOLVE-BLOCK-END\nv\n"},
    };
    TaskSpec t = parse_task(files);

    auto child = assemble(t, {"new a\n", "new b\n"});
    auto back = extract_blocks(t, child);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == "new a\n");
    CHECK(back[1] == "new b\n");

    auto tampered = child;
    tampered[0].second[0] = 'H';  // skeleton byte
    CHECK_THROWS_WITH_AS(extract_blocks(t, tampered), doctest::Contains("SkeletonMismatch"), Error);

    auto marker_removed = child;
    marker_removed[1].second = "u\nB\nv\n";
    CHECK_THROWS_WITH_AS(extract_blocks(t, marker_removed), doctest::Contains("SkeletonMismatch"),
                         Error);

    auto extra_marker = child;
    extra_marker[0].second += "# EVOLVE-BLOCK-START\nz\n# EVOLVE-BLOCK-END\n";
    CHECK_THROWS_WITH_AS(extract_blocks(t, extra_marker), doctest::Contains("SkeletonMismatch"),
                         Error);
}

TEST_CASE("random replacement round-trips (assemble then extract)") {
    RawFiles files = {
        {"a.py", "h\n# EVOLVE-BLOCK-START\nA\n# EVOLVE-BLOCK-END\nmid\n"
                 "# EVOLVE-BLOCK-START\nB\n# EVOLVE-BLOCK-END\n"},
        {"b.py", "// EVOLVE-BLOCK-START\nC\n// EVOLVE-BLOCK-END\ntail"},
    };
    TaskSpec t = parse_task(files);
    std::mt19937_64 rng(42);
    const std::string alphabet = "abc xyz_0123();=+-*\n";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 40);

    for (int iter = 0; iter < 300; ++iter) {
        std::vector<std::string> texts(3);
        for (auto& s : texts) {
            int n = len(rng);
            for (int i = 0; i < n; ++i) s += alphabet[pick(rng)];
            if (!s.empty() && s.back() != '\n') s += '\n';
        }
        auto files_out = assemble(t, texts);
        auto back = extract_blocks(t, files_out);
        CHECK(back == texts);
    }
}
