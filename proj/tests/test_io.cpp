#include <doctest.h>

#include <filesystem>

#include "test_support.hpp"
#include "sheetlytics/report.hpp"
#include "sheetlytics/runner.hpp"
#include "sheetlytics/spec_file.hpp"

using namespace sheetlytics;
using testsupport::addr;

TEST_CASE("the bundled demo model loads with its benchmark") {
    WorkbookDocument doc = testsupport::load_demo();
    REQUIRE(doc.model.benchmark(addr("G13")).has_value());
    CHECK(*doc.model.benchmark(addr("G13")) == doctest::Approx(38.3343).epsilon(1e-9));
    CHECK(doc.model.workbook().base_case().taken_at_base);
    CHECK(doc.model.workbook().base_case().values.size() == 13);
    REQUIRE(doc.scenarios.has_value());
    CHECK(doc.scenarios->rows.size() == 7);
    CHECK(doc.scenarios->columns.size() == 5);
    CHECK(doc.model.at_base_case());
}

TEST_CASE("comments, blank lines and quoted labels parse") {
    WorkbookDocument doc = load_workbook(
        "# heading comment\n"
        "[cells]\n"
        "A1: 1.5   # trailing comment\n"
        "A2: \"label with # not a comment\"\n"
        "B1: =A1*2\n"
        "\n"
        "[roles]\n"
        "data A1 \"the input\"\n");
    CHECK(doc.model.value(addr("B1")).as_number() == 3.0);
    CHECK(doc.model.workbook().content(addr("A2")).text_value() ==
          "label with # not a comment");
    CHECK(doc.model.workbook().label_for(addr("A1")) == "the input");
}

TEST_CASE("duplicate addresses are load errors") {
    try {
        load_workbook("[cells]\nC4: 1\nC4: 2\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("duplicate address C4") != std::string::npos);
        CHECK(e.line() == 3);
    }
}

TEST_CASE("self-referencing formulas are cycle errors naming the cell") {
    try {
        load_workbook("[cells]\nG13: =G13\n");
        FAIL("expected SheetError");
    } catch (const SheetError& e) {
        CHECK(std::string(e.what()).find("cycle") != std::string::npos);
        CHECK(std::string(e.what()).find("G13") != std::string::npos);
    }
}

TEST_CASE("roles on the wrong cell kind are load errors with line numbers") {
    try {
        load_workbook("[cells]\nA1: 1\nB1: =A1\n[roles]\ndata B1 \"x\"\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }
    CHECK_THROWS_AS(load_workbook("[cells]\nA1: 1\n[roles]\noutput A1 \"x\"\n"), ParseError);
    CHECK_THROWS_AS(load_workbook("[cells]\nA1: 1\n[roles]\ndata A1 \"x\"\ndata A1 \"y\"\n"),
                    ParseError);
}

TEST_CASE("formula parse errors carry the file line") {
    try {
        load_workbook("[cells]\nA1: 1\nB1: =1+\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("other malformed inputs") {
    CHECK_THROWS_AS(load_workbook("A1: 1\n"), ParseError);              // before a section
    CHECK_THROWS_AS(load_workbook("[stuff]\n"), ParseError);            // unknown section
    CHECK_THROWS_AS(load_workbook("[cells]\nA1 1\n"), ParseError);      // missing colon
    CHECK_THROWS_AS(load_workbook("[cells]\nA1:\n"), ParseError);       // missing value
    CHECK_THROWS_AS(load_workbook("[cells]\nA1: 1,5\n"), ParseError);   // bad number
    CHECK_THROWS_AS(load_workbook("[cells]\nZZ: 1\n"), ParseError);     // bad address
    CHECK_THROWS_AS(load_workbook("[scenarios]\ncolumns A1\n"), SheetError); // no rows
}

TEST_CASE("scenario section validation") {
    const char* base =
        "[cells]\nA1: 1\nA2: 2\n[roles]\ndata A1\ndata A2\n";
    // numbers must be 1..S in order
    CHECK_THROWS_AS(load_workbook(std::string(base) +
                                  "[scenarios]\ncolumns A1\n2 \"x\" 5\n"),
                    ParseError);
    CHECK_THROWS_AS(load_workbook(std::string(base) +
                                  "[scenarios]\ncolumns A1\n1 \"x\" 5\n1 \"y\" 6\n"),
                    ParseError);
    // row width must match the columns
    CHECK_THROWS_AS(load_workbook(std::string(base) +
                                  "[scenarios]\ncolumns A1 A2\n1 \"x\" 5\n"),
                    ParseError);
    // rows before columns
    CHECK_THROWS_AS(load_workbook(std::string(base) + "[scenarios]\n1 \"x\" 5\n"),
                    ParseError);

    WorkbookDocument ok = load_workbook(std::string(base) +
                                        "[scenarios]\ncolumns A1 A2\n"
                                        "1 \"first\" 5 6\n2 \"second\" 7 8\n");
    REQUIRE(ok.scenarios.has_value());
    CHECK(ok.scenarios->rows[1].name == "second");
    CHECK(ok.scenarios->rows[1].values == std::vector<double>{7, 8});
}

TEST_CASE("save and reload reproduces the workbook cell by cell") {
    WorkbookDocument doc = testsupport::load_demo();
    std::string emitted = save_workbook(doc.model.workbook(), doc.scenarios);
    WorkbookDocument reloaded = load_workbook(emitted);

    const auto& a = doc.model.workbook().cells();
    const auto& b = reloaded.model.workbook().cells();
    REQUIRE(a.size() == b.size());
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end(); ++ia, ++ib) {
        REQUIRE(ia->first == ib->first);
        REQUIRE(ia->second.node.index() == ib->second.node.index());
        if (ia->second.is_formula()) {
            CHECK(expr_equal(*ia->second.formula_node().ast,
                             *ib->second.formula_node().ast));
        } else {
            CHECK(ia->second == ib->second);
        }
    }
    CHECK(doc.model.workbook().roles() == reloaded.model.workbook().roles());
    REQUIRE(reloaded.scenarios.has_value());
    CHECK(reloaded.scenarios->columns == doc.scenarios->columns);
    for (size_t i = 0; i < doc.scenarios->rows.size(); ++i) {
        CHECK(reloaded.scenarios->rows[i].name == doc.scenarios->rows[i].name);
        CHECK(reloaded.scenarios->rows[i].values == doc.scenarios->rows[i].values);
    }
    // and the reload evaluates identically
    CHECK(reloaded.model.value(addr("G13")).identical(doc.model.value(addr("G13"))));
}

TEST_CASE("spec files parse into ordered blocks") {
    std::vector<SpecBlock> blocks = parse_spec_file(
        "# comment\n"
        "[sweep1 costs]\n"
        "parameter C4\n"
        "values 1 2 3\n"
        "values 4\n"
        "output G13\n"
        "\n"
        "[goalseek break_even]\n"
        "set G13\n"
        "target 30\n"
        "by_changing C4\n");
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].kind == "sweep1");
    CHECK(blocks[0].name == "costs");
    CHECK(blocks[0].all_fields("values") ==
          std::vector<std::string>{"1", "2", "3", "4"});
    CHECK(blocks[1].required("target").fields.at(0) == "30");
    CHECK(blocks[1].optional("tolerance") == nullptr);
}

TEST_CASE("spec file structural errors") {
    CHECK_THROWS_AS(parse_spec_file("parameter C4\n"), ParseError);
    CHECK_THROWS_AS(parse_spec_file("[sweep1]\n"), ParseError);
    CHECK_THROWS_AS(parse_spec_file("[dance party]\n"), ParseError);
    CHECK_THROWS_AS(parse_spec_file("[sweep1 a]\n[sweep1 a]\n"), ParseError);
    CHECK_THROWS_AS(parse_spec_file("[sweep1 bad/name]\n"), ParseError);
    CHECK_THROWS_AS(parse_spec_file("[sweep1 a\n"), ParseError);
}

TEST_CASE("full number text matches the JSON emitter") {
    CHECK(full_number_text(42.5616) == Json(42.5616).dump());
    CHECK(full_number_text(38.334300000000006) == "38.334300000000006");
    CHECK(full_number_text(50000.0) == "50000.0");
}

TEST_CASE("csv escaping") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("run_blocks writes deterministic files and reports outcomes") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sheetlytics_io_test";
    fs::remove_all(dir);

    const std::string spec_text =
        "[scenario all]\noutput G13\n"
        "[whatif push]\nset D10 50.72\nset D7 200\noutput G13\nrestore true\n"
        "[simulate risk]\ntrials 200\nseed 11\nbind D6 uniform 0.6 0.9\n"
        "output G13\nthreshold G13 >= 40\nsave_trials true\n";

    auto run_once = [&](const fs::path& where) {
        WorkbookDocument doc = testsupport::load_demo();
        RunOptions options;
        options.out_dir = where.string();
        return run_blocks(doc, parse_spec_file(spec_text), options);
    };

    std::vector<BlockOutcome> outcomes = run_once(dir / "a");
    REQUIRE(outcomes.size() == 3);
    for (const BlockOutcome& o : outcomes) CHECK(o.ok);
    CHECK(fs::exists(dir / "a" / "all.csv"));
    CHECK(fs::exists(dir / "a" / "all.json"));
    CHECK(fs::exists(dir / "a" / "all.svg"));
    CHECK(fs::exists(dir / "a" / "push.csv"));
    CHECK(fs::exists(dir / "a" / "risk_trials.csv"));

    run_once(dir / "b");
    for (const char* f : {"all.csv", "all.json", "all.svg", "push.json", "risk.json",
                          "risk_trials.csv"})
        CHECK(read_text_file((dir / "a" / f).string()) ==
              read_text_file((dir / "b" / f).string()));
}

TEST_CASE("CSV and JSON carry identical numbers at full precision") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sheetlytics_numbers_test";
    fs::remove_all(dir);

    WorkbookDocument doc = testsupport::load_demo();
    RunOptions options;
    options.out_dir = dir.string();
    run_blocks(doc, parse_spec_file("[scenario all]\noutput G13\n"), options);

    std::string csv = read_text_file((dir / "all.csv").string());
    Json json = Json::parse(read_text_file((dir / "all.json").string()));

    // header matches the schema's column names
    std::string header = csv.substr(0, csv.find('\n'));
    std::string expected_header;
    for (const auto& c : json["columns"]) {
        if (!expected_header.empty()) expected_header += ",";
        expected_header += c.get<std::string>();
    }
    CHECK(header == expected_header);

    // every JSON row serializes to exactly the CSV line
    std::vector<std::string> lines;
    size_t pos = csv.find('\n') + 1;
    while (pos < csv.size()) {
        size_t next = csv.find('\n', pos);
        lines.push_back(csv.substr(pos, next - pos));
        pos = next + 1;
    }
    REQUIRE(lines.size() == json["rows"].size());
    for (size_t i = 0; i < lines.size(); ++i) {
        std::string rebuilt;
        for (const auto& cell : json["rows"][i]) {
            if (!rebuilt.empty()) rebuilt += ",";
            rebuilt += cell.is_string() ? csv_escape(cell.get<std::string>()) : cell.dump();
        }
        CHECK(lines[i] == rebuilt);
    }
}

TEST_CASE("blocks referencing unknown cells fail without stopping the run") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sheetlytics_badblock_test";
    fs::remove_all(dir);

    WorkbookDocument doc = testsupport::load_demo();
    RunOptions options;
    options.out_dir = dir.string();
    std::vector<BlockOutcome> outcomes = run_blocks(
        doc,
        parse_spec_file("[whatif broken]\nset Z99 1\noutput G13\n"
                        "[scenario all]\noutput G13\n"),
        options);
    REQUIRE(outcomes.size() == 2);
    CHECK_FALSE(outcomes[0].ok);
    CHECK(outcomes[0].summary.find("Z99") != std::string::npos);
    CHECK(outcomes[1].ok); // later blocks still ran

    Json err = Json::parse(read_text_file((dir / "broken.json").string()));
    CHECK(err.contains("error"));
}

TEST_CASE("scenario apply block reports the chosen scenario") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sheetlytics_apply_test";
    fs::remove_all(dir);

    WorkbookDocument doc = testsupport::load_demo();
    RunOptions options;
    options.out_dir = dir.string();
    std::vector<BlockOutcome> outcomes =
        run_blocks(doc, parse_spec_file("[scenario third]\napply 3\noutput G13\n"), options);
    REQUIRE(outcomes[0].ok);

    Json json = Json::parse(read_text_file((dir / "third.json").string()));
    REQUIRE(json["rows"].size() == 1);
    CHECK(json["rows"][0][0] == 3);
    CHECK(json["rows"][0][1] == "High Margins");
    // the model is left in the scenario state (live semantics)
    CHECK(doc.model.value(addr("G13")).as_number() == doctest::Approx(50.3296));
}

TEST_CASE("tornado off the base case carries a warning through to the outcome") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sheetlytics_warn_test";
    fs::remove_all(dir);

    WorkbookDocument doc = testsupport::load_demo();
    doc.model.set_input(addr("C4"), 65000); // leave the base case
    RunOptions options;
    options.out_dir = dir.string();
    std::vector<BlockOutcome> outcomes = run_blocks(
        doc, parse_spec_file("[tornado t]\noutput G13\ninput D6 0.58 0.88\n"), options);
    REQUIRE(outcomes[0].ok);
    CHECK(outcomes[0].summary.find("warning") != std::string::npos);

    Json json = Json::parse(read_text_file((dir / "t.json").string()));
    CHECK(json["meta"]["at_base_case"] == false);
    CHECK(json["meta"].contains("warnings"));
}

TEST_CASE("goalseek against the workbook spec format") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "sheetlytics_gs_test";
    fs::remove_all(dir);

    WorkbookDocument doc = testsupport::load_demo();
    RunOptions options;
    options.out_dir = dir.string();
    run_blocks(doc,
               parse_spec_file("[goalseek be]\nset G13\ntarget 30\nby_changing C4\n"
                               "restore true\n"),
               options);
    Json json = Json::parse(read_text_file((dir / "be.json").string()));
    CHECK(json["rows"][0][1] == "converged");
    CHECK(std::fabs(json["rows"][0][2].get<double>() - 80835.75) < 0.5);
}
