#include <doctest.h>

#include <algorithm>

#include "test_support.hpp"

using namespace sheetlytics;
using testsupport::addr;

namespace {

Model model_from(const std::vector<std::pair<std::string, std::string>>& cells) {
    Workbook wb;
    for (const auto& [a, body] : cells) {
        if (!body.empty() && body[0] == '=')
            wb.set_cell(addr(a), CellContent::formula(body, parse_formula(body)));
        else if (!body.empty() && body[0] == '"')
            wb.set_cell(addr(a), CellContent::text(body.substr(1, body.size() - 2)));
        else
            wb.set_cell(addr(a), CellContent::number(std::stod(body)));
    }
    return Model(std::move(wb));
}

double num(Model& m, const std::string& a) {
    CellValue v = m.value(addr(a));
    REQUIRE(v.is_number());
    return v.as_number();
}

ErrorCode err(Model& m, const std::string& a) {
    CellValue v = m.value(addr(a));
    REQUIRE(v.is_error());
    return v.error_code();
}

} // namespace

TEST_CASE("literal cells evaluate to themselves") {
    Model m = model_from({{"A1", "2.5"}, {"A2", "\"note\""}});
    CHECK(num(m, "A1") == 2.5);
    CHECK(m.value(addr("A2")).as_text() == "note");
}

TEST_CASE("contribution formula matches the demo arithmetic") {
    // revenue * margin at the high-margin scenario
    Model m = model_from({{"C10", "25.84"}, {"C6", "0.70"}, {"C11", "=C10*C6"}});
    CHECK(num(m, "C11") == doctest::Approx(18.088).epsilon(1e-12));
}

TEST_CASE("division by zero") {
    Model m = model_from({{"A1", "=1/0"}});
    CHECK(err(m, "A1") == ErrorCode::Div0);
}

TEST_CASE("INDEX outside the range is #REF!") {
    Model m = model_from({{"D27", "1"}, {"D28", "2"}, {"D29", "3"}, {"D30", "4"},
                          {"D31", "5"}, {"D32", "6"}, {"D33", "7"},
                          {"A1", "=INDEX(D27:D33,8)"},
                          {"A2", "=INDEX(D27:D33,0)"},
                          {"A3", "=INDEX(D27:D33,3)"}});
    CHECK(err(m, "A1") == ErrorCode::Ref);
    CHECK(err(m, "A2") == ErrorCode::Ref);
    CHECK(num(m, "A3") == 3.0);
}

TEST_CASE("the scenario-tool INDEX idiom works in-sheet") {
    Model m = model_from({{"G5", "3"},
                          {"C25", "=G5"},
                          {"D27", "0.73"}, {"D28", "0.58"}, {"D29", "0.88"},
                          {"D25", "=INDEX(D27:D29,$C25)"}});
    CHECK(num(m, "D25") == 0.88);
    m.set_cell(addr("G5"), CellContent::number(2));
    CHECK(num(m, "D25") == 0.58);
}

TEST_CASE("empty cells coerce to zero in arithmetic but not in SUM ranges") {
    Model m = model_from({{"A1", "=Z9+5"},
                          {"B1", "1"}, {"B3", "2"},
                          {"C1", "=SUM(B1:B5)"},
                          {"C2", "=AVERAGE(B1:B5)"},
                          {"C3", "=MIN(B1:B5)"},
                          {"C4", "=MAX(B1:B5)"}});
    CHECK(num(m, "A1") == 5.0);
    CHECK(num(m, "C1") == 3.0);
    CHECK(num(m, "C2") == 1.5); // two countable cells, not five
    CHECK(num(m, "C3") == 1.0);
    CHECK(num(m, "C4") == 2.0);
}

TEST_CASE("AVERAGE of no countable cells divides by zero, MIN/MAX give 0") {
    Model m = model_from({{"B1", "\"x\""},
                          {"C1", "=AVERAGE(B1:B3)"},
                          {"C2", "=MIN(B1:B3)"},
                          {"C3", "=MAX(B1:B3)"}});
    CHECK(err(m, "C1") == ErrorCode::Div0);
    CHECK(num(m, "C2") == 0.0);
    CHECK(num(m, "C3") == 0.0);
}

TEST_CASE("text operands in arithmetic are #VALUE!") {
    Model m = model_from({{"A1", "\"label\""}, {"B1", "=A1+1"}, {"B2", "=-A1"}});
    CHECK(err(m, "B1") == ErrorCode::Value);
    CHECK(err(m, "B2") == ErrorCode::Value);
}

TEST_CASE("text in SUM ranges is skipped, direct text argument is not") {
    Model m = model_from({{"B1", "1"}, {"B2", "\"x\""}, {"B3", "2"},
                          {"C1", "=SUM(B1:B3)"},
                          {"C2", "=SUM(B1,B2,B3)"}});
    CHECK(num(m, "C1") == 3.0);
    CHECK(err(m, "C2") == ErrorCode::Value);
}

TEST_CASE("IF evaluates only the selected branch") {
    Model m = model_from({{"A1", "1"},
                          {"B1", "=IF(A1>0,42,1/0)"},
                          {"B2", "=IF(A1<0,1/0,43)"},
                          {"B3", "=IF(A1>0,44)"},
                          {"B4", "=IF(A1<0,45)"}});
    CHECK(num(m, "B1") == 42.0);
    CHECK(num(m, "B2") == 43.0);
    CHECK(num(m, "B3") == 44.0);
    CHECK_FALSE(m.value(addr("B4")).as_boolean()); // missing else
}

TEST_CASE("error absorption is left to right") {
    Model m = model_from({{"A1", "=1/0"}, {"A2", "=SQRT(0-1)"},
                          {"B1", "=A1+A2"}, {"B2", "=A2+A1"}, {"B3", "=A1=A2"}});
    CHECK(err(m, "B1") == ErrorCode::Div0);
    CHECK(err(m, "B2") == ErrorCode::Num);
    CHECK(err(m, "B3") == ErrorCode::Div0);
}

TEST_CASE("numeric function edge cases") {
    Model m = model_from({{"A1", "=SQRT(16)"},
                          {"A2", "=SQRT(0-4)"},
                          {"A3", "=LN(1)"},
                          {"A4", "=LN(0)"},
                          {"A5", "=EXP(0)"},
                          {"A6", "=ABS(0-3)"},
                          {"A7", "=ROUND(2.345,2)"},
                          {"A8", "=ROUND(-2.5,0)"},
                          {"A9", "=ROUND(1234.5,-1)"},
                          {"B1", "=10^400"}});
    CHECK(num(m, "A1") == 4.0);
    CHECK(err(m, "A2") == ErrorCode::Num);
    CHECK(num(m, "A3") == 0.0);
    CHECK(err(m, "A4") == ErrorCode::Num);
    CHECK(num(m, "A5") == 1.0);
    CHECK(num(m, "A6") == 3.0);
    CHECK(num(m, "A7") == doctest::Approx(2.35));
    CHECK(num(m, "A8") == -3.0); // half away from zero
    CHECK(num(m, "A9") == 1230.0);
    CHECK(err(m, "B1") == ErrorCode::Num); // overflow is #NUM!, not inf
}

TEST_CASE("bare range in scalar context is #VALUE!") {
    Model m = model_from({{"B1", "1"}, {"B2", "2"}, {"A1", "=B1:B2+1"}});
    CHECK(err(m, "A1") == ErrorCode::Value);
}

TEST_CASE("wrong argument counts are #VALUE! at evaluation") {
    Model m = model_from({{"A1", "=SQRT(1,2)"}, {"A2", "=IF(1)"}, {"A3", "=ROUND(1)"}});
    CHECK(err(m, "A1") == ErrorCode::Value);
    CHECK(err(m, "A2") == ErrorCode::Value);
    CHECK(err(m, "A3") == ErrorCode::Value);
}

TEST_CASE("npv discounts the first flow one period") {
    CHECK(npv(0.1, {110}).as_number() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(npv(0.0, {1, 2, 3}).as_number() == 6.0);
    CHECK(npv(-1.0, {1}).error_code() == ErrorCode::Num);
    CHECK(npv(-1.5, {1}).error_code() == ErrorCode::Num);

    // oracle: -1000(1+r)^2 + 2300(1+r) - 1320 = 0 at r = 0.10 and 0.20,
    // so NPV(r, [2300, -1320]) - 1000 vanishes at both rates
    for (double r : {0.10, 0.20}) {
        double lhs = -1000 * (1 + r) * (1 + r) + 2300 * (1 + r) - 1320;
        CHECK(lhs == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(npv(r, {2300, -1320}).as_number() == doctest::Approx(1000.0).epsilon(1e-12));
    }
}

TEST_CASE("NPV inside formulas accepts ranges and scalars") {
    Model m = model_from({{"B1", "2300"}, {"B2", "-1320"},
                          {"A1", "0.1"},
                          {"C1", "=NPV(A1,B1:B2)-1000"},
                          {"C2", "=NPV(A1,2300,-1320)-1000"}});
    CHECK(num(m, "C1") == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(num(m, "C2") == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("incremental recalculation on the demo model") {
    WorkbookDocument doc = testsupport::load_demo();
    Model& m = doc.model;
    CHECK(num(m, "G13") == doctest::Approx(38.3343).epsilon(1e-9));

    m.set_input(addr("C4"), 50000);
    std::set<CellAddress> recomputed = m.recalculate();
    CHECK(num(m, "G13") == doctest::Approx(42.3343).epsilon(1e-9));

    // exactly the transitive dependents of C4: conversion, expenses, profit
    std::set<CellAddress> expected;
    for (const char* a : {"C16", "C12", "D12", "E12", "F12", "G12",
                          "C13", "D13", "E13", "F13", "G13"})
        expected.insert(addr(a));
    CHECK(recomputed == expected);
}

TEST_CASE("recalculate with no pending changes touches nothing") {
    Model m = model_from({{"A1", "1"}, {"B1", "=A1+1"}});
    CHECK(m.recalculate().empty());
}

TEST_CASE("two-cycle makes both cells #CYCLE! and dependents absorb it") {
    Model m = model_from({{"A1", "=B1"}, {"B1", "=A1"}, {"C1", "=A1+1"}, {"D1", "5"}});
    CHECK(err(m, "A1") == ErrorCode::Cycle);
    CHECK(err(m, "B1") == ErrorCode::Cycle);
    CHECK(err(m, "C1") == ErrorCode::Cycle);
    CHECK(num(m, "D1") == 5.0);
    CHECK(m.graph().cycle_cells() == std::set<CellAddress>{addr("A1"), addr("B1")});
}

TEST_CASE("self-reference is a cycle") {
    Model m = model_from({{"A1", "=A1+1"}});
    CHECK(err(m, "A1") == ErrorCode::Cycle);
}

TEST_CASE("value map is independent of insertion order") {
    std::vector<std::pair<std::string, std::string>> cells = {
        {"A1", "3"}, {"A2", "4"}, {"B1", "=A1+A2"}, {"B2", "=B1*2"}, {"C1", "=SUM(A1:B2)"}};
    std::sort(cells.begin(), cells.end());
    do {
        Model m = model_from(cells);
        CHECK(num(m, "C1") == 28.0);
        CHECK(num(m, "B2") == 14.0);
    } while (std::next_permutation(cells.begin(), cells.end()));
}

TEST_CASE("editing a formula rebuilds the graph") {
    Model m = model_from({{"A1", "2"}, {"A2", "10"}, {"B1", "=A1*3"}});
    CHECK(num(m, "B1") == 6.0);
    std::string f = "=A2*3";
    m.set_cell(addr("B1"), CellContent::formula(f, parse_formula(f)));
    CHECK(num(m, "B1") == 30.0);
    m.set_cell(addr("A2"), CellContent::number(20));
    CHECK(num(m, "B1") == 60.0);
    m.set_cell(addr("A1"), CellContent::number(99));
    CHECK(num(m, "B1") == 60.0); // no longer a precedent
}

TEST_CASE("incremental recalculation equals the from-scratch oracle") {
    SplitMix64 rng(11);
    for (int round = 0; round < 60; ++round) {
        testsupport::RandomBook book = testsupport::random_workbook(rng);
        Model m(book.wb);
        {
            testsupport::ReferenceEvaluator oracle(m.workbook());
            auto expected = oracle.all_values();
            for (const auto& [a, v] : expected)
                CHECK(testsupport::values_close(m.value(a), v));
        }
        // a random single edit, then incremental equals full
        CellAddress target =
            book.literals[static_cast<size_t>(rng.next() % book.literals.size())];
        double new_value = rng.next_double() * 200 - 100;
        m.set_cell(target, CellContent::number(new_value));
        m.recalculate();
        testsupport::ReferenceEvaluator oracle(m.workbook());
        auto expected = oracle.all_values();
        REQUIRE(expected.size() == m.values().size());
        for (const auto& [a, v] : expected) {
            CAPTURE(a.to_string());
            CHECK(testsupport::values_close(m.value(a), v));
        }
    }
}

TEST_CASE("models copy independently") {
    Model m = model_from({{"A1", "1"}, {"B1", "=A1*10"}});
    Model copy = m;
    copy.set_cell(addr("A1"), CellContent::number(5));
    CHECK(num(copy, "B1") == 50.0);
    CHECK(num(m, "B1") == 10.0);
}

TEST_CASE("value of an unknown cell throws") {
    Model m = model_from({{"A1", "1"}});
    CHECK_THROWS_AS(m.value(addr("Z99")), SheetError);
}

TEST_CASE("boolean results feed back into arithmetic as 0/1") {
    Model m = model_from({{"A1", "5"}, {"B1", "=A1>3"}, {"C1", "=B1*10"}});
    CHECK(m.value(addr("B1")).as_boolean());
    CHECK(num(m, "C1") == 10.0);
}
