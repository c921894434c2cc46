#include <doctest.h>

#include <algorithm>

#include "test_support.hpp"
#include "sheetlytics/analysis.hpp"

using namespace sheetlytics;
using testsupport::addr;

namespace {

// y = 2x with x as a data input
Model linear_model() {
    Workbook wb;
    wb.set_cell(addr("A1"), CellContent::number(1));
    std::string f = "=A1*2";
    wb.set_cell(addr("B1"), CellContent::formula(f, parse_formula(f)));
    wb.set_role(addr("A1"), Role{RoleKind::Data, "x"});
    wb.set_role(addr("B1"), Role{RoleKind::Performance, "y"});
    return make_model(std::move(wb));
}

double out_num(const CellValue& v) {
    REQUIRE(v.is_number());
    return v.as_number();
}

// full state fingerprint: contents plus every computed value, bit-exact
bool model_state_identical(Model& a, Model& b) {
    if (!(a.workbook().cells() == b.workbook().cells())) return false;
    return testsupport::value_maps_identical(a.values(), b.values());
}

} // namespace

TEST_CASE("what_if reproduces the revenue-and-reps push") {
    WorkbookDocument doc = testsupport::load_demo();
    WhatIfReport report = what_if(doc.model,
                                  {{addr("D10"), 50.72}, {addr("D7"), 200}},
                                  {addr("G13")});
    REQUIRE(report.outputs.size() == 1);
    const ObservedOutput& out = report.outputs[0];
    CHECK(out.label == "Total Net Profit");
    CHECK(out_num(out.value) == doctest::Approx(42.5616).epsilon(1e-9));
    REQUIRE(out.change_from_base.has_value());
    CHECK(*out.change_from_base == doctest::Approx(4.2273).epsilon(1e-6));

    // default semantics: the assignments stay applied
    CHECK(doc.model.workbook().content(addr("D10")).number_value() == 50.72);
}

TEST_CASE("what_if at the base values reports exactly zero change") {
    WorkbookDocument doc = testsupport::load_demo();
    WhatIfReport report = what_if(doc.model, {{addr("C4"), 60000}}, {addr("G13")});
    REQUIRE(report.outputs[0].change_from_base.has_value());
    CHECK(*report.outputs[0].change_from_base == 0.0);
}

TEST_CASE("what_if on the rep cost alone") {
    WorkbookDocument doc = testsupport::load_demo();
    WhatIfReport report = what_if(doc.model, {{addr("C4"), 50000}}, {addr("G13")});
    CHECK(out_num(report.outputs[0].value) == doctest::Approx(42.3343).epsilon(1e-9));
    CHECK(*report.outputs[0].change_from_base == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("what_if restore flag puts inputs back") {
    WorkbookDocument doc = testsupport::load_demo();
    Model before = doc.model;
    what_if(doc.model, {{addr("D10"), 50.72}}, {addr("G13")}, /*restore=*/true);
    CHECK(model_state_identical(doc.model, before));
}

TEST_CASE("what_if rejects non-input targets") {
    WorkbookDocument doc = testsupport::load_demo();
    CHECK_THROWS_AS(what_if(doc.model, {{addr("G13"), 1.0}}, {addr("G13")}), SheetError);
    CHECK_THROWS_AS(what_if(doc.model, {{addr("B4"), 1.0}}, {addr("G13")}), SheetError);
}

TEST_CASE("plain outputs have no change-from-base") {
    WorkbookDocument doc = testsupport::load_demo();
    WhatIfReport report = what_if(doc.model, {{addr("C4"), 60000}}, {addr("G12")});
    CHECK_FALSE(report.outputs[0].benchmark.has_value());
    CHECK_FALSE(report.outputs[0].change_from_base.has_value());
}

TEST_CASE("sweep_one over a linear model") {
    Model m = linear_model();
    SA1Table table = sweep_one(m, SweepSpec{addr("A1"), {1, 2, 3}, {addr("B1")}});
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].parameter_value == 1.0);
    CHECK(out_num(table.rows[0].outputs[0]) == 2.0);
    CHECK(out_num(table.rows[1].outputs[0]) == 4.0);
    CHECK(out_num(table.rows[2].outputs[0]) == 6.0);
    CHECK(table.parameter_label == "x");
}

TEST_CASE("sweep_one over the demo rep cost") {
    WorkbookDocument doc = testsupport::load_demo();
    SA1Table table =
        sweep_one(doc.model, SweepSpec{addr("C4"), {50000, 60000, 75000}, {addr("G13")}});
    CHECK(out_num(table.rows[0].outputs[0]) == doctest::Approx(42.3343).epsilon(1e-9));
    CHECK(out_num(table.rows[1].outputs[0]) == doctest::Approx(38.3343).epsilon(1e-9));
    CHECK(out_num(table.rows[2].outputs[0]) == doctest::Approx(32.3343).epsilon(1e-9));
}

TEST_CASE("sweep_one restores the workbook bit for bit") {
    WorkbookDocument doc = testsupport::load_demo();
    Model before = doc.model;
    sweep_one(doc.model, SweepSpec{addr("C4"), {1, 2, 3e7}, {addr("G13")}});
    CHECK(model_state_identical(doc.model, before));
}

TEST_CASE("sweep_one records error outputs and continues") {
    Workbook wb;
    wb.set_cell(addr("A1"), CellContent::number(1));
    std::string f = "=SQRT(A1)";
    wb.set_cell(addr("B1"), CellContent::formula(f, parse_formula(f)));
    wb.set_role(addr("A1"), Role{RoleKind::Data, ""});
    Model m = make_model(std::move(wb));

    SA1Table table = sweep_one(m, SweepSpec{addr("A1"), {4, -1, 9}, {addr("B1")}});
    CHECK(out_num(table.rows[0].outputs[0]) == 2.0);
    CHECK(table.rows[1].outputs[0].is_error());
    CHECK(out_num(table.rows[2].outputs[0]) == 3.0);
}

TEST_CASE("sweep_one validations") {
    Model m = linear_model();
    CHECK_THROWS_AS(sweep_one(m, SweepSpec{addr("B1"), {1}, {addr("B1")}}), SheetError);
    CHECK_THROWS_AS(sweep_one(m, SweepSpec{addr("A1"), {}, {addr("B1")}}), SheetError);
}

TEST_CASE("sweep_two over the demo grid") {
    WorkbookDocument doc = testsupport::load_demo();
    SA2Grid grid = sweep_two(doc.model,
                             AxisSpec{addr("C4"), {50000, 60000, 75000}},
                             AxisSpec{addr("D6"), {0.58, 0.73, 0.88}},
                             {addr("G13")});
    // base pair sits in the middle of the grid
    CHECK(out_num(grid.tables[0][1][1]) == doctest::Approx(38.3343).epsilon(1e-9));

    // hand recalc: contribution at D6=0.58 is 62.3343 - 0.15*36.71 = 56.8278,
    // expenses at 50000 are 20, so profit is 36.8278
    double contribution = 25.84 * 0.62 + 36.71 * 0.58 + 20.44 * 0.68 + 10.40 * 0.54;
    CHECK(contribution == doctest::Approx(56.8278).epsilon(1e-12));
    CHECK(out_num(grid.tables[0][0][0]) == doctest::Approx(contribution - 20.0).epsilon(1e-9));
    CHECK(out_num(grid.tables[0][0][0]) == doctest::Approx(36.8278).epsilon(1e-9));
}

TEST_CASE("a 1x1 sweep_two equals the corresponding what_if") {
    WorkbookDocument doc = testsupport::load_demo();
    SA2Grid grid = sweep_two(doc.model, AxisSpec{addr("C4"), {52000}},
                             AxisSpec{addr("D6"), {0.66}}, {addr("G13")});
    WhatIfReport wi = what_if(doc.model, {{addr("C4"), 52000}, {addr("D6"), 0.66}},
                              {addr("G13")}, /*restore=*/true);
    CHECK(grid.tables[0][0][0].identical(wi.outputs[0].value));
}

TEST_CASE("sweep_two restores and validates") {
    WorkbookDocument doc = testsupport::load_demo();
    Model before = doc.model;
    sweep_two(doc.model, AxisSpec{addr("C4"), {1, 2}}, AxisSpec{addr("D6"), {0.1, 0.9}},
              {addr("G13"), addr("G11")});
    CHECK(model_state_identical(doc.model, before));

    CHECK_THROWS_AS(sweep_two(doc.model, AxisSpec{addr("C4"), {1}},
                              AxisSpec{addr("C4"), {2}}, {addr("G13")}),
                    SheetError);
}

TEST_CASE("sweep rows agree with individual what_ifs") {
    WorkbookDocument doc = testsupport::load_demo();
    std::vector<double> values{48000, 61000, 66000};
    SA1Table table = sweep_one(doc.model,
                               SweepSpec{addr("C4"), values, {addr("G13"), addr("G12")}});
    for (size_t i = 0; i < values.size(); ++i) {
        WhatIfReport wi = what_if(doc.model, {{addr("C4"), values[i]}},
                                  {addr("G13"), addr("G12")}, /*restore=*/true);
        CHECK(table.rows[i].outputs[0].identical(wi.outputs[0].value));
        CHECK(table.rows[i].outputs[1].identical(wi.outputs[1].value));
    }
}

TEST_CASE("tornado on the demo drivers") {
    WorkbookDocument doc = testsupport::load_demo();
    TornadoSpec spec;
    spec.rows.push_back({addr("D6"), "", 0.58, 0.88});
    spec.rows.push_back({addr("C4"), "", 50000, 75000});
    TornadoData data = tornado(doc.model, spec, addr("G13"));

    CHECK(data.base_output == doctest::Approx(38.3343).epsilon(1e-9));
    CHECK(data.at_base_case);
    REQUIRE(data.rows.size() == 2);

    // oracle: the model is linear in D6 with slope 36.71 (Belex revenue),
    // and the +-0.15 margin swing moves profit by 0.30 * 36.71 = 11.013
    const TornadoDataRow& margin = data.rows[0];
    CHECK(margin.input == addr("D6"));
    CHECK(out_num(margin.out_at_low) == doctest::Approx(38.3343 - 0.15 * 36.71).epsilon(1e-9));
    CHECK(out_num(margin.out_at_low) == doctest::Approx(32.8278).epsilon(1e-9));
    CHECK(out_num(margin.out_at_high) == doctest::Approx(43.8408).epsilon(1e-9));
    CHECK(margin.swing == doctest::Approx(11.0130).epsilon(1e-9));

    // rep cost swings 400 reps * 25000 / 1e6 = 10, so it ranks second
    const TornadoDataRow& cost = data.rows[1];
    CHECK(cost.input == addr("C4"));
    CHECK(out_num(cost.out_at_low) == doctest::Approx(42.3343).epsilon(1e-9));
    CHECK(out_num(cost.out_at_high) == doctest::Approx(32.3343).epsilon(1e-9));
    CHECK(cost.swing == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("tornado ordering is invariant under spec permutation") {
    WorkbookDocument doc = testsupport::load_demo();
    TornadoSpec spec;
    spec.rows.push_back({addr("D6"), "", 0.58, 0.88});
    spec.rows.push_back({addr("C4"), "", 50000, 75000});
    spec.rows.push_back({addr("C6"), "", 0.50, 0.74});
    TornadoData first = tornado(doc.model, spec, addr("G13"));

    std::reverse(spec.rows.begin(), spec.rows.end());
    TornadoData second = tornado(doc.model, spec, addr("G13"));

    REQUIRE(first.rows.size() == second.rows.size());
    for (size_t i = 0; i < first.rows.size(); ++i) {
        CHECK(first.rows[i].input == second.rows[i].input);
        CHECK(first.rows[i].swing == second.rows[i].swing);
    }
    for (size_t i = 1; i < first.rows.size(); ++i)
        CHECK(first.rows[i - 1].swing >= first.rows[i].swing);
}

TEST_CASE("tornado zero-swing rows rank last") {
    WorkbookDocument doc = testsupport::load_demo();
    TornadoSpec spec;
    spec.rows.push_back({addr("C6"), "", 0.62, 0.62});
    spec.rows.push_back({addr("D6"), "", 0.58, 0.88});
    TornadoData data = tornado(doc.model, spec, addr("G13"));
    CHECK(data.rows.back().input == addr("C6"));
    CHECK(data.rows.back().swing == 0.0);
}

TEST_CASE("equal swings break ties by label") {
    WorkbookDocument doc = testsupport::load_demo();
    TornadoSpec spec;
    spec.rows.push_back({addr("E6"), "", 0.68, 0.68}); // Coroflux Margin, swing 0
    spec.rows.push_back({addr("C6"), "", 0.62, 0.62}); // Asralide Margin, swing 0
    TornadoData data = tornado(doc.model, spec, addr("G13"));
    CHECK(data.rows[0].label == "Asralide Margin");
    CHECK(data.rows[1].label == "Coroflux Margin");
}

TEST_CASE("tornado rejects low above high and duplicate inputs") {
    WorkbookDocument doc = testsupport::load_demo();
    TornadoSpec bad;
    bad.rows.push_back({addr("D6"), "", 0.88, 0.58});
    CHECK_THROWS_AS(tornado(doc.model, bad, addr("G13")), SheetError);

    TornadoSpec dup;
    dup.rows.push_back({addr("D6"), "", 0.1, 0.2});
    dup.rows.push_back({addr("D6"), "", 0.3, 0.4});
    CHECK_THROWS_AS(tornado(doc.model, dup, addr("G13")), SheetError);
}

TEST_CASE("tornado flags a non-base pivot and restores state") {
    WorkbookDocument doc = testsupport::load_demo();
    doc.model.set_input(addr("C4"), 65000);
    Model before = doc.model;

    TornadoSpec spec;
    spec.rows.push_back({addr("D6"), "", 0.58, 0.88});
    TornadoData data = tornado(doc.model, spec, addr("G13"));
    CHECK_FALSE(data.at_base_case);
    CHECK(model_state_identical(doc.model, before));
}

TEST_CASE("apply_scenario reproduces the high-margin worksheet") {
    WorkbookDocument doc = testsupport::load_demo();
    REQUIRE(doc.scenarios.has_value());
    ScenarioRun run = apply_scenario(doc.model, *doc.scenarios, 3);
    CHECK(run.number == 3);
    CHECK(run.name == "High Margins");

    Model& m = doc.model;
    CHECK(m.workbook().content(addr("C4")).number_value() == 60000);
    CHECK(m.workbook().content(addr("C6")).number_value() == 0.70);
    CHECK(m.workbook().content(addr("D6")).number_value() == 0.88);
    CHECK(m.workbook().content(addr("E6")).number_value() == 0.82);
    CHECK(m.workbook().content(addr("F6")).number_value() == 0.69);

    CHECK(out_num(m.value(addr("C11"))) == doctest::Approx(18.088).epsilon(1e-9));
    CHECK(out_num(m.value(addr("D11"))) == doctest::Approx(32.3048).epsilon(1e-9));
    CHECK(out_num(m.value(addr("E11"))) == doctest::Approx(16.7608).epsilon(1e-9));
    CHECK(out_num(m.value(addr("F11"))) == doctest::Approx(7.176).epsilon(1e-9));
    CHECK(out_num(m.value(addr("G13"))) == doctest::Approx(50.3296).epsilon(1e-9));
}

TEST_CASE("scenario 1 is the base case") {
    WorkbookDocument doc = testsupport::load_demo();
    apply_scenario(doc.model, *doc.scenarios, 3);
    apply_scenario(doc.model, *doc.scenarios, 1);
    CHECK(out_num(doc.model.value(addr("G13"))) == doctest::Approx(38.3343).epsilon(1e-9));
    CHECK(*doc.model.benchmark(addr("G13")) -
              out_num(doc.model.value(addr("G13"))) == 0.0);
}

TEST_CASE("scenario index out of range") {
    WorkbookDocument doc = testsupport::load_demo();
    CHECK_THROWS_AS(apply_scenario(doc.model, *doc.scenarios, 0), SheetError);
    CHECK_THROWS_AS(apply_scenario(doc.model, *doc.scenarios, 8), SheetError);
}

TEST_CASE("apply_scenario touches only the table's columns") {
    WorkbookDocument doc = testsupport::load_demo();
    doc.model.set_input(addr("E7"), 150); // decision variable, not in the table
    Snapshot before = doc.model.snapshot_inputs();
    apply_scenario(doc.model, *doc.scenarios, 2);
    Snapshot after = doc.model.snapshot_inputs();

    std::set<CellAddress> covered(doc.scenarios->columns.begin(),
                                  doc.scenarios->columns.end());
    for (const auto& [a, v] : before.values) {
        if (covered.count(a)) continue;
        CHECK(after.values.at(a).identical(v));
    }
    CHECK(after.values.at(addr("E7")).as_number() == 150);
}

TEST_CASE("scenario_summary reproduces the full report column") {
    WorkbookDocument doc = testsupport::load_demo();
    SA1Table summary = scenario_summary(doc.model, *doc.scenarios, {addr("G13")});
    REQUIRE(summary.rows.size() == 7);
    const double expected[] = {38.33, 26.04, 50.33, 42.33, 32.33, 20.04, 54.33};
    for (size_t i = 0; i < 7; ++i) {
        CHECK(*summary.rows[i].scenario_number == static_cast<int>(i) + 1);
        CHECK(out_num(summary.rows[i].outputs[0]) ==
              doctest::Approx(expected[i]).epsilon(2.5e-4));
    }
    CHECK(*summary.rows[6].row_name == "Optimistic");
}

TEST_CASE("scenario_summary is live with respect to decision variables") {
    WorkbookDocument doc = testsupport::load_demo();
    SA1Table before = scenario_summary(doc.model, *doc.scenarios, {addr("G13")});
    // 100 extra Belex reps cost that scenario's rep cost each
    doc.model.set_input(addr("D7"), 200);
    SA1Table after = scenario_summary(doc.model, *doc.scenarios, {addr("G13")});
    for (size_t i = 0; i < 7; ++i) {
        double extra = 100.0 * doc.scenarios->rows[i].values[0] / 1e6;
        CHECK(out_num(after.rows[i].outputs[0]) ==
              doctest::Approx(out_num(before.rows[i].outputs[0]) - extra).epsilon(1e-9));
    }
}

TEST_CASE("scenario_summary restores state and follows row order") {
    WorkbookDocument doc = testsupport::load_demo();
    Model before = doc.model;
    ScenarioTable permuted = *doc.scenarios;
    std::swap(permuted.rows[0], permuted.rows[4]);

    SA1Table summary = scenario_summary(doc.model, permuted, {addr("G13")});
    CHECK(model_state_identical(doc.model, before));
    CHECK(*summary.rows[0].scenario_number == 5);
    CHECK(*summary.rows[0].row_name == "High Rep Cost");
    CHECK(out_num(summary.rows[0].outputs[0]) == doctest::Approx(32.3343).epsilon(1e-6));
    CHECK(*summary.rows[4].scenario_number == 1);
}

TEST_CASE("single-scenario table equals apply_scenario") {
    WorkbookDocument doc = testsupport::load_demo();
    ScenarioTable one;
    one.columns = doc.scenarios->columns;
    one.rows.push_back(doc.scenarios->rows[2]);
    SA1Table summary = scenario_summary(doc.model, one, {addr("G13")});
    REQUIRE(summary.rows.size() == 1);
    CHECK(out_num(summary.rows[0].outputs[0]) == doctest::Approx(50.3296).epsilon(1e-9));
}

TEST_CASE("scenario table validation") {
    WorkbookDocument doc = testsupport::load_demo();
    ScenarioTable bad = *doc.scenarios;
    bad.rows[1].values.pop_back();
    CHECK_THROWS_AS(validate_scenario_table(bad, doc.model.workbook(), false), SheetError);

    ScenarioTable wrong_col = *doc.scenarios;
    wrong_col.columns[0] = addr("G13"); // not an input
    CHECK_THROWS_AS(validate_scenario_table(wrong_col, doc.model.workbook(), false),
                    SheetError);
}
