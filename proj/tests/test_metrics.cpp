#include <gtest/gtest.h>

#include "selectkit/errors.hpp"
#include "selectkit/io.hpp"
#include "selectkit/metrics.hpp"
#include "support.hpp"

using namespace selectkit;

TEST(Ho, CatRow) { EXPECT_NEAR(harmonic_mean_ho(0.0083, 0.9967, 0.146), 0.9426, 0.0005); }

TEST(Ho, PerfectScores) { EXPECT_DOUBLE_EQ(harmonic_mean_ho(0.0, 1.0, 0.0), 1.0); }

TEST(Ho, FailedErasureZeroes) { EXPECT_DOUBLE_EQ(harmonic_mean_ho(1.0, 0.9, 0.1), 0.0); }

TEST(Ho, OutOfRangeRejected) {
  EXPECT_THROW(harmonic_mean_ho(1.2, 0.5, 0.5), PreconditionError);
  EXPECT_THROW(harmonic_mean_ho(0.2, -0.1, 0.5), PreconditionError);
}

TEST(Summary, SingleRecord) {
  ConceptRecord r{"cat", 0.0083, 0.146, 0.9967, 0.9916, {}};
  auto rep = summarize_run({r});
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.mean.record.acc_e, r.acc_e);
  EXPECT_DOUBLE_EQ(rep.mean.ho, rep.rows[0].ho);
  EXPECT_NEAR(rep.rows[0].ho, 0.9426, 0.0005);
}

TEST(Summary, TwoIdenticalRecords) {
  ConceptRecord r{"dog", 0.0001, 0.19, 0.9963, 0.9941, {}};
  auto rep = summarize_run({r, r});
  EXPECT_NEAR(rep.mean.record.acc_g, r.acc_g, 1e-15);
  EXPECT_NEAR(rep.mean.ho, rep.rows[0].ho, 1e-15);
}

TEST(Summary, EmptyRejected) { EXPECT_THROW(summarize_run({}), PreconditionError); }

// Column means over the ten object concepts against the reference totals
// (3.61, 25.61, 98.02, 87.30). The boundary mean of the same rows is
// 93.528, which is what the arithmetic gives; the reference total differs.
TEST(Summary, ObjectTableMeans) {
  auto recs = load_records(testkit::fixture_path("table_select_rows.csv").string());
  ASSERT_EQ(recs.size(), 10u);
  auto rep = summarize_run(recs);
  EXPECT_NEAR(rep.mean.record.acc_e * 100, 3.61, 0.5);
  EXPECT_NEAR(rep.mean.record.acc_g * 100, 25.61, 0.5);
  EXPECT_NEAR(rep.mean.record.acc_s * 100, 98.02, 0.5);
  EXPECT_NEAR(rep.mean.record.acc_b * 100, 93.528, 1e-9);
  EXPECT_NEAR(rep.mean.ho * 100, 87.30, 0.5);
}

TEST(Records, CsvPercentDetectedAndExtrasKept) {
  auto recs = parse_records_csv("Concept,ACC_E,acc_g,acc_s,acc_b,cs_e\ncat,0.83,14.6,99.67,99.16,23.93\n");
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_NEAR(recs[0].acc_e, 0.0083, 1e-15);
  EXPECT_DOUBLE_EQ(recs[0].extra.at("cs_e"), 23.93);
}

TEST(Records, FractionScaleKept) {
  auto recs = parse_records_csv("concept,acc_e,acc_g,acc_s,acc_b\ncat,0.5,0.5,0.5,0.5\n");
  EXPECT_DOUBLE_EQ(recs[0].acc_e, 0.5);
  auto pct = parse_records_csv("concept,acc_e,acc_g,acc_s,acc_b\ncat,0.5,0.5,0.5,0.5\n",
                               Scale::percent);
  EXPECT_DOUBLE_EQ(pct[0].acc_e, 0.005);
}

TEST(Records, QuotedNames) {
  auto recs = parse_records_csv(
      "concept,acc_e,acc_g,acc_s,acc_b\n\"Nudity, Sexual\",0.1,0.2,0.9,0.8\n");
  EXPECT_EQ(recs[0].subject, "Nudity, Sexual");
}

TEST(Records, ErrorsCarryLine) {
  try {
    parse_records_csv("concept,acc_e,acc_g,acc_s,acc_b\ncat,0.1,0.2,0.9,0.8\ndog,x,0.2,0.9,0.8\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_records_csv("concept,acc_e,acc_g,acc_s\ncat,1,1,1\n"), ParseError);
  EXPECT_THROW(parse_records_csv("concept,acc_e,acc_g,acc_s,acc_b\ncat,1,1\n"), ParseError);
}

TEST(Records, JsonInput) {
  auto recs = parse_records_json(nlohmann::json::parse(
      R"([{"concept":"cat","acc_e":0.83,"acc_g":14.6,"acc_s":99.67,"acc_b":99.16}])"));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_NEAR(recs[0].acc_s, 0.9967, 1e-15);
}

TEST(Report, CsvAndJsonOutput) {
  auto rep = summarize_run({ConceptRecord{"garbage truck", 0.0175, 0.4333, 0.9693, 0.945, {}}});
  auto csv = report_to_csv(rep, true);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "concept,acc_e_pct,acc_g_pct,acc_s_pct,acc_b_pct,ho_pct");
  EXPECT_NE(csv.find("garbage truck,1.7500,43.3300,96.9300,94.5000,78.6558"), std::string::npos);
  auto j = report_to_json(rep, false);
  EXPECT_EQ(j.at("scale"), "fraction");
  EXPECT_NEAR(j.at("rows")[0].at("ho").get<double>(), 0.786558, 1e-6);
}
