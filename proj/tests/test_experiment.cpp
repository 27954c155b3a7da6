#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "horolab/experiment.hpp"

using namespace horolab;

namespace {

std::string config_path(const std::string& name) {
  return std::string(HOROLAB_CONFIG_DIR) + "/" + name + ".json";
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

Json small_axioms() {
  return Json{{"experiment", "axioms"},
              {"space", {{"kind", "lp"}, {"dimension", 2}, {"p", 2}}},
              {"seed", 7},
              {"samples", 500},
              {"sample_radius", 10}};
}

}  // namespace

TEST(RunExperiment, InvalidConfigsExitTwo) {
  EXPECT_EQ(run_experiment_file(config_path("invalid_p_half")).exit_status, 2);
  EXPECT_EQ(run_experiment_file(config_path("unknown_space")).exit_status, 2);
  EXPECT_EQ(run_experiment_file(config_path("no_such_config")).exit_status, 2);

  auto j = small_axioms();
  j["experiment"] = "teleport";
  EXPECT_EQ(run_experiment(j).exit_status, 2);
  j = small_axioms();
  j["samples"] = -3;
  EXPECT_EQ(run_experiment(j).exit_status, 2);
  j = small_axioms();
  j["grid_step"] = 0;
  EXPECT_EQ(run_experiment(j).exit_status, 2);
  j = small_axioms();
  j["claimed"] = {{"lambda", 0.5}};
  EXPECT_EQ(run_experiment(j).exit_status, 2);
  j = small_axioms();
  j["space"]["dimension"] = 9;
  EXPECT_EQ(run_experiment(j).exit_status, 2);
  EXPECT_EQ(run_experiment(Json::array()).exit_status, 2);

  const auto r = run_experiment_file(config_path("invalid_p_half"));
  EXPECT_TRUE(r.report.contains("error"));
  EXPECT_FALSE(r.report.at("pass").get<bool>());
}

TEST(RunExperiment, SmallAxiomsPass) {
  const auto r = run_experiment(small_axioms());
  EXPECT_EQ(r.exit_status, 0);
  EXPECT_TRUE(r.report.at("pass").get<bool>());
  std::vector<std::string> names;
  for (const auto& c : r.report.at("checks")) names.push_back(c.at("name"));
  for (const char* n : {"metric_axioms", "quasi_geodesic", "convexity_i", "theta_ii"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}

TEST(RunExperiment, UnderstatedConstantsExitOneWithWitness) {
  const auto r = run_experiment_file(config_path("cone_table_understated_C"));
  EXPECT_EQ(r.exit_status, 1);
  bool saw_witness = false;
  for (const auto& c : r.report.at("checks"))
    if (!c.at("pass").get<bool>()) {
      ASSERT_FALSE(c.at("witnesses").empty());
      const auto& w = c.at("witnesses").front();
      EXPECT_LT(w.at("slack").get<double>(), 0.0);
      EXPECT_LT(w.at("rhs").get<double>(), w.at("lhs").get<double>());
      saw_witness = true;
    }
  EXPECT_TRUE(saw_witness);
}

TEST(RunExperiment, SeedOverrideChangesTheRun) {
  const auto a = run_experiment(small_axioms());
  RunOptions opts;
  opts.seed = 8;
  const auto b = run_experiment(small_axioms(), opts);
  EXPECT_EQ(b.report.at("config").at("seed"), 8);
  EXPECT_NE(to_json_text(a.report), to_json_text(b.report));
}

TEST(RunExperiment, ReportsAreByteIdenticalAcrossWorkerCounts) {
  for (const char* name : {"gromov_tree", "cone_table_l2", "horoboundary_tree"}) {
    RunOptions one, many;
    many.workers = 5;
    const auto a = run_experiment_file(config_path(name), one);
    const auto b = run_experiment_file(config_path(name), many);
    EXPECT_EQ(to_json_text(a.report), to_json_text(b.report)) << name;
    EXPECT_EQ(a.tables, b.tables) << name;
  }
}

TEST(RunExperiment, GromovProductsTable) {
  const auto r = run_experiment_file(config_path("gromov_l1"));
  ASSERT_EQ(r.exit_status, 0);
  const auto& rows = r.report.at("data").at("products");
  // (10,0),(0,10) in l1 meet at radius 5
  EXPECT_NEAR(rows.at(0).at("product").get<double>(), 5.0, 0.01);
  EXPECT_NEAR(rows.at(1).at("product").get<double>(), 10.0, 0.01);
  EXPECT_EQ(line_count(r.tables.at("products.csv")), rows.size() + 1);
  const auto& seqs = r.report.at("data").at("sequences");
  EXPECT_TRUE(seqs.at("x_axis").at("escaping").get<bool>());
  EXPECT_FALSE(seqs.at("constant").at("escaping").get<bool>());
  EXPECT_TRUE(seqs.at("x_axis").at("same_ideal_point").at("x_axis_shift5").get<bool>());
  EXPECT_FALSE(seqs.at("x_axis").at("same_ideal_point").at("y_axis").get<bool>());
}

TEST(RunExperiment, WindowCsvHasOneRowPerPoint) {
  const auto r = run_experiment_file(config_path("horoboundary_l1"));
  ASSERT_EQ(r.exit_status, 0);
  const auto size = r.report.at("data").at("window").at("size").get<std::size_t>();
  std::size_t csvs = 0;
  for (const auto& [name, text] : r.tables)
    if (name.starts_with("phi_limit_") || name.starts_with("psi_limit_") ||
        name.starts_with("busemann_")) {
      EXPECT_EQ(line_count(text), size + 1) << name;
      EXPECT_TRUE(text.starts_with("index,base_distance,x0,x1,value\n")) << name;
      ++csvs;
    }
  EXPECT_GT(csvs, 0u);
}

TEST(Io, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::nan("")), "null");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "null");
}

TEST(Io, KeysAreSortedAndArraysFlat) {
  const Json j{{"zeta", 1}, {"alpha", Json::array({1.5, 2})}, {"mid", {{"b", true}, {"a", nullptr}}}};
  const std::string text = to_json_text(j);
  EXPECT_LT(text.find("\"alpha\""), text.find("\"mid\""));
  EXPECT_LT(text.find("\"mid\""), text.find("\"zeta\""));
  EXPECT_LT(text.find("\"a\""), text.find("\"b\""));
  EXPECT_NE(text.find("[1.5, 2]"), std::string::npos);
  EXPECT_EQ(Json::parse(text), j);
}

TEST(Io, ViolationRoundTrip) {
  VerificationReport r;
  r.name = "demo";
  r.record(3.0, 1.0, 0.0, "demo", [] { return std::vector<double>{1, 2}; });
  const auto j = to_json(r);
  EXPECT_EQ(j.at("violation_count"), 1);
  EXPECT_EQ(j.at("witnesses").at(0).at("slack"), -2.0);
  EXPECT_EQ(j.at("witnesses").at(0).at("inputs"), Json::array({1.0, 2.0}));
}

TEST(Io, EmitReportWritesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "horolab_emit_test";
  std::filesystem::remove_all(dir);
  auto r = run_experiment(small_axioms());
  r.tables["extra.csv"] = "a,b\n1,2\n";
  emit_report(r, dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "timing.json"));
  std::ifstream f(dir / "extra.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), "a,b\n1,2\n");
  std::ifstream rep(dir / "report.json");
  EXPECT_EQ(Json::parse(rep), r.report);
  std::filesystem::remove_all(dir);
}

TEST(Io, EmitReportFailsOnUnwritablePath) {
  const auto file = std::filesystem::temp_directory_path() / "horolab_not_a_dir";
  std::ofstream(file) << "x";
  const auto r = run_experiment(small_axioms());
  EXPECT_ANY_THROW(emit_report(r, (file / "sub").string()));
  std::filesystem::remove(file);
}

TEST(Config, Overrides) {
  const auto p = apply_overrides(CoarseParams::geodesic(), Json{{"k", 2}, {"C", 3}, {"theta_shift", 1}});
  EXPECT_EQ(p.k, 2.0);
  EXPECT_EQ(p.C, 3.0);
  EXPECT_EQ(p.theta(1.0), 2.0);
  EXPECT_ANY_THROW(apply_overrides(CoarseParams::geodesic(), Json{{"mu", 1}}));
}

TEST(Config, SequenceMultipliers) {
  EXPECT_EQ(sequence_multipliers(Json{{"ns", {1, 2, 3}}}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(sequence_multipliers(Json{{"range", {{"first", 1}, {"last", 4}}}}),
            (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(sequence_multipliers(Json{{"geometric", {{"first", 4}, {"factor", 2}, {"count", 3}}}}),
            (std::vector<double>{4, 8, 16}));
}
