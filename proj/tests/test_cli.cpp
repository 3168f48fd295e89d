#include <gtest/gtest.h>

#include <filesystem>

#include "treespace/cli.hpp"

using namespace treespace;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(TREESPACE_SOURCE_DIR) + "/data/" + name; }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("treespace_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST(CliDistance, SharedSplitPair) {
  CliRun r = run({"distance", "-i", data("t4_pair.nwk")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["distance"].get<double>(), 7.0, 1e-12);
  EXPECT_EQ(j["carrier_number"], 1);
  EXPECT_EQ(j["parts"].size(), 1u);
  EXPECT_EQ(j["common"][0]["split"], "a|b");
}

TEST(CliDistance, IdenticalFiles) {
  CliRun r = run({"distance", "-i", data("cone_base.nwk"), "-i", data("cone_base.nwk")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["distance"].get<double>(), 0.0);
  EXPECT_EQ(j["carrier_number"], 0);
}

TEST(CliDistance, Errors) {
  CliRun bad = run({"distance", "-i", data("malformed.nwk")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("line 3, column 1"), std::string::npos) << bad.err;
  EXPECT_EQ(run({"distance", "-i", data("cone_base.nwk"), "-i", data("spider_511.nwk")}).code, 3);
  EXPECT_EQ(run({"distance", "-i", data("spider_511.nwk")}).code, 2);
  EXPECT_EQ(run({"distance", "-i", data("no_such_file.nwk"), "-i", data("cone_base.nwk")}).code, 2);
  EXPECT_EQ(run({"distance"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliLogmap, ConePointRowAndIdentity) {
  CliRun r = run({"logmap", "-i", data("cone_base.nwk"), "-i", data("cone_targets.nwk")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "index,a|b,a|b|c,singular,cell_boundary");
  double x = 0, y = 0;
  ASSERT_EQ(std::sscanf(row1.c_str(), "1,%lf,%lf,", &x, &y), 2);
  EXPECT_NEAR(x, -10.8, 1e-12);
  EXPECT_NEAR(y, -14.4, 1e-12);
  EXPECT_NE(row1.find(",true,false"), std::string::npos);
  EXPECT_EQ(row2, "2,0,0,false,false");
}

TEST(CliLogmap, BookPagesAndUnsupportedBase) {
  fs::path dir = scratch_dir("logmap");
  std::string base = write(dir / "base.nwk", "(((a,b):1,c,d):1.5,e)r;\n");
  CliRun r = run({"logmap", "-i", base, "-i", data("book_symmetric.nwk")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("index,page,off_spine,a|b,a|b|c|d"), std::string::npos);
  EXPECT_NE(r.out.find(",alpha,"), std::string::npos);
  EXPECT_NE(r.out.find(",beta,"), std::string::npos);
  EXPECT_NE(r.out.find(",gamma,"), std::string::npos);
  std::string star = write(dir / "star.nwk", "((a,b):1,c,d,e)r;\n");
  EXPECT_EQ(run({"logmap", "-i", star, "-i", data("book_symmetric.nwk")}).code, 4);
}

TEST(CliMean, Examples) {
  CliRun single = run({"mean", "-i", data("cone_base.nwk")});
  ASSERT_EQ(single.code, 0) << single.err;
  auto j = nlohmann::json::parse(single.out);
  EXPECT_EQ(j["newick"], "(((a,b):3,c):4,d)r;");
  EXPECT_EQ(j["certificate"]["residual"].get<double>(), 0.0);

  CliRun spider = run({"mean", "-i", data("spider_511.nwk")});
  ASSERT_EQ(spider.code, 0) << spider.err;
  EXPECT_NEAR(nlohmann::json::parse(spider.out)["coordinates"]["a|b"].get<double>(), 1.0, 1e-8);

  CliRun book = run({"mean", "-i", data("book_symmetric.nwk")});
  ASSERT_EQ(book.code, 0) << book.err;
  auto b = nlohmann::json::parse(book.out);
  EXPECT_EQ(b["codim"], 1);
  EXPECT_EQ(b["certificate"]["case"], "a");

  fs::path dir = scratch_dir("mean");
  CliRun weighted = run({"mean", "-i", data("t4_weighted.csv"), "--csv-output", (dir / "mean.csv").string()});
  ASSERT_EQ(weighted.code, 0) << weighted.err;
  EXPECT_NEAR(nlohmann::json::parse(weighted.out)["coordinates"]["a|b|c"].get<double>(), 1.25, 1e-9);
  EXPECT_NE(slurp(dir / "mean.csv").find("a|b,a|b|c"), std::string::npos);
}

TEST(CliMean, NonConvergenceReportsLastIterate) {
  CliRun r = run({"mean", "-i", data("t4_sample.nwk"), "--max-iter", "1"});
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("last iterate"), std::string::npos);
}

TEST(CliClt, PointMassAndDeterminism) {
  fs::path dir = scratch_dir("clt");
  auto config = [&](const std::string& tag) {
    nlohmann::json j = {{"generator", {{"type", "point_mixture"}, {"trees", {"(((a,b):3,c):4,d)r;", "((a,b):1,(c,d):2)r;"}}}},
                        {"n", 40},
                        {"replicates", 30},
                        {"seed", 9},
                        {"outputs",
                         {{"report", (dir / (tag + ".json")).string()},
                          {"residuals", (dir / (tag + ".csv")).string()},
                          {"histogram", (dir / (tag + "_hist.csv")).string()}}}};
    return write(dir / (tag + "_config.json"), j.dump());
  };
  std::string first = config("first");
  std::string second = config("second");
  CliRun a = run({"clt", "--config", first});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("predicted covariance"), std::string::npos);
  CliRun b = run({"clt", "--config", second});
  ASSERT_EQ(b.code, 0) << b.err;
  auto ra = nlohmann::json::parse(slurp(dir / "first.json"));
  auto rb = nlohmann::json::parse(slurp(dir / "second.json"));
  ra.erase("config");
  rb.erase("config");
  EXPECT_EQ(ra.dump(), rb.dump());
  EXPECT_EQ(slurp(dir / "first.csv"), slurp(dir / "second.csv"));

  nlohmann::json pm = {{"generator", {{"type", "point_mixture"}, {"trees", {"(((a,b):3,c):4,d)r;"}}}},
                       {"n", 10},
                       {"replicates", 5}};
  CliRun p = run({"clt", "--config", write(dir / "pm.json", pm.dump()), "-o", (dir / "pm_report.json").string()});
  ASSERT_EQ(p.code, 0) << p.err;
  auto rp = nlohmann::json::parse(slurp(dir / "pm_report.json"));
  for (const auto& row : rp["residuals"]) {
    for (const auto& x : row) EXPECT_EQ(x.get<double>(), 0.0);
  }
}

TEST(CliClt, ConfigErrorsAndBudget) {
  fs::path dir = scratch_dir("clt_errors");
  EXPECT_EQ(run({"clt", "--config", write(dir / "broken.json", "{\"n\": ")}).code, 2);
  EXPECT_EQ(run({"clt", "--config", write(dir / "bad.json", R"({"generator": {"type": "x"}, "n": 3, "replicates": 3})")}).code, 2);
  nlohmann::json big = {{"generator", {{"type", "point_mixture"}, {"trees", {"(((a,b):3,c):4,d)r;"}}}},
                        {"n", 100000},
                        {"replicates", 100000}};
  EXPECT_EQ(run({"clt", "--config", write(dir / "big.json", big.dump())}).code, 6);
}

TEST(CliClt, ShippedConfigsParse) {
  for (const char* name : {"cone_t4.json", "book_a.json", "book_b.json", "book_c.json", "book_d.json", "point_mass.json",
                           "euclidean.json"}) {
    std::ifstream f(std::string(TREESPACE_SOURCE_DIR) + "/configs/" + name);
    ASSERT_TRUE(f) << name;
    EXPECT_NO_THROW(clt_config_from_json(nlohmann::json::parse(f))) << name;
  }
}
