#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "geoprec/io.hpp"
#include "geoprec/matrix.hpp"

namespace geoprec {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(GEOPREC_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Value after "key: " in the command summary.
double summary_value(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + ": ");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(text.substr(pos + key.size() + 2));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("geoprec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    DenseMatrix d = DenseMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 10.0;
    write_matrix(dir_ / "diag.mtx", d);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST_F(CliTest, ConditionExampleOne) {
  const CliRun r = run({"condition", "--input", data("example1.mtx"), "--kind", "euclidean"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NEAR(std::stod(r.out), 11.77, 5e-3);
  const CliRun left = run({"baseline", "--input", data("example1.mtx"), "--method", "jacobi-left"});
  EXPECT_NEAR(summary_value(left.out, "kappa after"), 15.35, 1e-2);
  const CliRun sym = run({"baseline", "--input", data("example1.mtx"), "--method", "jacobi-sym"});
  EXPECT_NEAR(summary_value(sym.out, "kappa after"), 12.59, 1e-2);
}

TEST_F(CliTest, PreconditionDiagonal) {
  const CliRun r = run({"precondition", "--input", (dir_ / "diag.mtx").string(), "--scheme", "diag", "--eps", "1e-6",
                     "--out", (dir_ / "run.csv").string(), "--emit-preconditioner", (dir_ / "x.mtx").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("termination: certified"), std::string::npos) << r.out;
  EXPECT_NEAR(summary_value(r.out, "final kF"), 2.0, 1e-3);
  const std::string csv = slurp(dir_ / "run.csv");
  EXPECT_EQ(csv.rfind("iter,value,grad_norm,duality_bound,kF,kappa\n", 0), 0u);
  EXPECT_NE(csv.find("# termination=certified"), std::string::npos);

  const DenseMatrix x = read_matrix(dir_ / "x.mtx").to_dense();
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 10.0;
  EXPECT_NEAR(condition_frobenius(ComplexMatrix(DenseMatrix(x * a))), summary_value(r.out, "final kF"), 1e-9);
}

TEST_F(CliTest, OutputIsDeterministic) {
  for (const char* name : {"a.csv", "b.csv"}) {
    const CliRun r = run({"precondition", "--input", data("example1.mtx"), "--side", "both", "--max-iters", "50",
                       "--out", (dir_ / name).string()});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
  }
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
}

TEST_F(CliTest, StochasticRunIsSeeded) {
  std::string first;
  for (int k = 0; k < 2; ++k) {
    const CliRun r = run({"precondition", "--input", data("example1.mtx"), "--stochastic", "--probes", "50",
                       "--max-iters", "5", "--seed", "7"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    if (k == 0) first = r.out;
    else EXPECT_EQ(r.out, first);
  }
}

TEST_F(CliTest, PolysysActions) {
  const CliRun shuffled = run({"polysys-precondition", "--input", data("example2.json")});
  ASSERT_EQ(shuffled.code, cli::kOk) << shuffled.err;
  EXPECT_NEAR(summary_value(shuffled.out, "initial mu_F"), std::sqrt(6.0), 1e-9);
  EXPECT_LE(summary_value(shuffled.out, "final kF"), summary_value(shuffled.out, "initial mu_F") + 1e-12);

  const CliRun full_run = run({"polysys-precondition", "--input", data("example2.json"), "--action", "full"});
  ASSERT_EQ(full_run.code, cli::kOk) << full_run.err;
  // The torus action needs nonzero coordinates; Example 2 sits at the origin.
  const CliRun sparse_run = run({"polysys-precondition", "--input", data("example2.json"), "--action", "sparse",
                                 "--scheme", "diag", "--max-iters", "20"});
  EXPECT_EQ(sparse_run.code, cli::kInputError);
  EXPECT_NE(sparse_run.err.find("ZeroCoordinate"), std::string::npos);
}

TEST_F(CliTest, Baselines) {
  for (const char* method : {"jacobi-left", "jacobi-sym", "sinkhorn"}) {
    const CliRun r = run({"baseline", "--input", data("example1.mtx"), "--method", method, "--out",
                       (dir_ / "scaled.mtx").string()});
    ASSERT_EQ(r.code, cli::kOk) << method << ": " << r.err;
    EXPECT_NEAR(condition_frobenius(read_matrix(dir_ / "scaled.mtx")), summary_value(r.out, "kF after"), 1e-9);
  }
}

TEST_F(CliTest, BenchSmallSuite) {
  const CliRun r = run({"bench", "--n", "6", "--samples", "3", "--block-size", "2", "--threads", "2", "--out",
                     (dir_ / "bench.csv").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("instances: 3"), std::string::npos);
  EXPECT_NE(r.out.find("pearson(kF, kappa): "), std::string::npos);
  EXPECT_FALSE(slurp(dir_ / "bench.csv").empty());
}

TEST_F(CliTest, UsageErrors) {
  const CliRun unknown = run({"condition", "--input", data("example1.mtx"), "--bogus"});
  EXPECT_EQ(unknown.code, cli::kUsage);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"precondition", "--input", data("example1.mtx"), "--scheme", "tridiag"}).code, cli::kUsage);
  EXPECT_EQ(run({"bench", "--suite", "dir"}).code, cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST_F(CliTest, InputErrors) {
  std::ofstream(dir_ / "bad.mtx") << "not a matrix market file\n";
  const CliRun r = run({"condition", "--input", (dir_ / "bad.mtx").string()});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  write_matrix(dir_ / "zero.mtx", DenseMatrix(DenseMatrix::Zero(2, 2)));
  EXPECT_EQ(run({"precondition", "--input", (dir_ / "zero.mtx").string()}).code, cli::kInputError);
}

}  // namespace
}  // namespace geoprec
