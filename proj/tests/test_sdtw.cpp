#include "warpq/sdtw.hpp"

#include "support/sdtw_oracle.hpp"

#include "doctest.h"

#include <limits>
#include <random>

using namespace warpq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::RowVectorXd row(std::initializer_list<double> v) {
  Eigen::RowVectorXd r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

// Every consecutive pair differs by a listed step; columns never decrease.
void check_path(const WarpPath& path, const StepSet& steps, Eigen::Index n_rows) {
  REQUIRE_FALSE(path.pairs.empty());
  CHECK(path.pairs.front().first == 1);
  CHECK(path.pairs.back().first == n_rows);
  CHECK(path.pairs.front().second == path.a_star);
  CHECK(path.pairs.back().second == path.b_star);
  CHECK(path.a_star <= path.b_star);
  for (std::size_t i = 1; i < path.pairs.size(); ++i) {
    const auto dr = path.pairs[i].first - path.pairs[i - 1].first;
    const auto dc = path.pairs[i].second - path.pairs[i - 1].second;
    bool listed = false;
    for (const auto& s : steps.steps) listed |= (s.rows == dr && s.cols == dc);
    CHECK(listed);
    CHECK(dc >= 0);
  }
}

}  // namespace

TEST_CASE("local_cost: Euclidean distance between columns") {
  Eigen::MatrixXd x(1, 1), y(1, 1);
  x << 0;
  y << 3;
  CHECK(local_cost(x, y)(0, 0) == 3.0);

  Eigen::MatrixXd a(2, 1), b(2, 2);
  a << 1, 2;
  b << 4, 1,
       6, 2;
  const auto c = local_cost(a, b);
  CHECK(c(0, 0) == 5.0);
  CHECK(c(0, 1) == 0.0);
}

TEST_CASE("local_cost: feature dimension mismatch") {
  Eigen::MatrixXd a(2, 3), b(3, 3);
  a.setZero();
  b.setZero();
  try {
    local_cost(a, b);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
  }
}

TEST_CASE("accumulate: worked example X=(0,1), Y=(5,0,1,7)") {
  Eigen::MatrixXd x(1, 2), y(1, 4);
  x << 0, 1;
  y << 5, 0, 1, 7;
  const auto c = local_cost(x, y);
  const auto d = accumulate(c);
  CHECK(d.D.row(0) == row({5, 0, 1, 7}));
  CHECK(d.D(1, 0) == kInf);
  CHECK(d.D(1, 1) == 6.0);
  CHECK(d.D(1, 2) == 0.0);
  CHECK(d.D(1, 3) == 7.0);
  CHECK(best_end(d) == 3);

  const WarpPath p = backtrack(c, d, StepSet::standard(), 3);
  REQUIRE(p.pairs.size() == 2);
  CHECK(p.pairs[0] == std::pair<Eigen::Index, Eigen::Index>{1, 2});
  CHECK(p.pairs[1] == std::pair<Eigen::Index, Eigen::Index>{2, 3});
  CHECK(p.a_star == 2);
  CHECK(p.b_star == 3);

  const auto r = sdtw(x, y);
  CHECK(r.cost == 0.0);
  CHECK(r.path.a_star == 2);
  CHECK(r.path.b_star == 3);
}

TEST_CASE("accumulate: single row is the local cost") {
  Eigen::MatrixXd c(1, 5);
  c << 3, 1, 4, 1, 5;
  CHECK(accumulate(c).D == c);
}

TEST_CASE("accumulate: zero costs propagate to the last row") {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Zero(6, 10);
  const auto d = accumulate(c);
  // Unreachable cells exist (e.g. D[2,1]) but every reachable last-row cell is zero.
  for (Eigen::Index m = 0; m < 10; ++m) CHECK((d.D(5, m) == 0.0 || d.D(5, m) == kInf));
  CHECK(d.D(5, 9) == 0.0);
  CHECK(d.D(1, 0) == kInf);
}

TEST_CASE("accumulate: rows 2 and 3 cannot use the (3,2) step") {
  Eigen::MatrixXd c(4, 6);
  c.setOnes();
  const auto d = accumulate(c);
  CHECK(d.D(1, 0) == kInf);
  CHECK(d.D(1, 1) == 2.0);
  CHECK(d.D(2, 1) == kInf);
  CHECK(d.D(2, 2) == 3.0);
  // Row 4 is the first that can take (3,2), straight from row 1.
  CHECK(d.D(3, 2) == 2.0);
}

TEST_CASE("best_end: ties and unreachable cells") {
  CostMatrix<double> d;
  d.D.resize(1, 4);
  d.D << 3, 1, 1, 5;
  CHECK(best_end(d) == 2);
  d.D.resize(1, 3);
  d.D << kInf, kInf, 0.5;
  CHECK(best_end(d) == 3);
  d.D << kInf, kInf, kInf;
  CHECK_THROWS_AS(best_end(d), Error);
}

TEST_CASE("backtrack: identical sequences follow the diagonal") {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(4, 7);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
  const auto r = sdtw(x, x);
  CHECK(r.cost == 0.0);
  REQUIRE(r.path.pairs.size() == 7);
  for (Eigen::Index i = 0; i < 7; ++i) CHECK(r.path.pairs[static_cast<std::size_t>(i)] ==
                                             std::pair<Eigen::Index, Eigen::Index>{i + 1, i + 1});
  CHECK(r.path.a_star == 1);
  CHECK(r.path.b_star == 7);
}

TEST_CASE("sdtw: exact subsequence embedded in distant material") {
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(3, 40, 100.0);
  Eigen::MatrixXd x(3, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = static_cast<double>(i % 5);
  y.middleCols(17, 6) = x;
  const auto r = sdtw(x, y);
  CHECK(r.cost == 0.0);
  CHECK(r.path.a_star == 18);
  CHECK(r.path.b_star == 23);
}

TEST_CASE("sdtw: no alignment when the reference is too short") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 5);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Zero(2, 2);
  try {
    sdtw(x, y);
    FAIL("expected no alignment");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNoAlignment);
  }
}

TEST_CASE("backtrack: inconsistent cost matrix is an internal error") {
  Eigen::MatrixXd c(2, 3);
  c << 1, 1, 1,
       1, 1, 1;
  auto d = accumulate(c);
  d.D(1, 2) = 0.5;  // corrupted
  try {
    backtrack(c, d, StepSet::standard(), 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInternal);
  }
}

TEST_CASE("accumulate: step weights") {
  StepSet steps{{{1, 1, 2.0, 0.5}}};
  Eigen::MatrixXd c(2, 2);
  c << 1, 2,
       3, 4;
  const auto d = accumulate(c, steps);
  CHECK(d.D(1, 1) == 2.0 * 1 + 0.5 + 4);
  CHECK(d.D(1, 0) == kInf);
}

TEST_CASE("step set validation") {
  CHECK_THROWS_AS(StepSet{}.validate(), Error);
  CHECK_THROWS_AS((StepSet{{{0, 0}}}.validate()), Error);
  CHECK_THROWS_AS((StepSet{{{1, 1, 0.0, 0.0}}}.validate()), Error);
  CHECK_NOTHROW(StepSet::standard().validate());
}

TEST_CASE("sdtw works on single precision matrices") {
  Eigen::MatrixXf x(1, 2), y(1, 4);
  x << 0, 1;
  y << 5, 0, 1, 7;
  const auto r = sdtw(x, y);
  static_assert(std::is_same_v<decltype(r.cost), float>);
  CHECK(r.cost == 0.0f);
  CHECK(r.path.b_star == 3);
}

TEST_CASE("sdtw matches exhaustive enumeration on random small instances") {
  std::mt19937 rng(20210601);
  std::uniform_int_distribution<int> n_dist(1, 5), m_dist(1, 12), v_dist(0, 9);
  const StepSet steps = StepSet::standard();
  std::vector<std::pair<int, int>> oracle_steps;
  for (const auto& s : steps.steps) oracle_steps.emplace_back(s.rows, s.cols);

  int aligned = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = n_dist(rng), m = m_dist(rng);
    Eigen::MatrixXd x(1, n), y(1, m);
    for (int i = 0; i < n; ++i) x(0, i) = v_dist(rng);
    for (int j = 0; j < m; ++j) y(0, j) = v_dist(rng);

    std::vector<std::vector<long>> cost(static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(m)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            std::labs(static_cast<long>(x(0, i)) - static_cast<long>(y(0, j)));
    const auto expected = testing::brute_force_sdtw(cost, oracle_steps);

    CAPTURE(trial);
    if (!expected) {
      CHECK_THROWS_AS(sdtw(x, y, steps), Error);
      continue;
    }
    ++aligned;
    const auto got = sdtw(x, y, steps);
    CHECK(got.cost == static_cast<double>(expected->cost));
    CHECK(got.path.b_star == expected->b_star);
    CHECK(got.path.a_star == expected->a_star);
    REQUIRE(got.path.pairs.size() == expected->path.size());
    for (std::size_t k = 0; k < got.path.pairs.size(); ++k) {
      CHECK(got.path.pairs[k].first == expected->path[k].first);
      CHECK(got.path.pairs[k].second == expected->path[k].second);
    }
    check_path(got.path, steps, n);
  }
  CHECK(aligned >= 200);
}

TEST_CASE("properties: D >= C, path validity, extra columns never hurt") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> n_dist(1, 8), m_dist(8, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = n_dist(rng), m = m_dist(rng), k = 3;
    Eigen::MatrixXd x(k, n), y(k, m + 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = u(rng);

    const auto c = local_cost(x, y.leftCols(m));
    const auto d = accumulate(c);
    CHECK((d.D.array() >= c.array()).all());
    CHECK((d.D.array() >= 0.0).all());

    const auto d_more = accumulate(local_cost(x, y));
    const double restricted = d_more.D.row(n - 1).leftCols(m).minCoeff();
    CHECK(restricted <= d.D.row(n - 1).minCoeff());

    if (std::isfinite(d.D.row(n - 1).minCoeff())) {
      const auto r = sdtw_from_cost(c);
      check_path(r.path, StepSet::standard(), n);
    }
  }
}
