#include "wifimec/allocator.hpp"
#include "wifimec/hungarian.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>

using namespace wifimec;

namespace {

double brute_force_min(const Matrix& c) {
  std::vector<int> perm(c.rows());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) s += c(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::set<std::vector<int>> brute_force_partitions(int n, int budget) {
  std::set<std::vector<int>> out;
  std::vector<int> idx(n, 0);
  const int sizes[] = {1, 2, 4, 9, 18, 36};
  while (true) {
    std::vector<int> p;
    for (int i : idx) p.push_back(sizes[i]);
    std::sort(p.begin(), p.end());
    if (std::accumulate(p.begin(), p.end(), 0) <= budget) out.insert(p);
    int pos = 0;
    while (pos < n && ++idx[pos] == 6) idx[pos++] = 0;
    if (pos == n) break;
  }
  return out;
}

struct Fixture {
  SlotTasks tasks;
  std::vector<double> gains;
  ScenarioConfig cfg;
  ChannelParams channel;
  RateTable table = RateTable::defaults();
  SlotView view() const { return {tasks, gains, cfg, channel, table}; }
};

}  // namespace

TEST_CASE("hungarian on small matrices") {
  Matrix a(2, 2);
  a << 1, 2, 3, 5;
  const Assignment s = hungarian(a);
  CHECK(s.column_of_row == std::vector<int>{1, 0});
  CHECK(s.cost == 5.0);

  Matrix d = Matrix::Constant(4, 4, 3.0);
  d.diagonal().setZero();
  const Assignment id = hungarian(d);
  CHECK(id.column_of_row == std::vector<int>{0, 1, 2, 3});
  CHECK(id.cost == 0.0);

  CHECK_THROWS_AS(hungarian(Matrix(2, 3)), std::invalid_argument);
  CHECK(hungarian(Matrix(0, 0)).column_of_row.empty());
}

TEST_CASE("hungarian agrees with exhaustive search") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int n = 1; n <= 6; ++n)
    for (int trial = 0; trial < 40; ++trial) {
      Matrix c(n, n);
      for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
      const Assignment s = hungarian(c);
      CHECK(s.cost == brute_force_min(c));
      std::vector<int> cols = s.column_of_row;
      std::sort(cols.begin(), cols.end());
      for (int i = 0; i < n; ++i) CHECK(cols[i] == i);
    }
}

TEST_CASE("hungarian avoids infeasible entries when it can") {
  const double inf = std::numeric_limits<double>::infinity();
  Matrix c(2, 2);
  c << inf, 5, 1, inf;
  const Assignment s = hungarian(c);
  CHECK(s.column_of_row == std::vector<int>{1, 0});
  CHECK_FALSE(s.uses_infeasible);
  CHECK(s.cost == 6.0);
  c << inf, inf, 1, 2;
  const Assignment f = hungarian(c);
  CHECK(f.uses_infeasible);
  CHECK(f.cost == inf);
  CHECK(infeasible_surrogate(c) == doctest::Approx(2e6));
}

TEST_CASE("partition enumeration") {
  CHECK(enumerate_partitions(1, 36).size() == 6);
  CHECK(enumerate_partitions(2, 36).size() == 15);
  CHECK(enumerate_partitions(37, 36).empty());
  CHECK(enumerate_partitions(36, 36).size() == 1);
  CHECK_THROWS(enumerate_partitions(0, 36));
  for (int n = 1; n <= 5; ++n) {
    const auto parts = enumerate_partitions(n, 36);
    std::set<std::vector<int>> got;
    for (const auto& p : parts) {
      std::vector<int> u;
      for (RuSize r : p) u.push_back(units(r));
      CHECK(std::is_sorted(u.begin(), u.end()));
      CHECK(total_units(p) <= 36);
      got.insert(u);
    }
    CHECK(got.size() == parts.size());
    CHECK(got == brute_force_partitions(n, 36));
  }
}

TEST_CASE("priorities") {
  const std::array<double, 3> w{1.0 / 3, 1.0 / 3, 1.0 / 3};
  SUBCASE("identical stations share equally") {
    const std::vector<ComputeTask> t(4, ComputeTask{3e6, 1e9, 1.0});
    const std::vector<int> caps(4, 7);
    for (const auto& p : priority(t, caps, w)) CHECK(p.value == doctest::Approx(0.25));
  }
  SUBCASE("single station") {
    const std::vector<ComputeTask> t{{3e6, 1e9, 1.0}};
    CHECK(priority(t, std::vector<int>{3}, w)[0].value == doctest::Approx(1.0));
  }
  SUBCASE("two stations evaluated by hand") {
    const std::vector<ComputeTask> t{{2e6, 1e9, 1.0}, {4e6, 1e9, 1.0}};
    const std::vector<int> caps{4, 4};
    const auto p = priority(t, caps, w);
    // 1/3 * 1/3 + 1/3 * 1/2 + 1/3 * 1/2 = 4/9, and 5/9 for the other.
    CHECK(p[0].value == doctest::Approx(4.0 / 9));
    CHECK(p[1].value == doctest::Approx(5.0 / 9));
    CHECK(p[0].value + p[1].value == doctest::Approx(1.0));
    const std::vector<double> v{p[0].value, p[1].value};
    const auto shares = allocate_compute(v, 1e10);
    CHECK(shares[0] == doctest::Approx(4.444444444e9));
    CHECK(shares[1] == doctest::Approx(5.555555556e9));
  }
  SUBCASE("scaling every data size leaves priorities unchanged") {
    std::vector<ComputeTask> t{{2e6, 9e8, 0.9}, {3.5e6, 1.1e9, 1.2}, {2.7e6, 1e9, 1.0}};
    const std::vector<int> caps{12, 5, 1};
    const auto before = priority(t, caps, w);
    for (auto& x : t) x.data_bits *= 7.5;
    const auto after = priority(t, caps, w);
    for (std::size_t m = 0; m < t.size(); ++m) CHECK(after[m].value == doctest::Approx(before[m].value));
  }
  CHECK(priority({}, {}, w).empty());
  CHECK(capability_from_mcs(std::nullopt) == 1);
  CHECK(capability_from_mcs(McsIndex(0)) == 1);
  CHECK(capability_from_mcs(McsIndex(11)) == 12);
}

TEST_CASE("cpu shares") {
  const std::vector<double> eq{0.5, 0.5};
  const auto s = allocate_compute(eq, 1e10);
  CHECK(s[0] == doctest::Approx(5e9));
  CHECK(s[1] == doctest::Approx(5e9));
  CHECK(allocate_compute(std::vector<double>{1.0}, 1e10)[0] == 1e10);
}

TEST_CASE("efficiency matrix") {
  const ChannelParams ch;
  const RateTable t = RateTable::defaults();
  SUBCASE("one station, one RU") {
    const std::vector<Transmitter> s{{1e7, 1e-7, 0.5}};
    const Matrix e = efficiency_matrix(s, {RuSize::k106}, 0.8, ch, t);
    REQUIRE(e.rows() == 1);
    const double r = 102 * (25.0 / 3) / 13.6e-6;
    CHECK(e(0, 0) == doctest::Approx(0.8 * 1e7 / r + 0.2 * 0.5 * 1e7 / r));
  }
  SUBCASE("two stations on a 4 + 9 partition") {
    // gain 1e-9 at 0.5 W gives 41.9 dB on 4 units and 38.4 dB on 9: MCS 11 on both.
    // Rates 62.5 Mb/s and 143.38 Mb/s; weighted cost = 0.8 T + 0.2 * 0.5 T = 0.9 T.
    const std::vector<Transmitter> s{{1e7, 1e-9, 0.5}, {2e7, 1e-9, 0.5}};
    const Matrix e = efficiency_matrix(s, {RuSize::k106, RuSize::k242}, 0.8, ch, t);
    CHECK(e(0, 0) == doctest::Approx(0.144));
    CHECK(e(0, 1) == doctest::Approx(0.9 * 1e7 / 143382352.94));
    CHECK(e(1, 0) == doctest::Approx(0.288));
    CHECK(e(1, 1) == doctest::Approx(0.9 * 2e7 / 143382352.94));
  }
  SUBCASE("costs fall as the RU grows at a fixed MCS") {
    const std::vector<Transmitter> s{{1.2e7, 1e-6, 0.5}};
    const Matrix c = transmit_cost_table(s, 0.8, ch, t);
    for (int j = 1; j < 6; ++j) CHECK(c(0, j) <= c(0, j - 1));
  }
  SUBCASE("unreachable links are infinite") {
    const std::vector<Transmitter> s{{1e7, 1e-20, 0.5}};
    CHECK(std::isinf(transmit_cost_table(s, 0.8, ch, t)(0, 0)));
  }
}

TEST_CASE("allocation") {
  Fixture f;
  SUBCASE("nothing to transmit") {
    f.cfg.n_compute = 2;
    f.cfg.n_comm = 0;
    f.tasks.compute = {{3e6, 1e9, 1.0}, {3e6, 1e9, 1.0}};
    f.gains = {1e-7, 1e-7};
    const std::vector<int> a{0, 0};
    const Allocation alloc = allocate(f.view(), a);
    CHECK(alloc.ru_assignment.empty());
    CHECK(alloc.cpu_shares.empty());
    CHECK(alloc.demoted.empty());
  }
  SUBCASE("a lone communication station gets its cheapest RU") {
    f.cfg.n_compute = 0;
    f.cfg.n_comm = 1;
    f.tasks.comm = {{1.5e7, 10.0}};
    f.gains = {3e-9};
    const Allocation alloc = allocate(f.view(), {});
    const std::vector<Transmitter> s{{1.5e7, 3e-9, f.cfg.tx_power}};
    const Matrix c = transmit_cost_table(s, f.cfg.lambda, f.channel, f.table);
    Eigen::Index best = 0;
    c.row(0).minCoeff(&best);
    REQUIRE(alloc.ru_assignment.count(0) == 1);
    CHECK(alloc.ru_assignment.at(0) == kRuSizes[best]);
  }
  SUBCASE("37 transmitters demote the lowest-priority compute station") {
    f.cfg.n_compute = 34;
    f.cfg.n_comm = 3;
    for (int m = 0; m < 34; ++m) f.tasks.compute.push_back({3e6 + 1e4 * m, 1e9, 1.0});
    f.tasks.compute[7].data_bits = 2.5e6;  // smallest data rate demand, equal cycles and capability
    f.tasks.comm = {{1e6, 10.0}, {1e6, 10.0}, {1e6, 10.0}};
    f.gains.assign(37, 1e-7);
    const std::vector<int> a(34, 1);
    const Allocation alloc = allocate(f.view(), a);
    CHECK(alloc.demoted == std::set<int>{7});
    CHECK(total_units(alloc.partition) <= 36);
    CHECK(alloc.ru_assignment.size() == 36);
    for (int n = 34; n < 37; ++n) CHECK(alloc.ru_assignment.count(n) == 1);
    CHECK_FALSE(check_constraints(alloc, a, f.cfg).has_value());
  }
  SUBCASE("ties in priority demote the highest index") {
    f.cfg.n_compute = 37;
    f.cfg.n_comm = 0;
    f.tasks.compute.assign(37, ComputeTask{3e6, 1e9, 1.0});
    f.gains.assign(37, 1e-7);
    const std::vector<int> a(37, 1);
    CHECK(allocate(f.view(), a).demoted == std::set<int>{36});
  }
}

TEST_CASE("random allocations satisfy the resource constraints") {
  Rng rng(77);
  std::uniform_int_distribution<int> mdist(0, 10), ndist(0, 3), bit(0, 1);
  std::uniform_real_distribution<double> dist(1.0, 60.0);
  const RateTable table = RateTable::defaults();
  for (int trial = 0; trial < 300; ++trial) {
    Fixture f;
    f.cfg.n_compute = mdist(rng);
    f.cfg.n_comm = ndist(rng);
    f.tasks = generate_tasks(rng, f.cfg, table);
    for (int l = 0; l < f.cfg.n_stations(); ++l) f.gains.push_back(channel_gain(path_loss_db(dist(rng), f.channel)));
    std::vector<int> a(f.cfg.n_compute);
    for (int& x : a) x = bit(rng);
    const Allocation alloc = allocate(f.view(), a);
    const auto violation = check_constraints(alloc, a, f.cfg);
    CHECK_MESSAGE(!violation.has_value(), violation.value_or(""));
    for (int n = 0; n < f.cfg.n_comm; ++n) CHECK(alloc.ru_assignment.count(f.cfg.n_compute + n) == 1);
    double sum = 0;
    for (const auto& [m, share] : alloc.cpu_shares) sum += share;
    if (!alloc.cpu_shares.empty()) CHECK(sum == doctest::Approx(f.cfg.f_mec_total).epsilon(1e-12));
  }
}
