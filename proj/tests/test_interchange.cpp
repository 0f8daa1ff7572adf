#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "telesched/error.hpp"
#include "telesched/sched_opt.hpp"

using namespace telesched;
using namespace telesched::sched_opt;

TEST_CASE("LIFO-PO realization on a hand instance") {
  // arrivals 0, 1, 2; one service at 3; buffer 2
  BufferInstance inst{{0.0, 1.0, 2.0}, {3.0}, 2};
  const auto a = realize_lifo_po(inst);
  CHECK_FALSE(a.served[0]);
  CHECK(a.departures[0] == doctest::Approx(2.0));  // pushed out by the third arrival
  CHECK_FALSE(a.served[1]);
  CHECK(std::isinf(a.departures[1]));  // still waiting at the end
  CHECK(a.served[2]);
  CHECK(a.departures[2] == doctest::Approx(3.0));
  CHECK_NOTHROW(check_realizable(inst, a));
  const auto w = wait_vector(inst, a);
  CHECK(w.infinite_count() == 2);
}

TEST_CASE("unrealizable assignments are rejected") {
  BufferInstance inst{{0.0, 1.0}, {2.0}, 2};
  Assignment bogus{{2.0, 2.0}, {true, true}};  // one service instant, two services
  CHECK_THROWS_AS(check_realizable(inst, bogus), ValidationError);
  BufferInstance bad{{1.0, 0.0}, {2.0}, 1};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("LIFO-PO majorizes every policy on small instances") {
  rng::Stream r(23, 0);
  std::int64_t policies = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + static_cast<int>(r.below(7));
    const int buf = 1 + static_cast<int>(r.below(3));
    const auto inst = random_instance(r, n, 1.0, 0.8, buf);
    const auto best = wait_vector(inst, realize_lifo_po(inst));
    policies += enumerate_policies(inst, [&](const Assignment& a) {
      CHECK_NOTHROW(check_realizable(inst, a));
      const auto w = wait_vector(inst, a);
      REQUIRE(w.infinite_count() == best.infinite_count());
      CHECK(weakly_supermajorized_by(w, best));
    });
  }
  CHECK(policies > 150);
}

TEST_CASE("interchange argument reaches LIFO-PO along a majorization chain") {
  rng::Stream r(31, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(r.below(15));
    const auto inst = random_instance(r, n, 1.0, 0.9, 1 + static_cast<int>(r.below(4)));
    const auto start = realize_random(inst, r);
    const auto proof = interchange_argument(inst, start);
    CHECK(proof.reached_lifo_po);
    CHECK(proof.final_assignment == realize_lifo_po(inst));
    CHECK(proof.chain.size() == proof.steps.size() + 1);
    for (const auto& s : proof.steps) CHECK(s.majorized);
    for (std::size_t i = 0; i + 1 < proof.chain.size(); ++i)
      CHECK(weakly_supermajorized_by(proof.chain[i], proof.chain[i + 1]));
    if (!proof.steps.empty()) CHECK(proof.to_text().find("rule") != std::string::npos);
  }
}

TEST_CASE("a schedule without crossings is the LIFO-PO schedule") {
  rng::Stream r(37, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = random_instance(r, 1 + static_cast<int>(r.below(6)), 1.0, 1.0, 2);
    const auto lifo = realize_lifo_po(inst);
    enumerate_policies(inst, [&](const Assignment& a) {
      const auto items = timed_items(inst, a);
      if (check_no_crossing(items).clean()) CHECK(a == lifo);
    });
  }
}
