#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "telesched/error.hpp"
#include "telesched/laplace.hpp"
#include "telesched/special.hpp"

using namespace telesched;
using namespace telesched::laplace;

TEST_CASE("discipline names round-trip") {
  for (auto d : {Discipline::fifo, Discipline::lifo, Discipline::fifo_po, Discipline::lifo_po})
    CHECK(parse_discipline(discipline_name(d)) == d);
  CHECK(parse_discipline("LIFO_PO") == Discipline::lifo_po);
  CHECK_THROWS_AS(parse_discipline("random"), ValidationError);
  CHECK_THROWS_AS(DisciplineId::lifo_po(0), ValidationError);
}

TEST_CASE("scaled Bessel I1 matches the standard library") {
  for (double z : {1e-6, 0.1, 1.0, 7.5, 30.0, 300.0})
    CHECK(special::bessel_i1_scaled(z) == doctest::Approx(std::exp(-z) * std::cyl_bessel_i(1.0, z)).epsilon(1e-12));
  CHECK(special::bessel_i1_scaled(1e5) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * 1e5)).epsilon(1e-5));
}

TEST_CASE("infinite-buffer transforms agree with quadrature of their densities") {
  for (auto [a, m] : {std::pair{1.0, 2.0}, std::pair{2.5, 5.0}, std::pair{4.9, 5.0}, std::pair{0.3, 4.0}}) {
    const auto fifo = fifo_inf_laplace(a, m);
    const auto lifo = lifo_inf_laplace(a, m);
    CHECK(fifo(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lifo(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (double s : {0.01, 0.3, 1.0, 4.0}) {
      const double qf = oracle::laplace_quadrature([&](double t) { return fifo_inf_wait_pdf(a, m, t); }, s);
      const double ql = oracle::laplace_quadrature([&](double t) { return lifo_inf_busy_pdf(a, m, t); }, s);
      CHECK(std::abs(fifo(s) - qf) < 1e-8);
      CHECK(std::abs(lifo(s) - ql) < 1e-8);
    }
  }
}

TEST_CASE("infinite FIFO and LIFO share the mean wait") {
  // E[W] = 1/(mu - a) for both; LIFO has the larger spread
  const double a = 2.0, m = 3.0;
  const double h = 1e-5;
  const auto f = fifo_inf_laplace(a, m);
  const auto l = lifo_inf_laplace(a, m);
  const double mean_f = (f(0.0) - f(h)) / h;
  const double mean_l = (l(0.0) - l(h)) / h;
  CHECK(mean_f == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(mean_l == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(l(1.0) > f(1.0));  // exp(-W) convex: larger spread, larger mean
}

TEST_CASE("pushout transforms equal an explicit buffer-state solve") {
  for (int buf = 1; buf <= 20; ++buf) {
    for (auto [a, m] : {std::pair{2.5, 5.0}, std::pair{5.0, 5.0}, std::pair{7.0, 3.5}}) {
      const auto fifo = fifo_po_laplace(buf, a, m);
      const auto lifo = lifo_po_laplace(buf, a, m);
      CHECK(fifo(0.0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(lifo(0.0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(fifo.served_mass() == doctest::Approx(markov::service_probability(a / m, buf)).epsilon(1e-12));
      CHECK(lifo.served_mass() == doctest::Approx(markov::service_probability(a / m, buf)).epsilon(1e-12));
      for (double s : {0.0, 0.05, 1.0, 10.0}) {
        CHECK(std::abs(fifo.joint(s) - oracle::pushout_joint_transform(oracle::Stack::fifo, buf, a, m, s)) < 1e-10);
        CHECK(std::abs(lifo.joint(s) - oracle::pushout_joint_transform(oracle::Stack::lifo, buf, a, m, s)) < 1e-10);
      }
    }
  }
}

TEST_CASE("phase-type form reproduces the closed forms") {
  const QueueRates rates{3.0, 4.0};
  for (int buf : {1, 3, 8}) {
    const auto fpt = fifo_po_phase_type(buf, rates);
    const auto lpt = lifo_po_phase_type(buf, rates);
    const auto f = fifo_po_laplace(buf, rates.arrival, rates.service);
    const auto l = lifo_po_laplace(buf, rates.arrival, rates.service);
    for (double s : {0.0, 0.2, 2.0}) {
      CHECK(fpt.laplace(s) == doctest::Approx(f.joint(s)).epsilon(1e-12));
      CHECK(lpt.laplace(s) == doctest::Approx(l.joint(s)).epsilon(1e-12));
    }
    CHECK(oracle::integrate_half_line([&](double t) { return lpt.density(t); }) ==
          doctest::Approx(lpt.mass()).epsilon(1e-8));
    CHECK(lpt.cumulative(1e3) == doctest::Approx(lpt.mass()).epsilon(1e-10));
  }
}

TEST_CASE("LIFO-PO converges to infinite LIFO as the buffer grows") {
  const auto inf = lifo_inf_laplace(2.5, 5.0);
  const auto big = lifo_po_laplace(200, 2.5, 5.0);
  for (double s : {0.01, 0.1, 1.0}) CHECK(std::abs(big(s) - inf(s)) < 1e-6);
}

TEST_CASE("LIFO-PO table boundary values") {
  const QueueRates rates{2.0, 3.0};
  const auto w = lifo_po_table(5, rates, 0.4);
  CHECK(w(0) == doctest::Approx(1.0));
  CHECK(w(6) == doctest::Approx(0.0));
  for (int k = 1; k <= 6; ++k) CHECK(w(k) < w(k - 1));
  // one-step equation at depth k: (a + mu + s) W(k) = mu W(k-1) + a W(k+1)
  for (int k = 1; k <= 5; ++k)
    CHECK((rates.arrival + rates.service + 0.4) * w(k) ==
          doctest::Approx(rates.service * w(k - 1) + rates.arrival * w(k + 1)).epsilon(1e-12));
  // load exactly one
  const auto u = lifo_po_table(4, QueueRates{2.0, 2.0}, 0.0);
  for (int k = 0; k <= 5; ++k) CHECK(u(k) == doctest::Approx((5.0 - k) / 5.0));
}

TEST_CASE("FIFO-PO table satisfies its one-step equations") {
  const QueueRates r{2.0, 3.0};
  const int buf = 4;
  const double s = 0.3;
  const auto w = fifo_po_table(buf, r, s);
  auto at = [&](int j, int k) { return k == 0 ? 1.0 : w(j, k); };
  for (int k = 1; k <= buf; ++k) {
    for (int j = 0; j + k <= buf; ++j) {
      double arrive = 0.0;
      if (j + k < buf) arrive = at(j + 1, k);
      else if (k > 1) arrive = at(j + 1, k - 1);
      CHECK((r.arrival + r.service + s) * w(j, k) ==
            doctest::Approx(r.arrival * arrive + r.service * at(j, k - 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("fidelity density integrates to one and reproduces the mean") {
  const qmath::FidelityCurve curve(2.0 / 3.0, 1.0 / 3.0, 0.1);
  const double a = 2.5, m = 5.0;
  const auto pdf = [&](double x) { return fifo_inf_fidelity_pdf(a, m, curve, x); };
  const double lo = curve.constant() + 1e-12, hi = curve.initial();
  CHECK(oracle::integrate(pdf, lo, hi) == doctest::Approx(1.0).epsilon(1e-6));
  const double mean = oracle::integrate([&](double x) { return x * pdf(x); }, lo, hi);
  CHECK(mean == doctest::Approx(qmath::expected_fidelity(curve, fifo_inf_laplace(a, m))).epsilon(1e-8));
  for (double x : {0.7, 0.8, 0.95}) {
    const double generic = fidelity_pdf_transform([&](double t) { return fifo_inf_wait_pdf(a, m, t); }, curve, x);
    CHECK(generic == doctest::Approx(pdf(x)).epsilon(1e-12));
  }
}

TEST_CASE("phase weights and the two-phase mixture") {
  markov::DoubleQueueConfig cfg{5.0, 2.5, 10, 10};
  const auto w = phase_weights(cfg, DisciplineId::lifo_po(10), DisciplineId::lifo_po(10));
  CHECK(w.request + w.epr == doctest::Approx(1.0));
  CHECK(w.request > 0.0);
  CHECK(w.epr > 0.0);
  const qmath::FidelityCurve cr(0.5, 0.5, 0.01), ce(2.0 / 3.0, 1.0 / 3.0, 0.02);
  const double mean = phase_conditioned_mean(cfg, Discipline::lifo_po, Discipline::lifo_po, cr, ce);
  const double by_hand = w.request * qmath::expected_fidelity(cr, lifo_po_laplace(10, 2.5, 5.0)) +
                         w.epr * qmath::expected_fidelity(ce, lifo_po_laplace(10, 5.0, 2.5));
  CHECK(mean == doctest::Approx(by_hand).epsilon(1e-14));
  // mixture density integrates to one
  const double lo = 0.5 + 1e-12;
  const double total = oracle::integrate(
      [&](double x) {
        return phase_conditioned_pdf(cfg, DisciplineId::lifo_po(10), DisciplineId::lifo_po(10), cr, ce, x);
      },
      lo, 1.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-5));

  // no EPR buffer: every match is a request-phase match
  markov::DoubleQueueConfig one_sided{5.0, 2.5, 0, 10};
  const auto w1 = phase_weights(one_sided, DisciplineId::lifo_po(10), DisciplineId::lifo_po(1));
  CHECK(w1.request == doctest::Approx(1.0));
}

TEST_CASE("buffers must agree with the configuration") {
  markov::DoubleQueueConfig cfg{5.0, 2.5, 10, 10};
  const qmath::FidelityCurve c(0.5, 0.5, 0.01);
  CHECK_THROWS_AS(phase_conditioned_mean(cfg, DisciplineId::lifo_po(5), DisciplineId::lifo_po(10), c, c),
                  ValidationError);
  CHECK_THROWS_AS(phase_conditioned_mean(cfg, DisciplineId::fifo_inf(), DisciplineId::lifo_po(10), c, c),
                  ValidationError);
}
