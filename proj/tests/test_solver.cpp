#include <cmath>
#include <sstream>

#include <doctest.h>

#include "hops/error.hpp"
#include "hops/linalg.hpp"
#include "hops/solver.hpp"
#include "hops/svd.hpp"
#include "oracles.hpp"

using namespace hops;

namespace {

PolySpec free_spec(std::size_t n, std::size_t k2, std::size_t k3) {
  PolySpec s;
  s.input_dim = n;
  s.max_order = k3 > 0 ? 3 : (k2 > 0 ? 2 : 1);
  s.embed_dims = {n};
  if (s.max_order >= 2) s.embed_dims.push_back(k2);
  if (s.max_order >= 3) s.embed_dims.push_back(k3);
  return s;
}

std::vector<ReductionMap> random_reductions(std::size_t n, const PolySpec& spec,
                                            unsigned seed) {
  std::vector<ReductionMap> maps;
  for (std::size_t order = 2; order <= spec.max_order; ++order) {
    const std::size_t k = spec.embed_dims[order - 1];
    if (k == 0) {
      maps.emplace_back();
    } else {
      maps.push_back(ReductionMap::raw(oracle::random_orthonormal(n, k, seed + order)));
    }
  }
  return maps;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("gradient is zero at a perfect fit") {
  Matrix x = oracle::random_matrix(15, 3, 1);
  PolySpec spec = free_spec(3, 2, 2);
  auto maps = random_reductions(3, spec, 10);
  PolyProblem prob(x, oracle::random_vector(15, 2), spec, maps);

  auto theta = oracle::random_vector(prob.n_params(), 3);
  std::vector<double> yhat(15);
  prob.predict(theta, yhat);

  PolyProblem exact(x, yhat, spec, maps);
  std::vector<double> grad(prob.n_params());
  exact.gradient(theta, grad);
  for (double g : grad) CHECK(std::abs(g) <= 1e-9);
}

TEST_CASE("linear-order gradient has the closed form") {
  Matrix x = oracle::random_matrix(10, 4, 4);
  auto y = oracle::random_vector(10, 5);
  PolySpec spec = free_spec(4, 0, 0);
  PolyProblem prob(x, y, spec, {});

  auto theta = oracle::random_vector(prob.n_params(), 6);
  std::vector<double> grad(prob.n_params());
  prob.gradient(theta, grad);

  std::vector<double> yhat(10);
  prob.predict(theta, yhat);
  double r0 = 0.0;
  for (std::size_t p = 0; p < 10; ++p) r0 += 2.0 * (yhat[p] - y[p]);
  CHECK(grad[0] == doctest::Approx(r0).epsilon(1e-12));
  for (std::size_t c = 0; c < 4; ++c) {
    double rc = 0.0;
    for (std::size_t p = 0; p < 10; ++p) rc += 2.0 * (yhat[p] - y[p]) * x(p, c);
    CHECK(grad[1 + c] == doctest::Approx(rc).epsilon(1e-10));
  }
}

TEST_CASE("gradient matches central finite differences") {
  const std::size_t n = 3, m = 20;
  Matrix x = oracle::random_matrix(m, n, 7);
  auto y = oracle::random_vector(m, 8);
  PolySpec spec = free_spec(n, 3, 3);
  spec.lambda = {0.0, 0.0, 1e-2, 1e-3};
  auto maps = random_reductions(n, spec, 20);
  PolyProblem prob(x, y, spec, maps);

  auto theta = oracle::random_vector(prob.n_params(), 9, -0.5, 0.5);
  std::vector<double> grad(prob.n_params());
  prob.gradient(theta, grad);

  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < prob.n_params(); ++i) {
    auto tp = theta;
    auto tm = theta;
    tp[i] += h;
    tm[i] -= h;
    const double fd = (prob.loss_value(tp) - prob.loss_value(tm)) / (2.0 * h);
    const double rel = std::abs(fd - grad[i]) / std::max(1.0, std::abs(grad[i]));
    max_rel = std::max(max_rel, rel);
  }
  CHECK(max_rel < 1e-5);
}

TEST_CASE("step size: half on an identity design with centered labels") {
  // with X = I and sum(y) = 0 the residual tensors reproduce the numerator
  Matrix x = Matrix::identity(4);
  std::vector<double> y{1.0, -1.0, 2.0, -2.0};
  PolySpec spec = free_spec(4, 0, 0);
  PolyProblem prob(x, y, spec, {});

  std::vector<double> theta(prob.n_params(), 0.0);
  std::vector<double> grad(prob.n_params());
  prob.gradient(theta, grad);
  auto alpha = step_size(prob, grad, norm_sq(grad));
  REQUIRE(alpha.has_value());
  CHECK(*alpha == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("both step modes agree at iteration zero") {
  Matrix x = oracle::random_matrix(12, 3, 11);
  auto y = oracle::random_vector(12, 12);
  PolySpec spec = free_spec(3, 2, 0);
  auto maps = random_reductions(3, spec, 30);

  SolverConfig exact;
  exact.max_iter = 1;
  SolverConfig residual = exact;
  residual.alpha_mode = AlphaMode::residual;

  auto [m1, t1] = fit_polycg(x, y, spec, maps, exact);
  auto [m2, t2] = fit_polycg(x, y, spec, maps, residual);
  REQUIRE(t1.alpha.size() == 1);
  REQUIRE(t2.alpha.size() == 1);
  CHECK(t1.alpha[0] == t2.alpha[0]);
}

TEST_CASE("exact step is a local minimum along the direction") {
  Matrix x = oracle::random_matrix(25, 3, 13);
  auto y = oracle::random_vector(25, 14);
  PolySpec spec = free_spec(3, 3, 2);
  auto maps = random_reductions(3, spec, 40);
  PolyProblem prob(x, y, spec, maps);

  std::vector<double> theta(prob.n_params(), 0.0);
  std::vector<double> grad(prob.n_params());
  prob.gradient(theta, grad);
  std::vector<double> dir(prob.n_params());
  for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = -grad[i];
  auto alpha = step_size(prob, dir, norm_sq(grad));
  REQUIRE(alpha.has_value());

  auto at = [&](double a) {
    auto t = theta;
    axpy(a, dir, t);
    return prob.loss_value(t);
  };
  const double best = at(*alpha);
  CHECK(at(*alpha + 1e-6) >= best);
  CHECK(at(*alpha - 1e-6) >= best);
}

TEST_CASE("planted model is recovered to numerical zero") {
  const std::size_t n = 4, m = 60;
  Matrix x = oracle::random_matrix(m, n, 15);
  PolySpec spec = free_spec(n, 3, 2);
  auto maps = random_reductions(n, spec, 50);

  // labels generated by a random coefficient vector
  PolyProblem gen(x, std::vector<double>(m, 0.0), spec, maps);
  auto truth = oracle::random_vector(gen.n_params(), 16);
  std::vector<double> y(m);
  gen.predict(truth, y);

  SolverConfig cfg;
  cfg.max_iter = 4000;
  cfg.tolerance = 1e-15;
  auto [model, trace] = fit_polycg(x, y, spec, maps, cfg);
  CHECK(trace.loss.back() < 1e-8 * norm_sq(y));
}

TEST_CASE("order-1 fit matches the least-squares oracle") {
  Matrix x = oracle::random_matrix(30, 5, 17);
  auto y = oracle::random_vector(30, 18);
  PolySpec spec = free_spec(5, 0, 0);

  SolverConfig cfg;
  cfg.max_iter = 2000;
  cfg.tolerance = 1e-14;
  auto [model, trace] = fit_polycg(x, y, spec, {}, cfg);

  Matrix a(30, 6);
  for (std::size_t r = 0; r < 30; ++r) {
    a(r, 0) = 1.0;
    for (std::size_t c = 0; c < 5; ++c) a(r, c + 1) = x(r, c);
  }
  auto w = lstsq_minnorm(a, y);
  std::vector<double> ref(30), got = model.evaluate_batch(x);
  gemv(a, w, ref);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    num += (ref[i] - got[i]) * (ref[i] - got[i]);
    den += ref[i] * ref[i];
  }
  CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("expanded-monomial oracle equivalence and the residual-mode gap") {
  const std::size_t n = 4, m = 50;
  Matrix x = oracle::random_matrix(m, n, 19, 0.0, 1.0);
  auto y = oracle::random_vector(m, 20, 0.0, 2.0);
  PolySpec spec = free_spec(n, 3, 2);
  auto maps = random_reductions(n, spec, 60);

  Matrix phi = oracle::expand_monomials(x, spec, maps);
  auto w = lstsq_minnorm(phi, y);
  std::vector<double> ref(m);
  gemv(phi, w, ref);
  double oracle_loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    oracle_loss += (ref[i] - y[i]) * (ref[i] - y[i]);
  }

  SolverConfig cfg;
  cfg.max_iter = 5000;
  cfg.tolerance = 1e-10;
  auto [model, trace] = fit_polycg(x, y, spec, maps, cfg);
  auto got = model.evaluate_batch(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    num += (ref[i] - got[i]) * (ref[i] - got[i]);
    den += ref[i] * ref[i];
  }
  CHECK(std::sqrt(num / den) < 1e-5);

  // The residual-mode step length is the exact minimizer for the steepest
  // descent direction, not for the conjugate one, and on this instance the
  // mismatch compounds until the iterates overflow. The divergence error must
  // carry the trace collected so far.
  SolverConfig residual = cfg;
  residual.alpha_mode = AlphaMode::residual;
  try {
    auto [rmodel, rtrace] = fit_polycg(x, y, spec, maps, residual);
    CHECK(std::abs(rtrace.loss.back() - oracle_loss) <= 1e-3 * oracle_loss);
  } catch (const SolverDivergence& e) {
    CHECK(e.trace.iterations() > 0);
    CHECK(std::string(e.code()) == "solver.divergence");
  }
}

TEST_CASE("constant-only problem converges immediately") {
  Matrix x(6, 2);  // all-zero features: only the bias can act
  std::vector<double> y{5, 5, 5, 5, 5, 5};
  PolySpec spec = free_spec(2, 0, 0);
  SolverConfig cfg;
  auto [model, trace] = fit_polycg(x, y, spec, {}, cfg);
  CHECK(trace.iterations() <= 2);
  CHECK(model.bias == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(trace.stop_reason == StopReason::tolerance);
}

TEST_CASE("exact mode never increases the loss") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    Matrix x = oracle::random_matrix(30, 3, 700 + seed);
    auto y = oracle::random_vector(30, 800 + seed);
    PolySpec spec = free_spec(3, 2, 2);
    auto maps = random_reductions(3, spec, 900 + seed);
    SolverConfig cfg;
    cfg.max_iter = 300;
    cfg.tolerance = 1e-12;
    auto [model, trace] = fit_polycg(x, y, spec, maps, cfg);
    double prev = trace.initial_loss;
    for (double l : trace.loss) {
      CHECK(l <= prev + 1e-12 * trace.initial_loss);
      prev = l;
    }
  }
}

TEST_CASE("Fletcher-Reeves beta is reproducible from the trace") {
  Matrix x = oracle::random_matrix(40, 4, 21);
  auto y = oracle::random_vector(40, 22);
  PolySpec spec = free_spec(4, 3, 0);
  auto maps = random_reductions(4, spec, 70);
  SolverConfig cfg;
  cfg.max_iter = 50;
  cfg.tolerance = 1e-14;
  auto [model, trace] = fit_polycg(x, y, spec, maps, cfg);
  for (std::size_t j = 0; j + 1 < trace.iterations(); ++j) {
    if (std::isnan(trace.beta[j])) continue;
    const double expect =
        (trace.grad_norm[j + 1] * trace.grad_norm[j + 1]) /
        (trace.grad_norm[j] * trace.grad_norm[j]);
    CHECK(std::abs(trace.beta[j] - expect) <= 1e-12 * expect);
  }
}

TEST_CASE("identical inputs produce bit-identical traces") {
  Matrix x = oracle::random_matrix(25, 3, 23);
  auto y = oracle::random_vector(25, 24);
  PolySpec spec = free_spec(3, 2, 2);
  auto maps = random_reductions(3, spec, 80);
  SolverConfig cfg;
  cfg.max_iter = 40;
  auto [m1, t1] = fit_polycg(x, y, spec, maps, cfg);
  auto [m2, t2] = fit_polycg(x, y, spec, maps, cfg);
  CHECK(t1.loss == t2.loss);
  CHECK(t1.alpha == t2.alpha);
  CHECK(t1.grad_norm == t2.grad_norm);
  CHECK(m1.tensors == m2.tensors);
}

TEST_CASE("numerical divergence raises with the trace attached") {
  Matrix x = oracle::random_matrix(5, 2, 25, 1e150, 2e150);
  std::vector<double> y{1e160, -1e160, 1e160, -1e160, 1e160};
  PolySpec spec = free_spec(2, 0, 0);
  SolverConfig cfg;
  CHECK_THROWS_AS(fit_polycg(x, y, spec, {}, cfg), SolverDivergence);
}

TEST_CASE("trace CSV layout") {
  Matrix x = oracle::random_matrix(10, 2, 26);
  auto y = oracle::random_vector(10, 27);
  PolySpec spec = free_spec(2, 2, 0);
  auto maps = random_reductions(2, spec, 85);
  SolverConfig cfg;
  cfg.max_iter = 5;
  cfg.tolerance = 1e-16;
  auto [model, trace] = fit_polycg(x, y, spec, maps, cfg);
  std::ostringstream os;
  trace.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "iteration,loss,alpha,beta,grad_norm");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == trace.iterations());
}

TEST_CASE("config validation") {
  Matrix x = oracle::random_matrix(5, 2, 28);
  auto y = oracle::random_vector(5, 29);
  PolySpec spec = free_spec(2, 0, 0);
  SolverConfig bad;
  bad.max_iter = 0;
  CHECK_THROWS_AS(fit_polycg(x, y, spec, {}, bad), ConfigError);
  bad.max_iter = 10;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(fit_polycg(x, y, spec, {}, bad), ConfigError);
}

}  // TEST_SUITE
