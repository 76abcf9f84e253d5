#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scpg/cubic.hpp"
#include "scpg/experiment.hpp"
#include "scpg/kernels.hpp"
#include "scpg/linalg.hpp"
#include "scpg/rng.hpp"

namespace {

scpg::InstanceSpec small_convex_spec(std::uint64_t seed) {
  scpg::InstanceSpec spec;
  spec.n = 60;
  spec.m = 60;
  spec.cubic_weight = 1.0;
  spec.seed = seed;
  return spec;
}

std::vector<double> start_for(const scpg::CubicQuadraticInstance& inst) {
  const auto x0 = scpg::starting_point(inst);
  return {x0.span().begin(), x0.span().end()};
}

template <typename T>
bool spans_equal(std::span<const T> a, std::span<const T> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

TEST_CASE("instance spec validation and per-row fill") {
  scpg::InstanceSpec spec;
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.nonzeros_per_row() == 10);  // default density 10/n

  spec.n = 10;
  spec.density = 0.5;
  CHECK(spec.nonzeros_per_row() == 5);
  spec.density = 1e-9;
  CHECK(spec.nonzeros_per_row() == 1);
  spec.density = 1.0;
  CHECK(spec.nonzeros_per_row() == 10);

  scpg::InstanceSpec bad = spec;
  bad.n = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.m = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.cubic_weight = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.density = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.ridge = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("generated instances are symmetric, reproducible, and convex when asked") {
  auto spec = small_convex_spec(3);
  spec.n = 80;
  spec.m = 80;
  const auto inst = scpg::generate_instance(spec);
  CHECK(inst.dimension() == 80);
  CHECK(inst.a().is_symmetric());

  // Gram construction keeps the quadratic part positive semidefinite
  scpg::Rng rng(99);
  std::vector<double> x(80), ax(80);
  for (int t = 0; t < 100; ++t) {
    for (double& v : x) v = rng.normal();
    inst.a().multiply(x, ax);
    CHECK(scpg::kernels::dot(x, ax) >= -1e-10);
  }

  const auto again = scpg::generate_instance(spec);
  CHECK(spans_equal(again.a().values(), inst.a().values()));
  CHECK(spans_equal(again.a().col_idx(), inst.a().col_idx()));
  CHECK(spans_equal(again.a().row_ptr(), inst.a().row_ptr()));
  for (int i = 0; i < 80; ++i) CHECK(again.b()[i] == inst.b()[i]);

  scpg::InstanceSpec noncvx = spec;
  noncvx.m.reset();
  const auto wild = scpg::generate_instance(noncvx);
  CHECK(wild.a().is_symmetric());
  bool negative_found = false;
  for (int t = 0; t < 200 && !negative_found; ++t) {
    for (double& v : x) v = rng.normal();
    wild.a().multiply(x, ax);
    negative_found = scpg::kernels::dot(x, ax) < 0.0;
  }
  CHECK(negative_found);

  scpg::InstanceSpec ridged = spec;
  ridged.ridge = 2.0;
  const auto shifted = scpg::generate_instance(ridged);
  std::vector<double> lhs(80), rhs(80);
  for (int t = 0; t < 5; ++t) {
    for (double& v : x) v = rng.normal();
    shifted.a().multiply(x, lhs);
    inst.a().multiply(x, rhs);
    for (int i = 0; i < 80; ++i)
      CHECK(lhs[i] == doctest::Approx(rhs[i] + 2.0 * x[i]).epsilon(1e-12));
  }
}

TEST_CASE("instance JSON round trip is lossless") {
  auto spec = small_convex_spec(12);
  spec.n = 40;
  spec.m = 35;
  spec.cubic_weight = 0.37;
  const auto inst = scpg::generate_instance(spec);
  const auto text = scpg::instance_to_json(inst, spec);
  const auto back = scpg::instance_from_json(text);

  CHECK(back.dimension() == inst.dimension());
  CHECK(back.cubic_weight() == inst.cubic_weight());
  CHECK(spans_equal(back.a().row_ptr(), inst.a().row_ptr()));
  CHECK(spans_equal(back.a().col_idx(), inst.a().col_idx()));
  CHECK(spans_equal(back.a().values(), inst.a().values()));
  for (int i = 0; i < 40; ++i) CHECK(back.b()[i] == inst.b()[i]);

  CHECK_THROWS_AS(scpg::instance_from_json("{\"n\": 3}"), std::exception);
}

TEST_CASE("method names round trip") {
  using scpg::Method;
  CHECK(scpg::parse_method("scpg") == Method::Scpg);
  CHECK(scpg::parse_method("carmon-duchi") == Method::CarmonDuchi);
  CHECK(scpg::parse_method("nesterov") == Method::Nesterov);
  for (const auto m : {Method::Scpg, Method::CarmonDuchi, Method::Nesterov})
    CHECK(scpg::parse_method(scpg::format_method(m)) == m);
  CHECK_THROWS_AS(scpg::parse_method("newton"), std::invalid_argument);
}

TEST_CASE("baseline loops stop on the gradient test or the budget") {
  const auto inst = scpg::generate_instance(small_convex_spec(7));
  const double a_norm = scpg::spectral_norm(inst.a());
  const auto x0 = start_for(inst);

  scpg::BaselineKind cd;
  cd.method = scpg::BaselineKind::Method::CarmonDuchi;
  const auto t1 = scpg::run_baseline(inst, cd, x0, a_norm, 1e-4, 200000);
  CHECK(t1.exit == scpg::ExitStatus::Converged);
  CHECK(t1.final_grad_norm <= 1e-4);
  CHECK(t1.iterations > 0);
  std::vector<double> grad(inst.dimension());
  scpg::eval_gradient(inst, t1.final_point, grad);
  CHECK(scpg::kernels::norm(grad) == doctest::Approx(t1.final_grad_norm).epsilon(1e-12));
  CHECK(t1.final_objective ==
        doctest::Approx(scpg::eval_objective(inst, t1.final_point)).epsilon(1e-12));

  scpg::BaselineKind nest;
  nest.method = scpg::BaselineKind::Method::NesterovProx;
  const auto t2 = scpg::run_baseline(inst, nest, x0, a_norm, 1e-4, 200000);
  CHECK(t2.exit == scpg::ExitStatus::Converged);
  CHECK(t2.iterations < t1.iterations);  // prox step beats plain gradient here

  const auto t3 = scpg::run_baseline(inst, cd, x0, a_norm, 1e-14, 3);
  CHECK(t3.exit == scpg::ExitStatus::MaxIter);
  CHECK(t3.iterations == 3);
}

TEST_CASE("reference optimum drives the gradient to near zero") {
  const auto inst = scpg::generate_instance(small_convex_spec(8));
  const double a_norm = scpg::spectral_norm(inst.a());
  const auto ref = scpg::reference_optimum(inst, a_norm, 500000);
  REQUIRE(ref.converged);
  std::vector<double> grad(inst.dimension());
  scpg::eval_gradient(inst, ref.point, grad);
  CHECK(scpg::kernels::norm(grad) <= 2e-8);
  CHECK(ref.value == doctest::Approx(scpg::eval_objective(inst, ref.point)).epsilon(1e-12));
}

TEST_CASE("comparison rows, CSV schema, and reproducibility") {
  scpg::ExperimentConfig cfg;
  cfg.instance = small_convex_spec(100);
  cfg.subspace_dim = 8;
  cfg.sketch = scpg::SketchKind::RandomOrthonormal;
  cfg.tolerance = 1e-3;
  cfg.max_iterations = 100000;
  cfg.repetitions = 2;

  const auto rows = scpg::run_comparison(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].seed == 100);
  CHECK(rows[1].seed == 101);
  for (const auto& row : rows) {
    CHECK(row.n == 60);
    CHECK(row.p == 8);
    REQUIRE(row.m.has_value());
    CHECK(*row.m == 60);
    CHECK(row.scpg.converged);
    CHECK(row.carmon_duchi.converged);
    CHECK(row.nesterov.converged);
    CHECK(row.scpg.error.empty());
    CHECK(row.scpg.iterations > 0);
    CHECK(row.scpg.epoch_equivalents ==
          doctest::Approx(static_cast<double>(row.scpg.iterations) * 8.0 / 60.0));
    CHECK(row.carmon_duchi.epoch_equivalents ==
          doctest::Approx(static_cast<double>(row.carmon_duchi.iterations)));
  }

  const auto csv = scpg::comparison_csv(rows);
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "n,m,p,M,seed,scpg_iterations,scpg_epoch_equivalents,scpg_converged,"
        "carmon_duchi_iterations,carmon_duchi_converged,nesterov_iterations,"
        "nesterov_converged");

  const auto rows2 = scpg::run_comparison(cfg);
  CHECK(scpg::comparison_csv(rows2) == csv);

  const auto j = nlohmann::json::parse(scpg::comparison_summary_json(cfg, rows));
  CHECK(j.at("n").get<int>() == 60);
  CHECK(j.at("rows").size() == 2);
  CHECK(j.at("medians").contains("scpg_iterations"));
  CHECK(j.at("medians").contains("carmon_duchi_iterations"));
  CHECK(j.at("rows")[0].at("scpg").contains("wall_seconds"));
}

TEST_CASE("theory-mode run satisfies every recorded certificate") {
  auto spec = small_convex_spec(200);
  scpg::TheoryCheckConfig check;
  check.subspace_dim = 8;
  check.tolerance = 1e-3;
  check.max_iterations = 30000;

  const auto rep = scpg::run_theory_check(spec, check);
  CHECK(rep.instance_seed == 200);
  CHECK(rep.converged);
  CHECK(rep.iterations >= 1);
  CHECK(rep.gap0 >= 0.0);
  CHECK(rep.alpha == doctest::Approx(0.5 * 8.0 / 60.0).epsilon(1e-14));
  CHECK(rep.descent_violations == 0);
  CHECK(rep.gradient_bound_violations == 0);
  CHECK(rep.telescoping_ok);
  CHECK(rep.threshold_met);
  CHECK(rep.theorem1_ok);
  CHECK(rep.min_grad_sq <= rep.theorem1_value * (1.0 + 1e-9));
  CHECK(rep.convex_ok);
  CHECK(rep.eta_min > 0.0);
  CHECK(rep.h_f_max > 0.0);
  CHECK(rep.h_psi_max > 0.0);
  CHECK(rep.r_estimate > 0.0);
  CHECK(rep.aligned_count >= static_cast<long>(rep.aligned_threshold));
}

TEST_CASE("linear-rate check needs a ridge and then holds") {
  auto spec = small_convex_spec(300);
  scpg::TheoryCheckConfig check;
  check.subspace_dim = 8;
  check.tolerance = 1e-4;
  check.max_iterations = 30000;

  CHECK_THROWS_AS(scpg::run_kl_check(spec, check), std::invalid_argument);

  spec.ridge = 1.0;
  const auto rep = scpg::run_kl_check(spec, check);
  CHECK(rep.sigma2 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rep.gamma2 > 0.0);
  CHECK(rep.gamma2 < 1.0);
  CHECK(rep.threshold_met);
  CHECK(rep.ok);
  CHECK(rep.final_gap <= rep.bound * (1.0 + 1e-9));
}

TEST_CASE("certificate driver validates the full set on a small instance") {
  scpg::CertifyConfig cfg;
  cfg.instance = small_convex_spec(1);
  cfg.theory.subspace_dim = 8;
  cfg.theory.tolerance = 1e-3;
  cfg.theory.max_iterations = 30000;
  cfg.repetitions = 2;
  cfg.mc_trials = 3000;
  cfg.grid = 200;
  cfg.recurrence_draws = 10;
  cfg.recurrence_k_max = 1000;
  cfg.ridge_for_kl = 1.0;
  cfg.seed = 1;

  const auto outcome = scpg::validate_certificates(cfg);
  const auto j = nlohmann::json::parse(outcome.report_json);
  REQUIRE(j.contains("certificates"));
  CHECK(j.at("certificates").size() == 14);
  for (const auto& cert : j.at("certificates")) {
    CHECK(cert.contains("bound_name"));
    CHECK(cert.contains("params"));
    CHECK(cert.contains("value"));
    CHECK(cert.contains("validated"));
    CHECK(cert.contains("evidence"));
    CHECK(cert.at("validated").get<bool>());
  }
  CHECK(j.at("all_validated").get<bool>());
  CHECK(outcome.all_validated);
}

TEST_CASE("text files are written atomically enough to read back") {
  const std::string path = "write_text_file_test.json";
  scpg::write_text_file(path, "{\"a\": 1}\n");
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  in.close();
  std::remove(path.c_str());
  CHECK(content == "{\"a\": 1}\n");

  CHECK_THROWS_AS(scpg::write_text_file("no_such_dir_xyz/file.txt", "x"),
                  std::runtime_error);
}
