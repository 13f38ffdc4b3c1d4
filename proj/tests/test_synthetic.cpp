#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "dts/metrics.hpp"
#include "dts/synthetic.hpp"

using namespace dts;

TEST_CASE("endmembers are deterministic, bounded and smooth") {
  CHECK(generate_endmembers(31, 6, 9) == generate_endmembers(31, 6, 9));
  CHECK(generate_endmembers(31, 6, 9) != generate_endmembers(31, 6, 10));
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Matrix e = generate_endmembers(31, 8, seed);
    CHECK(e.minCoeff() >= 0.0);
    CHECK(e.maxCoeff() <= 1.0);
    for (Index j = 0; j < e.cols(); ++j) CHECK(e.col(j).maxCoeff() == doctest::Approx(1.0));
    for (Index j = 0; j < e.cols(); ++j) {
      for (Index b = 1; b + 1 < e.rows(); ++b) {
        worst = std::max(worst, std::abs(e(b + 1, j) - 2.0 * e(b, j) + e(b - 1, j)));
      }
    }
  }
  CHECK(worst < 0.5);
}

TEST_CASE("pure pixels equal endmembers") {
  const Matrix e = generate_endmembers(12, 4, 3);
  SceneSpec spec;
  spec.bands = 12;
  spec.rows = 5;
  spec.cols = 5;
  spec.endmember_count = 4;
  spec.abundance_sparsity = 1;
  const Matrix z = as_matrix(generate_scene(e, spec));
  for (Index p = 0; p < z.cols(); ++p) {
    bool found = false;
    for (Index k = 0; k < e.cols(); ++k) found = found || (z.col(p) - e.col(k)).cwiseAbs().maxCoeff() == 0.0;
    CHECK(found);
  }
}

TEST_CASE("mixed pixels lie in the hull of their endmembers") {
  const Matrix e = generate_endmembers(20, 6, 4);
  SceneSpec spec;
  spec.bands = 20;
  spec.rows = 8;
  spec.cols = 8;
  spec.endmember_count = 6;
  spec.abundance_sparsity = 3;
  spec.seed = 17;
  const Matrix z = as_matrix(generate_scene(e, spec));
  for (Index p = 0; p < z.cols(); ++p) {
    for (Index b = 0; b < z.rows(); ++b) {
      CHECK(z(b, p) >= e.row(b).minCoeff() - 1e-12);
      CHECK(z(b, p) <= e.row(b).maxCoeff() + 1e-12);
    }
    // recover the abundances with a nonnegative 3-support search
    const auto best = oracle::exhaustive_sparse_fit(e, z.col(p), 3);
    CHECK(best.residual < 1e-10);
    CHECK(best.coefficients.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(best.coefficients.minCoeff() >= -1e-12);
  }
}

TEST_CASE("domain shift") {
  const Matrix e = generate_endmembers(10, 3, 2);
  SceneSpec spec;
  spec.bands = 10;
  spec.rows = 4;
  spec.cols = 4;
  spec.endmember_count = 3;
  spec.abundance_sparsity = 2;
  const SpectralCube z = generate_scene(e, spec);

  CHECK(apply_domain_shift(z, DomainShift::none(10)).data == z.data);

  const Matrix zm = as_matrix(z);
  const Matrix shifted = as_matrix(apply_domain_shift(z, DomainShift::uniform(10, 0.1, 1.0, 0.0)));
  const Vector gain = shifted.rowwise().mean() - zm.rowwise().mean();
  CHECK((gain.array() - 0.1).abs().maxCoeff() < 1e-12);

  const SpectralCube doubled = apply_domain_shift(z, DomainShift::uniform(10, 0.0, 2.0, 0.0));
  CHECK(*evaluate_quality(z, doubled).sam < 1e-6);
}

TEST_CASE("scene pairs") {
  SceneSpec spec;
  spec.rows = 8;
  spec.cols = 8;
  spec.shift = DomainShift::uniform(31, 0.1, 1.1, 0.02);
  const auto a = make_scene_pair(spec);
  const auto b = make_scene_pair(spec);
  CHECK(a.source.data == b.source.data);
  CHECK(a.target.data == b.target.data);
  CHECK((a.target_endmembers - a.endmembers).norm() > 0.0);
  CHECK(a.target_endmembers.minCoeff() >= 0.0);

  spec.seed = 2;
  const auto c = make_scene_pair(spec);
  CHECK(*evaluate_quality(a.source, c.source).sam > 0.0);

  spec.shift = DomainShift::none(31);
  const auto same = make_scene_pair(spec);
  CHECK(same.target_endmembers == same.endmembers);
}

TEST_CASE("perturbation is seeded") {
  const Matrix e = generate_endmembers(15, 4, 1);
  CHECK(perturb_endmembers(e, 0.0, 3) == e);
  CHECK(perturb_endmembers(e, 0.05, 3) == perturb_endmembers(e, 0.05, 3));
  CHECK(perturb_endmembers(e, 0.05, 3) != perturb_endmembers(e, 0.05, 4));
}
