/*
 * Copyright 2026 The MMF Library Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include "mmf/evaluation.hpp"
#include "mmf/mf.hpp"
#include "mmf/mmf.hpp"
#include "support.hpp"

using namespace mmf;

namespace {

// One user, one item with two attributes whose attribute ratings are 3 and
// 4 under dim-1 factors.
struct TwoAttrFixture {
  RatingDataset ds = test::dataset({{"u0", "i0", 4}});
  AttributeCatalog cat =
      test::catalog({{"i0", "g", "a"}, {"i0", "g", "b"}});
  MmfModel<double> model;

  TwoAttrFixture() {
    TrainConfig cfg;
    cfg.dim = 1;
    cfg.seed = 1;
    model = init_mmf(ds, cat, cfg, Variant::full);
    model.user_factors << 1;
    model.attr_factors << 3, 4;
  }
};

}  // namespace

TEST_CASE("mmf predict averages weighted attribute ratings") {
  SUBCASE("single attribute with neutral weights") {
    auto ds = test::dataset({{"u0", "i0", 2}});
    auto cat = test::catalog({{"i0", "g", "a"}});
    TrainConfig cfg;
    cfg.dim = 2;
    auto m = init_mmf(ds, cat, cfg, Variant::base);
    m.user_factors << 1, 0;
    m.attr_factors << 2, 0;
    CHECK(predict(m, cat, 0, 0) == doctest::Approx(2));
  }
  SUBCASE("two attributes with weights") {
    TwoAttrFixture fx;
    fx.model.preference(0, 0) = 2;
    fx.model.preference(0, 1) = 1;
    fx.model.performance(0, 0) = 1;
    fx.model.performance(0, 1) = 0.5;
    // (2*1*3 + 1*0.5*4) / 2
    CHECK(predict(fx.model, fx.cat, 0, 0) == doctest::Approx(4));
  }
  SUBCASE("zero user factors predict zero") {
    TwoAttrFixture fx;
    fx.model.user_factors.setZero();
    CHECK(predict(fx.model, fx.cat, 0, 0) == 0.0);
  }
  SUBCASE("item without attributes falls back to the stored mean") {
    auto ds = test::dataset({{"u0", "i0", 2}, {"u0", "bare", 4}});
    auto cat = test::catalog({{"i0", "g", "a"}});
    TrainConfig cfg;
    cfg.dim = 2;
    auto m = init_mmf(ds, cat, cfg);
    CHECK(predict(m, cat, 0, *ds.item_index("bare")) ==
          doctest::Approx(3.0));  // mean of 2 and 4
  }
  SUBCASE("out-of-range indices") {
    TwoAttrFixture fx;
    CHECK_THROWS_AS(predict(fx.model, fx.cat, 5, 0), IndexError);
    CHECK_THROWS_AS(predict(fx.model, fx.cat, 0, 9), IndexError);
  }
}

TEST_CASE("mmf loss matches the squared-error-plus-regularization form") {
  TwoAttrFixture fx;
  SUBCASE("zero residual, lambda 0") {
    fx.model.lambda = 0;
    // prediction is (3+4)/2 = 3.5; make the rating agree
    auto ds = test::dataset({{"u0", "i0", 3.5}});
    CHECK(loss(fx.model, ds, fx.cat) == doctest::Approx(0));
  }
  SUBCASE("single residual of 2") {
    fx.model.lambda = 0;
    auto ds = test::dataset({{"u0", "i0", 5.5}});  // prediction 3.5
    CHECK(loss(fx.model, ds, fx.cat) == doctest::Approx(4));
  }
  SUBCASE("lambda adds the squared Frobenius norms") {
    auto ds = test::dataset({{"u0", "i0", 3.5}});
    fx.model.lambda = 0.5;
    // |U|^2 = 1, |F|^2 = 9 + 16
    CHECK(loss(fx.model, ds, fx.cat) == doctest::Approx(0.5 * 26.0));
    fx.model.lambda = 1.0;
    CHECK(loss(fx.model, ds, fx.cat) > 0.5 * 26.0);
  }
}

TEST_CASE("mmf gradients: zero-residual batch with lambda 0 is all zeros") {
  TwoAttrFixture fx;
  fx.model.lambda = 0;
  auto ds = test::dataset({{"u0", "i0", 3.5}});
  auto g = gradients(fx.model, std::span(ds.records()), fx.cat);
  CHECK(g.user_factors.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.attr_factors.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.preference.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.performance.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mmf gradients: frozen families stay zero in every variant") {
  Rng rng(31);
  for (Variant v : {Variant::base, Variant::base_preference,
                    Variant::base_performance}) {
    auto inst = test::small_instance(rng, v);
    auto g = gradients(inst.model, std::span(inst.ds.records()), inst.cat);
    if (!preference_trainable(v))
      CHECK(g.preference.cwiseAbs().maxCoeff() == 0.0);
    if (!performance_trainable(v))
      CHECK(g.performance.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("mmf analytic gradients match the finite-difference oracle") {
  Rng rng(501);
  for (Variant v : {Variant::base, Variant::base_preference,
                    Variant::base_performance, Variant::full}) {
    for (int trial = 0; trial < 5; ++trial) {
      auto inst = test::small_instance(rng, v);
      auto& m = inst.model;
      auto bundle = gradients(m, std::span(inst.ds.records()), inst.cat);
      auto loss_fn = [&] { return loss(m, inst.ds, inst.cat); };

      for (int r = 0; r < m.num_users(); ++r)
        for (int c = 0; c < m.dim(); ++c)
          CHECK(test::close_rel(
              bundle.user_factors(r, c),
              test::central_difference(loss_fn, m.user_factors(r, c)), 1e-4));
      for (int r = 0; r < m.num_attributes(); ++r)
        for (int c = 0; c < m.dim(); ++c)
          CHECK(test::close_rel(
              bundle.attr_factors(r, c),
              test::central_difference(loss_fn, m.attr_factors(r, c)), 1e-4));
      if (preference_trainable(v))
        for (int r = 0; r < m.num_users(); ++r)
          for (int k = 0; k < m.num_attributes(); ++k)
            CHECK(test::close_rel(
                bundle.preference(r, k),
                test::central_difference(loss_fn, m.preference(r, k)), 1e-4));
      if (performance_trainable(v))
        for (int r = 0; r < m.num_items(); ++r)
          for (int k = 0; k < m.num_attributes(); ++k)
            CHECK(test::close_rel(
                bundle.performance(r, k),
                test::central_difference(loss_fn, m.performance(r, k)),
                1e-4));
    }
  }
}

TEST_CASE("mmf fit recovers a small planted model") {
  auto p = test::planted_problem(/*seed=*/91, /*users=*/12, /*items=*/8,
                                 /*attrs=*/6, /*dim=*/3, /*attrs_per_item=*/3,
                                 /*heterogeneous=*/true);
  TrainConfig cfg;
  cfg.dim = 3;
  cfg.lambda = 0;
  cfg.learning_rate = 0.02;
  cfg.epochs = 300;
  cfg.seed = 4;
  auto m = fit(p.ds, p.cat, cfg, Variant::full);
  CHECK(evaluate(m, p.cat, p.ds).rmse < 0.1);
}

TEST_CASE("mmf fit honors epochs=0 and is deterministic") {
  auto p = test::planted_problem(5, 6, 5, 4, 2, 2, false);
  TrainConfig cfg;
  cfg.dim = 2;
  cfg.seed = 9;
  SUBCASE("epochs = 0 returns the initialization") {
    cfg.epochs = 0;
    auto trained = fit(p.ds, p.cat, cfg);
    auto raw = init_mmf(p.ds, p.cat, cfg);
    CHECK(test::exactly_equal(trained.user_factors, raw.user_factors));
    CHECK(test::exactly_equal(trained.attr_factors, raw.attr_factors));
    CHECK(trained.loss_trace.empty());
  }
  SUBCASE("same seed gives bitwise-identical models") {
    cfg.epochs = 6;
    auto m1 = fit(p.ds, p.cat, cfg);
    auto m2 = fit(p.ds, p.cat, cfg);
    CHECK(test::exactly_equal(m1.user_factors, m2.user_factors));
    CHECK(test::exactly_equal(m1.attr_factors, m2.attr_factors));
    CHECK(test::exactly_equal(m1.preference, m2.preference));
    CHECK(test::exactly_equal(m1.performance, m2.performance));
    CHECK(m1.loss_trace == m2.loss_trace);
  }
  SUBCASE("mini-batch updates are deterministic too") {
    cfg.epochs = 6;
    cfg.batch = 4;
    auto m1 = fit(p.ds, p.cat, cfg);
    auto m2 = fit(p.ds, p.cat, cfg);
    CHECK(test::exactly_equal(m1.user_factors, m2.user_factors));
    CHECK(test::exactly_equal(m1.preference, m2.preference));
  }
}

TEST_CASE("frozen weight families stay exactly one through training") {
  auto p = test::planted_problem(17, 8, 6, 5, 2, 2, true);
  TrainConfig cfg;
  cfg.dim = 2;
  cfg.epochs = 10;
  cfg.seed = 2;
  for (Variant v : {Variant::base, Variant::base_preference,
                    Variant::base_performance}) {
    auto m = fit(p.ds, p.cat, cfg, v);
    if (!preference_trainable(v))
      CHECK((m.preference.array() == 1.0).all());
    else
      CHECK(!(m.preference.array() == 1.0).all());
    if (!performance_trainable(v))
      CHECK((m.performance.array() == 1.0).all());
    else
      CHECK(!(m.performance.array() == 1.0).all());
  }
}

TEST_CASE("item_embedding reproduces predictions and edge cases") {
  SUBCASE("single attribute with neutral weights equals the factor row") {
    auto ds = test::dataset({{"u0", "i0", 2}});
    auto cat = test::catalog({{"i0", "g", "a"}});
    TrainConfig cfg;
    cfg.dim = 3;
    cfg.seed = 21;
    auto m = init_mmf(ds, cat, cfg, Variant::base);
    auto e = item_embedding(m, cat, 0, 0);
    CHECK((e.transpose() - m.attr_factors.row(0)).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SUBCASE("inner product with the user vector equals predict") {
    Rng rng(77);
    auto inst = test::small_instance(rng, Variant::full);
    for (int j = 0; j < inst.model.num_items(); ++j) {
      if (inst.cat.attributes_of(inst.model.item_ids[j]).empty()) continue;
      auto e = item_embedding(inst.model, inst.cat, 1, j);
      CHECK(inst.model.user_factors.row(1).dot(e.transpose()) ==
            doctest::Approx(predict(inst.model, inst.cat, 1, j))
                .epsilon(1e-12));
    }
  }
  SUBCASE("all-zero performance weights zero the embedding") {
    auto ds = test::dataset({{"u0", "i0", 2}});
    auto cat = test::catalog({{"i0", "g", "a"}, {"i0", "g", "b"}});
    TrainConfig cfg;
    cfg.dim = 2;
    auto m = init_mmf(ds, cat, cfg);
    m.performance.setZero();
    CHECK(item_embedding(m, cat, 0, 0).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("no attributes raises") {
    auto ds = test::dataset({{"u0", "bare", 2}});
    auto cat = test::catalog({{"other", "g", "a"}});
    TrainConfig cfg;
    cfg.dim = 2;
    auto m = init_mmf(ds, cat, cfg);
    CHECK_THROWS_AS(item_embedding(m, cat, 0, 0), NoAttributesError);
  }
}

TEST_CASE("with item-unique attributes and base variant, the model is mf") {
  // Each item carries exactly one attribute of its own; the attribute
  // factors then play the item-factor role.
  const int n_users = 20, n_items = 10;
  std::vector<RatingTriple> triples;
  std::vector<AttributeRow> rows;
  Rng rng(1234);
  for (int j = 0; j < n_items; ++j)
    rows.push_back({"i" + std::to_string(j), "tag", "only" + std::to_string(j)});
  for (int u = 0; u < n_users; ++u)
    for (int j = 0; j < n_items; ++j)
      if (rng.uniform() < 0.7)
        triples.push_back({"u" + std::to_string(u), "i" + std::to_string(j),
                           rng.uniform(1.0, 5.0)});
  auto ds = test::dataset(triples);
  auto cat = test::catalog(rows);

  TrainConfig cfg;
  cfg.dim = 4;
  cfg.lambda = 0;
  cfg.learning_rate = 0.01;
  cfg.epochs = 20;
  cfg.seed = 55;

  auto mf_model = init_mf(ds, cfg);
  auto mmf_model = init_mmf(ds, cat, cfg, Variant::base);
  // Identical starting point: copy the user factors and map item j's factor
  // row onto its unique attribute's row.
  mmf_model.user_factors = mf_model.user_factors;
  for (int j = 0; j < ds.num_items(); ++j) {
    const auto& attrs = cat.attributes_of(ds.item_ids()[j]);
    REQUIRE(attrs.size() == 1);
    mmf_model.attr_factors.row(attrs[0]) = mf_model.item_factors.row(j);
  }

  SUBCASE("static predictions coincide") {
    for (int u = 0; u < ds.num_users(); ++u)
      for (int j = 0; j < ds.num_items(); ++j)
        CHECK(predict(mmf_model, cat, u, j) ==
              doctest::Approx(predict(mf_model, u, j)).epsilon(1e-15));
  }

  SUBCASE("per-epoch prediction traces coincide within 1e-9") {
    TrainConfig step = cfg;
    step.epochs = 1;
    for (int epoch = 0; epoch < 20; ++epoch) {
      step.seed = cfg.seed + epoch;  // same shuffle stream on both sides
      train(mf_model, ds, step);
      train(mmf_model, ds, cat, step);
      for (int u = 0; u < ds.num_users(); ++u)
        for (int j = 0; j < ds.num_items(); ++j) {
          const double a = predict(mf_model, u, j);
          const double b = predict(mmf_model, cat, u, j);
          REQUIRE(std::abs(a - b) < 1e-9);
        }
    }
  }
}

TEST_CASE("mmf predict responds linearly to each parameter block") {
  Rng rng(909);
  auto inst = test::small_instance(rng, Variant::full);
  auto& m = inst.model;
  // Pick an item that has attributes.
  int item = -1;
  for (int j = 0; j < m.num_items(); ++j)
    if (!inst.cat.attributes_of(m.item_ids[j]).empty()) {
      item = j;
      break;
    }
  REQUIRE(item >= 0);
  const int user = 0;
  const int attr = inst.cat.attributes_of(m.item_ids[item])[0];
  const double alpha = 1.7, beta = -0.6;

  auto superposition_residual = [&](auto&& set_block) {
    // r(a*x + b*y) - r(0) vs a*(r(x) - r(0)) + b*(r(y) - r(0))
    auto with = [&](double sx, double sy) {
      MmfModel<double> probe = m;
      set_block(probe, sx, sy);
      return predict(probe, inst.cat, user, item);
    };
    MmfModel<double> zeroed = m;
    set_block(zeroed, 0.0, 0.0);
    const double r0 = predict(zeroed, inst.cat, user, item);
    const double lhs = with(alpha, beta) - r0;
    const double rhs = alpha * (with(1.0, 0.0) - r0) +
                       beta * (with(0.0, 1.0) - r0);
    return std::abs(lhs - rhs);
  };

  DenseRow<double> x = DenseRow<double>::Random(m.dim());
  DenseRow<double> y = DenseRow<double>::Random(m.dim());
  CHECK(superposition_residual([&](MmfModel<double>& p, double sx, double sy) {
          p.user_factors.row(user) = sx * x + sy * y;
        }) < 1e-10);
  CHECK(superposition_residual([&](MmfModel<double>& p, double sx, double sy) {
          p.attr_factors.row(attr) = sx * x + sy * y;
        }) < 1e-10);

  DenseRow<double> wx = DenseRow<double>::Random(m.num_attributes());
  DenseRow<double> wy = DenseRow<double>::Random(m.num_attributes());
  CHECK(superposition_residual([&](MmfModel<double>& p, double sx, double sy) {
          p.preference.row(user) = sx * wx + sy * wy;
        }) < 1e-10);
  CHECK(superposition_residual([&](MmfModel<double>& p, double sx, double sy) {
          p.performance.row(item) = sx * wx + sy * wy;
        }) < 1e-10);
}

TEST_CASE("duplicating an item's attributes leaves predictions unchanged") {
  Rng rng(313);
  auto inst = test::small_instance(rng, Variant::full);
  // Canonical numbering so extending the row list keeps existing indices.
  auto cat = AttributeCatalog::from_rows(inst.cat.rows());
  TrainConfig cfg;
  cfg.dim = inst.model.dim();
  cfg.seed = 8;
  auto m = init_mmf(inst.ds, cat, cfg, Variant::full);
  for (int u = 0; u < m.num_users(); ++u)
    for (int k = 0; k < m.num_attributes(); ++k)
      m.preference(u, k) = rng.uniform(0.5, 1.5);
  for (int j = 0; j < m.num_items(); ++j)
    for (int k = 0; k < m.num_attributes(); ++k)
      m.performance(j, k) = rng.uniform(0.5, 1.5);

  const int item = 0;
  const std::string item_id = m.item_ids[item];
  const std::vector<int> attrs = cat.attributes_of(item_id);
  REQUIRE(!attrs.empty());
  const double before = predict(m, cat, 1, item);

  // Duplicate every attribute of the item under fresh ids with identical
  // vectors and weights.
  auto rows = cat.rows();
  for (int k : attrs)
    rows.push_back({item_id, cat.type_of(k), cat.value_of(k) + "__dup"});
  auto wide = AttributeCatalog::from_rows(rows);
  REQUIRE(wide.num_attributes() ==
          cat.num_attributes() + static_cast<int>(attrs.size()));

  MmfModel<double> grown = m;
  const int old_n = m.num_attributes();
  const int new_n = wide.num_attributes();
  grown.attr_factors.conservativeResize(new_n, Eigen::NoChange);
  grown.preference.conservativeResize(Eigen::NoChange, new_n);
  grown.performance.conservativeResize(Eigen::NoChange, new_n);
  for (std::size_t p = 0; p < attrs.size(); ++p) {
    const int fresh = old_n + static_cast<int>(p);
    grown.attr_factors.row(fresh) = m.attr_factors.row(attrs[p]);
    grown.preference.col(fresh) = m.preference.col(attrs[p]);
    grown.performance.col(fresh) = m.performance.col(attrs[p]);
    grown.attr_types.push_back(wide.type_of(fresh));
    grown.attr_values.push_back(wide.value_of(fresh));
  }
  CHECK(predict(grown, wide, 1, item) ==
        doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("mmf works with float scalars too") {
  auto p = test::planted_problem(4, 5, 4, 3, 2, 2, false);
  TrainConfig cfg;
  cfg.dim = 2;
  cfg.epochs = 3;
  auto m = fit<float>(p.ds, p.cat, cfg);
  CHECK(std::isfinite(predict(m, p.cat, 0, 0)));
}

TEST_CASE("mmf divergence raises naming the epoch") {
  auto p = test::planted_problem(3, 6, 5, 4, 2, 2, false);
  TrainConfig cfg;
  cfg.dim = 2;
  cfg.learning_rate = 60;
  cfg.epochs = 80;
  cfg.seed = 1;
  CHECK_THROWS_WITH_AS(fit(p.ds, p.cat, cfg), doctest::Contains("epoch"),
                       DivergenceError);
}
