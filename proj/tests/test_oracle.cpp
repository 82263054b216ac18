#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/oracle.hpp"
#include "core/synthetic.hpp"
#include "helpers.hpp"

using namespace fanova;

TEST_CASE("to_factorial densifies full coverage and reports gaps") {
    SUBCASE("modcma-sized dataset densifies") {
        const auto space = test::load_fixture("modcma.json");
        const Dataset data = test::random_dataset(space, 2);
        const FactorialTable table = to_factorial(data);
        CHECK(table.response.size() == 324);
        for (std::size_t i = 0; i < data.row_count(); ++i)
            CHECK(table.response[static_cast<std::size_t>(space->rank(data.variant(i)))] ==
                  data.response(i));
    }
    SUBCASE("one missing variant is listed") {
        const auto space = test::make_space({2, 2});
        std::vector<Variant> variants = space->enumerate();
        variants.pop_back();
        std::vector<double> responses(variants.size(), 1.0);
        const Dataset data(space, std::move(variants), std::move(responses), Scenario::synthetic);
        CHECK_THROWS_WITH_AS(to_factorial(data), doctest::Contains("missing"), data_error);
    }
    SUBCASE("single-module space works") {
        const auto space = test::make_space({2});
        const Dataset data = test::factorial_dataset(space, [](const Variant& v) {
            return static_cast<double>(v[0]);
        });
        CHECK(to_factorial(data).response == std::vector<double>{0.0, 1.0});
    }
}

TEST_CASE("exact decomposition of additive tables has zero interactions") {
    const auto space = test::make_space({3, 2, 2});
    const Dataset data = test::factorial_dataset(space, [](const Variant& v) {
        return 2.0 * v[0] - 3.0 * v[1] + 0.25 * v[2];
    });
    const EffectDecomposition d = exact_decompose(to_factorial(data), 3);
    for (std::size_t i = 0; i < d.keys.size(); ++i)
        if (d.keys[i].order() >= 2) CHECK(std::abs(d.fractions[i]) <= 1e-12);
}

TEST_CASE("exact decomposition recovers the generator's analytic fractions") {
    const auto space = test::make_space({3, 2, 4});
    std::vector<TruthComponent> truth;
    truth.push_back(TruthComponent{SubsetKey{{0}}, {2.0, -1.0, 0.5}});
    truth.push_back(TruthComponent{SubsetKey{{1}}, {1.0, 0.0}});
    truth.push_back(TruthComponent{SubsetKey{{0, 2}},
                                   {1.0, -1.0, 0.5, -0.5, 2.0, 0.0, -1.0, -1.0, 0.25, 0.5, -0.5, -0.25}});
    const SyntheticResult synth = generate_synthetic(space, std::move(truth), 0.0, 0);
    const EffectDecomposition d = exact_decompose(to_factorial(synth.dataset), 3);

    double matched = 0.0;
    for (std::size_t t = 0; t < synth.truth.keys.size(); ++t) {
        const double fraction = d.fraction(synth.truth.keys[t]);
        CHECK(fraction == doctest::Approx(synth.truth.fraction(t)).epsilon(1e-9));
        matched += fraction;
    }
    CHECK(matched == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.per_tree[0].total_variance ==
          doctest::Approx(synth.truth.total_variance).epsilon(1e-9));
}

TEST_CASE("full-order exact fractions sum to one on random tables") {
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto space = test::make_space({2, 3, 2});
        const Dataset data = test::random_dataset(space, seed);
        const EffectDecomposition d = exact_decompose(to_factorial(data), 3);
        double sum = 0.0;
        for (const double f : d.fractions) sum += f;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("zero-variance tables flag and zero the fractions") {
    const auto space = test::make_space({2, 2});
    const Dataset data = test::factorial_dataset(space, [](const Variant&) { return 3.0; });
    const EffectDecomposition d = exact_decompose(to_factorial(data), 2);
    CHECK(d.zero_variance_trees == 1);
    for (const double f : d.fractions) CHECK(f == 0.0);
}

TEST_CASE("exact-preset forest agrees with the oracle per subset") {
    const auto space = test::make_space({3, 2, 3, 2});  // 36 variants
    const Dataset data = test::random_dataset(space, 44);
    const EffectDecomposition forest_path =
        decompose(fit_forest(data, FitParams::exact_preset()), space->module_count());
    const EffectDecomposition oracle_path = exact_decompose(to_factorial(data), space->module_count());
    REQUIRE(forest_path.keys.size() == oracle_path.keys.size());
    for (std::size_t i = 0; i < forest_path.keys.size(); ++i)
        CHECK(forest_path.fractions[i] == doctest::Approx(oracle_path.fractions[i]).epsilon(1e-9));
}

TEST_CASE("module and option relabeling permutes keys but not values") {
    const auto space = test::make_space({3, 2, 2});
    const Dataset data = test::random_dataset(space, 27);
    const EffectDecomposition base = exact_decompose(to_factorial(data), 3);

    // permuted space: swap modules 0 and 2, and reverse module 0's options
    std::vector<ModuleSpec> modules;
    modules.push_back(ModuleSpec{"m2", {"o0", "o1"}});
    modules.push_back(ModuleSpec{"m1", {"o0", "o1"}});
    modules.push_back(ModuleSpec{"m0", {"o2", "o1", "o0"}});
    const auto permuted = std::make_shared<const ConfigSpace>("permuted", std::move(modules));

    std::vector<Variant> variants;
    std::vector<double> responses;
    for (std::size_t i = 0; i < data.row_count(); ++i) {
        const Variant& v = data.variant(i);
        variants.push_back(Variant{v[2], v[1], static_cast<std::uint8_t>(2 - v[0])});
        responses.push_back(data.response(i));
    }
    const Dataset permuted_data(permuted, std::move(variants), std::move(responses), Scenario::synthetic);
    const EffectDecomposition other = exact_decompose(to_factorial(permuted_data), 3);

    const auto remap = [](const SubsetKey& key) {
        SubsetKey mapped;
        for (const int m : key.modules) mapped.modules.push_back(m == 0 ? 2 : m == 2 ? 0 : 1);
        std::sort(mapped.modules.begin(), mapped.modules.end());
        return mapped;
    };
    for (std::size_t i = 0; i < base.keys.size(); ++i)
        CHECK(other.fraction(remap(base.keys[i])) ==
              doctest::Approx(base.fractions[i]).epsilon(1e-12));
}

TEST_CASE("the exhaustive guard rejects oversized spaces") {
    // 2^21 variants > 10^6
    const auto space = test::make_space(std::vector<int>(21, 2));
    std::vector<Variant> variants{Variant(21, 0)};
    std::vector<double> responses{1.0};
    const Dataset data(space, std::move(variants), std::move(responses), Scenario::synthetic);
    CHECK_THROWS_AS(to_factorial(data), usage_error);
}
