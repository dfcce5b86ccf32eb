#include <doctest.h>

#include "support/property_suite.hpp"

namespace {

void require_clean(const props::SuiteResult& r, int expected_cases) {
    CHECK(r.cases == expected_cases);
    CHECK_MESSAGE(r.failures == 0, r.first_failure, " (worst ", r.worst, ")");
}

}  // namespace

TEST_CASE("yield never increases") { require_clean(props::yield_monotonicity(101, 100), 100); }

TEST_CASE("every trajectory state is a density matrix") { require_clean(props::state_validity(102, 100), 100); }

TEST_CASE("left and right eigenvectors are biorthonormal") {
    require_clean(props::biorthonormality(103, 100), 100);
}

TEST_CASE("projected propagators are contractions") { require_clean(props::contraction(104, 100), 100); }

TEST_CASE("power iteration agrees with characteristic-polynomial roots") {
    require_clean(props::dominant_vs_charpoly(105, 100), 100);
}

TEST_CASE("survival probability equals the product of step probabilities") {
    oracle::Rng rng(106);
    for (int c = 0; c < 50; ++c) {
        const auto m = props::random_model(rng);
        try {
            const auto traj = zenopure::run_purification(m.rho, m.v, 10);
            double product = 1.0;
            for (const auto& s : traj.steps) {
                product *= s.conditional_probability;
                const double direct = zenopure::survival_probability(m.rho, m.v, s.n);
                CHECK(std::abs(product - direct) <= 1e-10 * direct);
            }
        } catch (const zenopure::ExtinctBranch&) {
        }
    }
}
