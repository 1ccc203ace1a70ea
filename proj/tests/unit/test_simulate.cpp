#include <cmath>

#include <gtest/gtest.h>

#include "classo/error.hpp"
#include "classo/linalg.hpp"
#include "classo/simulate.hpp"

using namespace classo;

TEST(MakeSigma, Examples) {
    const Matrix t = make_sigma({DesignKind::toeplitz, 3, 0.9});
    EXPECT_NEAR(t(0, 2), 0.81, 1e-15);
    EXPECT_NEAR(t(2, 1), 0.9, 1e-15);
    EXPECT_EQ(make_sigma({DesignKind::equicorr, 2, 0.8}), Matrix::from_rows({{1, 0.8}, {0.8, 1}}));
    EXPECT_EQ(make_sigma({DesignKind::toeplitz, 4, 0.0}), Matrix::identity(4));
    EXPECT_EQ(make_sigma({DesignKind::identity, 3, 0.5}), Matrix::identity(3));
}

TEST(MakeSigma, RejectsInvalidRho) {
    EXPECT_THROW(make_sigma({DesignKind::toeplitz, 3, 1.0}), ConfigError);
    EXPECT_THROW(make_sigma({DesignKind::toeplitz, 3, -1.2}), ConfigError);
    EXPECT_THROW(make_sigma({DesignKind::equicorr, 3, -0.1}), ConfigError);
    EXPECT_THROW(make_sigma({DesignKind::equicorr, 3, 1.0}), ConfigError);
    EXPECT_NO_THROW(cholesky(make_sigma({DesignKind::toeplitz, 50, -0.95})));
}

TEST(DesignNames, RoundTrip) {
    for (DesignKind k : {DesignKind::toeplitz, DesignKind::equicorr, DesignKind::identity})
        EXPECT_EQ(parse_design(design_name(k)), k);
    for (Method m : {Method::classo, Method::up_lasso, Method::ds_lasso}) EXPECT_EQ(parse_method(method_name(m)), m);
    EXPECT_THROW(parse_design("banded"), ConfigError);
    EXPECT_THROW(parse_method("ridge"), ConfigError);
}

TEST(DefaultBeta, Examples) {
    EXPECT_EQ(default_beta_star(6), (Vector{2, -1, -2, 3, 1, 0}));
    const Vector b = default_beta_star(100);
    EXPECT_EQ(b[2], -2.0);
    EXPECT_EQ(b[6], 0.0);
    std::size_t nz = 0;
    for (double v : b) nz += v != 0.0;
    EXPECT_EQ(nz, 5u);
    EXPECT_THROW(default_beta_star(4), ConfigError);
}

TEST(RandomStream, DeterministicAndKeyed) {
    RandomStream a(1, 2, 3), b(1, 2, 3), c(1, 3, 3), e(1, 2, 4);
    bool differs_rep = false, differs_purpose = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        differs_rep |= x != c.normal();
        differs_purpose |= x != e.normal();
    }
    EXPECT_TRUE(differs_rep);
    EXPECT_TRUE(differs_purpose);
    RandomStream u(9, 9, 9);
    for (int i = 0; i < 10000; ++i) {
        const double v = u.uniform();
        ASSERT_GT(v, 0.0);
        ASSERT_LT(v, 1.0);
    }
}

TEST(RandomStream, NormalMoments) {
    RandomStream r(4, 0, 1);
    double s = 0.0, ss = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = r.normal();
        s += v;
        ss += v * v;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(ss / n, 1.0, 0.01);
}

TEST(SampleInstance, NoiselessResponseIsExact) {
    SimSpec spec;
    spec.n = 50;
    spec.design = {DesignKind::toeplitz, 10, 0.9};
    spec.sigma = 0.0;
    spec.targets = {3};
    const SampledInstance inst = sample_instance(spec, 0);
    const Vector xb = matvec(inst.u, inst.beta_star);
    EXPECT_EQ(inst.y, xb);
}

TEST(SampleInstance, BitwiseReproducible) {
    SimSpec spec;
    spec.n = 40;
    spec.design = {DesignKind::equicorr, 12, 0.8};
    spec.base_seed = 99;
    const SampledInstance a = sample_instance(spec, 5), b = sample_instance(spec, 5);
    EXPECT_EQ(a.u, b.u);
    EXPECT_EQ(a.y, b.y);
    const SampledInstance c = sample_instance(spec, 6);
    EXPECT_NE(a.u, c.u);
}

TEST(SampleInstance, PerTargetReparameterization) {
    SimSpec spec;
    spec.n = 30;
    spec.design = {DesignKind::toeplitz, 8, 0.5};
    spec.targets = {3, 7};
    const SampledInstance inst = sample_instance(spec, 0);
    ASSERT_EQ(inst.per_target.size(), 2u);
    const auto& d = inst.per_target[1];
    EXPECT_EQ(d.x.cols(), 1u);
    EXPECT_EQ(d.z.cols(), 7u);
    for (std::size_t i = 0; i < 30; ++i) {
        EXPECT_EQ(d.x(i, 0), inst.u(i, 6));
        EXPECT_EQ(d.z(i, 6), inst.u(i, 7));
        EXPECT_EQ(d.z(i, 5), inst.u(i, 5));
    }
}

TEST(SampleInstance, SampleCovarianceApproachesSigma) {
    SimSpec spec;
    spec.n = 5000;
    spec.design = {DesignKind::toeplitz, 5, 0.9};
    spec.targets = {1};
    spec.base_seed = 3;
    const SampledInstance inst = sample_instance(spec, 0);
    const Matrix s = scaled_gram(inst.u);
    const Matrix truth = make_sigma(spec.design);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(s(i, j), truth(i, j), 0.05);
}

TEST(SimSpec, Validation) {
    SimSpec spec;
    spec.targets = {0};
    EXPECT_THROW(spec.validate(), ConfigError);
    spec.targets = {101};
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = {};
    spec.reps = 0;
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = {};
    spec.sigma = -1.0;
    EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(RunReplicates, ReproducibleAcrossThreadCounts) {
    SimSpec spec;
    spec.n = 100;
    spec.design = {DesignKind::toeplitz, 20, 0.9};
    spec.reps = 6;
    spec.base_seed = 5;
    spec.threads = 1;
    const SimReport a = run_replicates(spec);
    spec.threads = 4;
    const SimReport b = run_replicates(spec);
    ASSERT_EQ(a.replicates.size(), b.replicates.size());
    for (std::size_t r = 0; r < a.replicates.size(); ++r)
        for (std::size_t m = 0; m < a.replicates[r].methods.size(); ++m) {
            const auto& x = a.replicates[r].methods[m];
            const auto& y = b.replicates[r].methods[m];
            EXPECT_EQ(x.all_p_values, y.all_p_values);
            for (std::size_t t = 0; t < x.targets.size(); ++t) EXPECT_EQ(x.targets[t].estimate, y.targets[t].estimate);
        }
    for (std::size_t m = 0; m < a.methods.size(); ++m)
        for (std::size_t t = 0; t < a.methods[m].targets.size(); ++t) {
            EXPECT_EQ(a.methods[m].targets[t].rmse, b.methods[m].targets[t].rmse);
            EXPECT_EQ(a.methods[m].targets[t].coverage, b.methods[m].targets[t].coverage);
        }
}

TEST(RunReplicates, FrequenciesInRange) {
    SimSpec spec;
    spec.n = 100;
    spec.design = {DesignKind::toeplitz, 20, 0.9};
    spec.reps = 5;
    spec.base_seed = 8;
    const SimReport rep = run_replicates(spec);
    EXPECT_TRUE(rep.valid);
    for (const auto& m : rep.methods) {
        ASSERT_TRUE(m.power && m.fwer);
        EXPECT_GE(*m.power, 0.0);
        EXPECT_LE(*m.power, 1.0);
        for (const auto& t : m.targets) {
            ASSERT_TRUE(t.coverage);
            EXPECT_GE(*t.coverage, 0.0);
            EXPECT_LE(*t.coverage, 1.0);
            EXPECT_GE(t.rmse, 0.0);
        }
    }
}

TEST(RunReplicates, NoiselessStudyIsDegenerate) {
    SimSpec spec;
    spec.n = 60;
    spec.design = {DesignKind::identity, 10, 0.0};
    spec.sigma = 0.0;
    spec.reps = 3;
    spec.methods = {Method::classo};
    spec.multiple_testing = false;
    const SimReport rep = run_replicates(spec);
    EXPECT_TRUE(rep.degenerate);
    for (const auto& t : rep.methods[0].targets) EXPECT_FALSE(t.coverage.has_value());
}

TEST(RunReplicates, IdentityDesignCoverageSanity) {
    SimSpec spec;
    spec.n = 1000;
    spec.design = {DesignKind::identity, 10, 0.0};
    spec.reps = 200;
    spec.base_seed = 21;
    spec.multiple_testing = false;
    const SimReport rep = run_replicates(spec);
    for (const auto& m : rep.methods)
        for (const auto& t : m.targets) {
            ASSERT_TRUE(t.coverage);
            EXPECT_GE(*t.coverage, 0.90) << method_name(m.method) << " target " << t.target;
            EXPECT_LE(*t.coverage, 0.99) << method_name(m.method) << " target " << t.target;
        }
}
