#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "ovi/pricing.hpp"
#include "ovi/signals.hpp"

using namespace ovi;
using ovi::testing::MiniMarket;

namespace {

/// Order-statistic oracle: bucket of x is 1 + number of quartile cut points strictly below x,
/// with cut k the ceil(kn/4)-th smallest value.
std::vector<int> oracle_buckets(std::vector<double> v) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    std::vector<int> out;
    for (double x : v) {
        int b = 1;
        for (std::size_t k = 1; k <= 3; ++k) {
            const std::size_t idx = (k * n + 3) / 4 - 1;
            if (x > s[idx]) ++b;
        }
        out.push_back(b);
    }
    return out;
}

}  // namespace

TEST(Quartiles, EvenSplit) {
    const std::vector<double> v{8, 3, 1, 7, 2, 6, 4, 5};
    const auto b = quartile_buckets(v);
    const std::vector<std::uint8_t> expected{4, 2, 1, 4, 1, 3, 2, 3};
    EXPECT_EQ(b, expected);
}

TEST(Quartiles, TiesFallToLowerBucket) {
    const std::vector<double> same(10, 0.3);
    for (auto b : quartile_buckets(same)) EXPECT_EQ(b, 1);
    bool degenerate = false;
    const std::vector<double> three{1, 2, 3};
    for (auto b : quartile_buckets(three, &degenerate)) EXPECT_EQ(b, 1);
    EXPECT_TRUE(degenerate);
}

TEST(Quartiles, RandomValuesMatchOracle) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    for (std::size_t n : {100u, 37u, 4u, 1001u}) {
        std::vector<double> v(n);
        for (auto& x : v) x = z(rng);
        const auto b = quartile_buckets(v);
        const auto o = oracle_buckets(v);
        std::array<int, 5> count{};
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(b[i], o[i]);
            ++count[b[i]];
        }
        if (n == 100) {
            for (int k = 1; k <= 4; ++k) EXPECT_EQ(count[k], 25);
        }
    }
}

TEST(Quartiles, NanExcluded) {
    const std::vector<double> v{1, kNaN, 2, 3, 4};
    const auto b = quartile_buckets(v);
    EXPECT_EQ(b[1], 0);
    EXPECT_EQ(b[0], 1);
    EXPECT_EQ(b[4], 4);
}

class IvFixture : public ::testing::Test {
protected:
    void SetUp() override {
        MiniMarket m({"AAA"}, 1);
        m.equity("AAA", 0, 99.0, 101.0);
        const double tau = 40.0 / 365.0;
        for (int k = 0; k < 8; ++k) {
            const auto c = m.contract("AAA", k % 2 ? OptionSide::Put : OptionSide::Call, 90.0 + 3.0 * k);
            sigmas.push_back(0.1 + 0.1 * k);
            const double px = bs_price(BsInputs{100.0, c.strike, tau, 0.0, sigmas.back(), c.option_side});
            // Odd contracts trade through the flow report, even ones only by summary volume.
            m.summary(0, c, px, px, 50, k % 2 ? 0 : 5);
            if (k % 2) m.flow(0, c, Mpc::Customer, TradeSide::Buy, 10 + k);
            contracts.push_back(c);
        }
        // A quote below intrinsic cannot be inverted.
        bad = m.contract("AAA", OptionSide::Call, 50.0);
        m.summary(0, bad, 1.0, 1.0, 10, 3);
        // Not traded at all: excluded from the quantiles.
        m.summary(0, m.contract("AAA", OptionSide::Call, 200.0), 0.01, 0.01, 10, 0);
        data = std::move(m).build();
    }

    ContractId id(const ContractKey& key) const {
        for (ContractId c = 0; c < data.contract_count(); ++c) {
            if (data.contract(c) == key) return c;
        }
        throw std::runtime_error("unknown contract");
    }

    std::vector<double> sigmas;
    std::vector<ContractKey> contracts;
    ContractKey bad;
    MarketDataset data;
};

TEST_F(IvFixture, ImpliedVolFeatureRecoversSigma) {
    const auto values = contract_features(data, 0, Feature::ImpliedVol);
    ASSERT_EQ(values.size(), 9u);
    for (std::size_t k = 0; k < contracts.size(); ++k) {
        const auto it = std::find_if(values.begin(), values.end(),
                                     [&](const ContractFeature& f) { return f.contract == id(contracts[k]); });
        ASSERT_NE(it, values.end());
        EXPECT_NEAR(it->value, sigmas[k], 1e-6);
    }
    const auto it = std::find_if(values.begin(), values.end(),
                                 [&](const ContractFeature& f) { return f.contract == id(bad); });
    ASSERT_NE(it, values.end());
    EXPECT_TRUE(std::isnan(it->value));
    EXPECT_TRUE(it->iv_failed);
}

TEST_F(IvFixture, ImpliedVolBucketsFollowSigma) {
    const auto b = feature_buckets(data, 0, Feature::ImpliedVol);
    EXPECT_EQ(b.iv_failures, 1u);
    EXPECT_EQ(b.excluded, 1u);
    EXPECT_FALSE(b.degenerate);
    for (std::size_t k = 0; k < contracts.size(); ++k) {
        EXPECT_EQ(b.bucket_of(id(contracts[k])), static_cast<int>(k / 2 + 1)) << k;
    }
    EXPECT_EQ(b.bucket_of(id(bad)), 0);
}

TEST_F(IvFixture, MaturityNeedsNoImpliedVol) {
    const auto b = feature_buckets(data, 0, Feature::Maturity);
    EXPECT_EQ(b.iv_failures, 0u);
    // All nine traded contracts share one expiry, so every one lands in bucket 1.
    EXPECT_EQ(b.bucket_of(id(bad)), 1);
}

TEST_F(IvFixture, BucketFilterRestrictsFlow) {
    // Customer buys on contracts 1, 3, 5, 7 (volumes 11, 13, 15, 17), IV buckets 1, 2, 3, 4;
    // all are puts, so each is Down flow.
    for (int q = 1; q <= 4; ++q) {
        FilterSpec f;
        f.feature_bucket = FeatureBucket{Feature::ImpliedVol, q};
        const auto flows = directional_flows(data, 0, 0, Mpc::Customer, f, FeatureOptions{});
        EXPECT_DOUBLE_EQ(flows.up, 0.0);
        EXPECT_DOUBLE_EQ(flows.down, 10.0 + 2 * q - 1) << q;
    }
}

TEST_F(IvFixture, MoneynessUsesOwnImpliedVol) {
    const auto values = contract_features(data, 0, Feature::Moneyness);
    const auto& c = contracts[2];
    const auto it = std::find_if(values.begin(), values.end(),
                                 [&](const ContractFeature& f) { return f.contract == id(c); });
    ASSERT_NE(it, values.end());
    EXPECT_NEAR(it->value, std::log(100.0 / c.strike) / (sigmas[2] * std::sqrt(40.0 / 365.0)), 1e-5);
}
