#include <gtest/gtest.h>

#include <cmath>

#include "esgbench/baseline_stats.hpp"
#include "esgbench/normality.hpp"
#include "support.hpp"

using namespace esgbench;

namespace {

struct Reference {
    const char* name;
    double sw_w, sw_p, k2, dp_p;
};

// scipy.stats.shapiro / normaltest on the shipped fixtures (tests/oracle/make_fixtures.py)
constexpr Reference kReference[] = {
    {"N01", 0.9857181472580875, 0.9487685226053651, 0.219294583881307, 0.8961501589446527},
    {"U01", 0.9547247449577694, 0.0017217221937625888, 34.673555743797884, 2.9561947150806057e-08},
    {"E01", 0.8013854517042476, 2.7313964372691085e-10, 54.953354536670375, 1.166892050828231e-12},
    {"P_GOV", 0.5364460502972015, 8.786570522756793e-18, 152.1462986358623, 9.159062661014176e-34},
    {"P_ENE", 0.4813933996259764, 3.0768005001550245e-13, 81.82896064615458, 1.70242099182856e-18},
    {"P_BIO", 0.868145247578933, 0.0015237665485730563, 11.742989250365344, 0.002818657347887186},
    {"P_CLI", 0.5924899309250817, 1.275758403992765e-15, 108.06934966404616, 3.412234652006491e-24},
};

std::vector<double> load(const std::string& name) {
    return testsupport::read_column(testsupport::fixture("normality/" + name + ".txt"));
}

}  // namespace

class NormalityFixture : public ::testing::TestWithParam<Reference> {};

TEST_P(NormalityFixture, MatchesReferenceImplementation) {
    const auto& ref = GetParam();
    const auto x = load(ref.name);
    const auto sw = shapiro_wilk(x);
    const auto dp = dagostino_pearson(x);
    EXPECT_NEAR(sw.statistic, ref.sw_w, 1e-6);
    EXPECT_NEAR(sw.p_value, ref.sw_p, 1e-6);
    EXPECT_NEAR(dp.statistic, ref.k2, 1e-6);
    EXPECT_NEAR(dp.p_value, ref.dp_p, 1e-6);
    EXPECT_EQ(sw.normal_at_5pct, ref.sw_p > 0.05);
    EXPECT_EQ(dp.normal_at_5pct, ref.dp_p > 0.05);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, NormalityFixture, ::testing::ValuesIn(kReference),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(ShapiroWilk, SmallSamples) {
    struct Case {
        std::vector<double> x;
        double w, p;
    };
    std::vector<double> tail(12);
    for (int i = 0; i < 12; ++i) tail[static_cast<std::size_t>(i)] = i;
    tail.push_back(30);
    const Case cases[] = {
        {{1.2, 3.4, 2.2, 8.0, 4.4}, 0.9285069917662704, 0.5862251176415227},
        {{1, 2, 3.5}, 0.9868421052631577, 0.780440814879016},
        {{1, 1.1, 1.3, 2, 5, 9, 9.5}, 0.7950113368710894, 0.036551060006338607},
        {tail, 0.7523816730424675, 0.001955936269080042},
    };
    for (const auto& c : cases) {
        const auto r = shapiro_wilk(c.x);
        EXPECT_NEAR(r.statistic, c.w, 1e-8);
        EXPECT_NEAR(r.p_value, c.p, 1e-8);
    }
}

TEST(ShapiroWilk, Preconditions) {
    EXPECT_THROW((void)shapiro_wilk(std::vector<double>{1, 2}), DataError);
    EXPECT_THROW((void)shapiro_wilk(std::vector<double>{3, 3, 3, 3}), DataError);
}

TEST(DagostinoPearson, Preconditions) {
    std::vector<double> ten(10);
    for (int i = 0; i < 10; ++i) ten[static_cast<std::size_t>(i)] = i * i;
    EXPECT_THROW((void)dagostino_pearson(ten), DataError);
}

TEST(Quantile, TypeSevenExamples) {
    const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8};
    EXPECT_DOUBLE_EQ(quantile(x, 0.25), 2.75);
    EXPECT_DOUBLE_EQ(quantile(x, 0.5), 4.5);
    EXPECT_DOUBLE_EQ(quantile(x, 0.75), 6.25);
    EXPECT_DOUBLE_EQ(quantile(x, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(x, 1.0), 8.0);
    EXPECT_DOUBLE_EQ(quantile(std::vector<double>{5}, 0.3), 5.0);
    EXPECT_THROW((void)quantile(std::vector<double>{}, 0.5), DataError);
}

TEST(Describe, Examples) {
    const auto d = describe(std::vector<double>{2, 4});
    EXPECT_DOUBLE_EQ(d.mean, 3.0);
    EXPECT_DOUBLE_EQ(*d.std, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(d.median, 3.0);
    const auto c = describe(std::vector<double>{7, 7, 7});
    EXPECT_DOUBLE_EQ(c.mean, 7.0);
    EXPECT_DOUBLE_EQ(*c.std, 0.0);
    EXPECT_FALSE(describe(std::vector<double>{1}).std.has_value());
    EXPECT_THROW((void)describe(std::vector<double>{}), DataError);
}

TEST(Tiers, ThresholdsAndBoundaries) {
    const auto t = tier_thresholds(Pillar::gov, std::vector<double>{8, 1, 7, 2, 6, 3, 5, 4});
    EXPECT_DOUBLE_EQ(t.q1, 2.75);
    EXPECT_DOUBLE_EQ(t.q2, 4.5);
    EXPECT_DOUBLE_EQ(t.q3, 6.25);
    EXPECT_EQ(assign_tier(1.0, t), Tier::weak);
    EXPECT_EQ(assign_tier(2.75, t), Tier::average);
    EXPECT_EQ(assign_tier(4.5, t), Tier::good);
    EXPECT_EQ(assign_tier(6.25, t), Tier::excellent);
    EXPECT_EQ(assign_tier(9.9, t), Tier::excellent);

    const auto flat = tier_thresholds(Pillar::ene, std::vector<double>{5, 5, 5, 5});
    EXPECT_EQ(flat.q1, 5.0);
    EXPECT_EQ(flat.q3, 5.0);
    try {
        (void)tier_thresholds(Pillar::gov, std::vector<double>{1, 2, 3});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("insufficient baseline"), std::string::npos);
    }
}

TEST(BaselineReport, PillarFixturesAreNotNormal) {
    for (const char* name : {"P_GOV", "P_ENE", "P_BIO", "P_CLI"}) {
        const auto r = baseline_report(Pillar::gov, load(name));
        ASSERT_TRUE(r.shapiro && r.dagostino) << name;
        EXPECT_FALSE(r.shapiro->normal_at_5pct) << name;
        EXPECT_FALSE(r.dagostino->normal_at_5pct) << name;
        EXPECT_FALSE(r.approximately_normal());
        EXPECT_LE(r.stats.q1, r.stats.median);
        EXPECT_LE(r.stats.median, r.stats.q3);
    }
}

TEST(BaselineReport, SmallSampleSkipsOmnibusTest) {
    const auto r = baseline_report(Pillar::bio, std::vector<double>{1, 2, 4, 8, 9});
    EXPECT_TRUE(r.shapiro.has_value());
    EXPECT_FALSE(r.dagostino.has_value());
    const auto c = baseline_report(Pillar::bio, std::vector<double>{3, 3, 3, 3});
    EXPECT_FALSE(c.shapiro.has_value());
    EXPECT_FALSE(c.approximately_normal());
}
