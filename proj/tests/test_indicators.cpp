#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "perfsum/confusion.hpp"
#include "perfsum/errors.hpp"
#include "perfsum/indicator.hpp"

using namespace perfsum;

namespace {

constexpr double kTol = 1e-12;

// Two-video fixture used across the whole test suite.
const ConfusionCounts kFixtureV1{50, 10, 20, 20};
const ConfusionCounts kFixtureV2{70, 10, 5, 15};

ConfusionCounts random_counts(std::mt19937_64& rng, std::uint64_t max_count = 1000000) {
    std::uniform_int_distribution<std::uint64_t> dist(0, max_count);
    ConfusionCounts c;
    do {
        c = ConfusionCounts{dist(rng), dist(rng), dist(rng), dist(rng)};
    } while (c.total() == 0);
    return c;
}

// Every (event, condition) pair admitted by the family constraint.
std::vector<IndicatorSpec> all_valid_pairs() {
    std::vector<IndicatorSpec> specs;
    for (unsigned condition = 1; condition <= 15; ++condition) {
        for (unsigned event = 1; event < condition; ++event) {
            OutcomeSet a = OutcomeSet::from_bits(event);
            OutcomeSet b = OutcomeSet::from_bits(condition);
            if (!a.proper_subset_of(b)) continue;
            specs.push_back(IndicatorSpec::probabilistic(a, b));
        }
    }
    return specs;
}

} // namespace

TEST(Normalize, DividesByTotal) {
    const NormalizedConfusion nc = normalize(kFixtureV1);
    EXPECT_DOUBLE_EQ(nc.tn(), 0.50);
    EXPECT_DOUBLE_EQ(nc.fp(), 0.10);
    EXPECT_DOUBLE_EQ(nc.fn(), 0.20);
    EXPECT_DOUBLE_EQ(nc.tp(), 0.20);
}

TEST(Normalize, DegenerateAllNegativeVideo) {
    const NormalizedConfusion nc = normalize(ConfusionCounts{1, 0, 0, 0});
    EXPECT_DOUBLE_EQ(nc.tn(), 1.0);
    EXPECT_DOUBLE_EQ(nc.fp(), 0.0);
    EXPECT_DOUBLE_EQ(nc.fn(), 0.0);
    EXPECT_DOUBLE_EQ(nc.tp(), 0.0);
}

TEST(Normalize, MatchesPooledFixtureOracle) {
    const ConfusionCounts pooled = kFixtureV1 + kFixtureV2;
    EXPECT_EQ(pooled, (ConfusionCounts{120, 20, 25, 35}));
    const NormalizedConfusion nc = normalize(pooled);
    EXPECT_NEAR(nc.tn(), 0.60, kTol);
    EXPECT_NEAR(nc.fp(), 0.10, kTol);
    EXPECT_NEAR(nc.fn(), 0.125, kTol);
    EXPECT_NEAR(nc.tp(), 0.175, kTol);
}

TEST(Normalize, ZeroTotalThrows) {
    EXPECT_THROW(normalize(ConfusionCounts{}), ZeroTotalError);
}

TEST(Normalize, ScaleInvariance) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const ConfusionCounts c = random_counts(rng);
        const NormalizedConfusion base = normalize(c);
        for (std::uint64_t k : {2ull, 7ull, 1000ull}) {
            const NormalizedConfusion scaled =
                normalize(ConfusionCounts{k * c.tn, k * c.fp, k * c.fn, k * c.tp});
            for (Outcome o : kAllOutcomes)
                EXPECT_NEAR(scaled.probability(o), base.probability(o), kTol);
        }
    }
}

TEST(UnconditionalValue, SumsSelectedMass) {
    const NormalizedConfusion nc = normalize(kFixtureV1);
    EXPECT_NEAR(unconditional_value(nc, {Outcome::fn, Outcome::tp}), 0.4, kTol); // prior
    EXPECT_DOUBLE_EQ(unconditional_value(nc, OutcomeSet{}), 0.0);
    EXPECT_DOUBLE_EQ(unconditional_value(nc, OutcomeSet::universe()), 1.0);
}

TEST(IndicatorValues, FixtureConditionals) {
    const NormalizedConfusion v1 = normalize(kFixtureV1);
    const NormalizedConfusion v2 = normalize(kFixtureV2);
    EXPECT_NEAR(indicator_value(v1, indicators::tpr()).value(), 0.5, kTol);
    EXPECT_NEAR(indicator_value(v2, indicators::ppv()).value(), 0.6, kTol);
    EXPECT_NEAR(indicator_value(v1, indicators::fpr()).value(), 1.0 / 6.0, kTol);
    EXPECT_NEAR(indicator_value(v1, indicators::tau_pos()).value(), 0.3, kTol);
}

TEST(IndicatorValues, UndefinedWhenConditionHasNoMass) {
    const NormalizedConfusion all_negative(1, 0, 0, 0);
    EXPECT_FALSE(indicator_value(all_negative, indicators::tpr()).is_defined());
    EXPECT_FALSE(indicator_value(all_negative, indicators::ppv()).is_defined());
    // No positives predicted or present: the count form of F is 0/0.
    EXPECT_FALSE(indicator_value(all_negative, indicators::f_score()).is_defined());
    EXPECT_FALSE(indicator_value(all_negative, indicators::balanced_accuracy()).is_defined());
    EXPECT_FALSE(indicator_value(all_negative, indicators::jaccard()).is_defined());
    EXPECT_TRUE(indicator_value(all_negative, indicators::accuracy()).is_defined());
}

TEST(IndicatorValues, PerfectClassifier) {
    const NormalizedConfusion perfect(0, 0, 0, 1);
    EXPECT_NEAR(indicator_value(perfect, indicators::f_score()).value(), 1.0, kTol);
    EXPECT_NEAR(indicator_value(perfect, indicators::accuracy()).value(), 1.0, kTol);
    EXPECT_NEAR(indicator_value(perfect, indicators::jaccard()).value(), 1.0, kTol);
}

TEST(IndicatorSpecTest, FamilyConstraintRejectsBadPairs) {
    const OutcomeSet tn_only{Outcome::tn};
    const OutcomeSet tn_fp{Outcome::tn, Outcome::fp};
    EXPECT_THROW(IndicatorSpec::probabilistic(OutcomeSet{}, tn_fp), InvalidSpecError);
    EXPECT_THROW(IndicatorSpec::probabilistic(tn_only, tn_only), InvalidSpecError);
    EXPECT_THROW(IndicatorSpec::probabilistic(tn_fp, tn_only), InvalidSpecError);
    EXPECT_THROW(IndicatorSpec::probabilistic({Outcome::fn}, tn_fp), InvalidSpecError);
    EXPECT_THROW(IndicatorSpec::unconditional(OutcomeSet::universe()), InvalidSpecError);
    EXPECT_NO_THROW(IndicatorSpec::probabilistic(tn_only, tn_fp));
}

TEST(IndicatorSpecTest, NamedIndicatorsResolveToCanonicalSets) {
    using S = IndicatorSpec;
    const OutcomeSet tn{Outcome::tn}, fp{Outcome::fp}, fn{Outcome::fn}, tp{Outcome::tp};
    EXPECT_EQ(indicators::prior_pos(), S::unconditional({Outcome::fn, Outcome::tp}));
    EXPECT_EQ(indicators::prior_neg(), S::unconditional({Outcome::tn, Outcome::fp}));
    EXPECT_EQ(indicators::tau_pos(), S::unconditional({Outcome::fp, Outcome::tp}));
    EXPECT_EQ(indicators::tau_neg(), S::unconditional({Outcome::tn, Outcome::fn}));
    EXPECT_EQ(indicators::error_rate(), S::unconditional({Outcome::fp, Outcome::fn}));
    EXPECT_EQ(indicators::tnr(), S::probabilistic(tn, {Outcome::tn, Outcome::fp}));
    EXPECT_EQ(indicators::fpr(), S::probabilistic(fp, {Outcome::tn, Outcome::fp}));
    EXPECT_EQ(indicators::fnr(), S::probabilistic(fn, {Outcome::fn, Outcome::tp}));
    EXPECT_EQ(indicators::tpr(), S::probabilistic(tp, {Outcome::fn, Outcome::tp}));
    EXPECT_EQ(indicators::ppv(), S::probabilistic(tp, {Outcome::fp, Outcome::tp}));
    EXPECT_EQ(indicators::npv(), S::probabilistic(tn, {Outcome::tn, Outcome::fn}));
    EXPECT_EQ(indicators::named_probabilistic().size(), 11u);
}

TEST(IndicatorSpecTest, ParseNamesAndExpressions) {
    EXPECT_EQ(IndicatorSpec::parse("TPR"), indicators::tpr());
    EXPECT_EQ(IndicatorSpec::parse("recall"), indicators::tpr());
    EXPECT_EQ(IndicatorSpec::parse("precision"), indicators::ppv());
    EXPECT_EQ(IndicatorSpec::parse("f"), indicators::f_score());
    EXPECT_EQ(IndicatorSpec::parse("{tp}|{fn,tp}"), indicators::tpr());
    EXPECT_EQ(IndicatorSpec::parse("{fn,tp}"), indicators::prior_pos());
    EXPECT_EQ(IndicatorSpec::parse(" { tp } | { fp , tp } "), indicators::ppv());
    EXPECT_THROW(IndicatorSpec::parse("bogus"), InvalidSpecError);
    EXPECT_THROW(IndicatorSpec::parse("{tp}|{tp}"), InvalidSpecError);
    EXPECT_THROW(IndicatorSpec::parse("{xx}"), InvalidSpecError);
    EXPECT_THROW(IndicatorSpec::parse(""), InvalidSpecError);
}

TEST(IndicatorSpecTest, CanonicalNamesRoundTrip) {
    EXPECT_EQ(indicators::tpr().name(), "TPR");
    EXPECT_EQ(indicators::prior_pos().name(), "prior_pos");
    EXPECT_EQ(indicators::f_score().name(), "F");
    const IndicatorSpec unnamed = IndicatorSpec::parse("{tn,tp}|{tn,fp,tp}");
    EXPECT_EQ(unnamed.name(), "{tn,tp}|{tn,fp,tp}");
    EXPECT_EQ(IndicatorSpec::parse(unnamed.name()), unnamed);
}

TEST(Properties, ComplementIdentities) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const NormalizedConfusion nc = normalize(random_counts(rng));
        const double er = indicator_value(nc, indicators::error_rate()).value();
        const double accuracy = indicator_value(nc, indicators::accuracy()).value();
        EXPECT_NEAR(er, 1.0 - accuracy, kTol);
        const IndicatorValue fpr = indicator_value(nc, indicators::fpr());
        const IndicatorValue tnr = indicator_value(nc, indicators::tnr());
        ASSERT_EQ(fpr.is_defined(), tnr.is_defined());
        if (fpr.is_defined()) { EXPECT_NEAR(fpr.value(), 1.0 - tnr.value(), kTol); }
        const IndicatorValue fnr = indicator_value(nc, indicators::fnr());
        const IndicatorValue tpr = indicator_value(nc, indicators::tpr());
        ASSERT_EQ(fnr.is_defined(), tpr.is_defined());
        if (fnr.is_defined()) { EXPECT_NEAR(fnr.value(), 1.0 - tpr.value(), kTol); }
    }
}

TEST(Properties, HarmonicIdentityAgainstCountFormula) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 500; ++i) {
        const ConfusionCounts c = random_counts(rng);
        const NormalizedConfusion nc = normalize(c);
        const IndicatorValue f = indicator_value(nc, indicators::f_score());
        // Independent oracle: the direct count formula.
        const double denominator = static_cast<double>(c.fp + c.fn + 2 * c.tp);
        if (denominator == 0.0) {
            EXPECT_FALSE(f.is_defined());
            continue;
        }
        EXPECT_NEAR(f.value(), 2.0 * static_cast<double>(c.tp) / denominator, kTol);
        const IndicatorValue p = indicator_value(nc, indicators::ppv());
        const IndicatorValue r = indicator_value(nc, indicators::tpr());
        if (p.is_defined() && r.is_defined() && p.value() + r.value() > 0.0) {
            EXPECT_NEAR(f.value(),
                        2.0 * p.value() * r.value() / (p.value() + r.value()), kTol);
        }
    }
}

TEST(Properties, RocRoundTripReconstructsConfusion) {
    std::mt19937_64 rng(17);
    int exercised = 0;
    for (int i = 0; i < 500; ++i) {
        const NormalizedConfusion nc = normalize(random_counts(rng));
        const double prior = unconditional_value(nc, {Outcome::fn, Outcome::tp});
        if (prior <= 0.0 || prior >= 1.0) continue;
        ++exercised;
        const NormalizedConfusion back =
            confusion_from_roc(prior, indicator_value(nc, indicators::fpr()),
                               indicator_value(nc, indicators::tpr()));
        for (Outcome o : kAllOutcomes)
            EXPECT_NEAR(back.probability(o), nc.probability(o), kTol);
    }
    EXPECT_GT(exercised, 400);
}

TEST(Properties, ConditionalConsistencyOverAllPairs) {
    std::mt19937_64 rng(19);
    const std::vector<IndicatorSpec> specs = all_valid_pairs();
    ASSERT_EQ(specs.size(), 50u);
    for (int i = 0; i < 100; ++i) {
        const NormalizedConfusion nc = normalize(random_counts(rng));
        for (const IndicatorSpec& spec : specs) {
            const IndicatorValue v = indicator_value(nc, spec);
            const double condition_mass = unconditional_value(nc, spec.condition());
            if (!v.is_defined()) {
                EXPECT_DOUBLE_EQ(condition_mass, 0.0);
                continue;
            }
            EXPECT_NEAR(v.value() * condition_mass,
                        unconditional_value(nc, spec.event() & spec.condition()), kTol);
        }
    }
}

TEST(ConfusionFromRoc, InvertsFixtureV1) {
    const NormalizedConfusion nc =
        confusion_from_roc(0.4, IndicatorValue::defined(1.0 / 6.0),
                           IndicatorValue::defined(0.5));
    EXPECT_NEAR(nc.tn(), 0.5, kTol);
    EXPECT_NEAR(nc.fp(), 0.1, kTol);
    EXPECT_NEAR(nc.fn(), 0.2, kTol);
    EXPECT_NEAR(nc.tp(), 0.2, kTol);
}

TEST(ConfusionFromRoc, EmptyPositiveClass) {
    const NormalizedConfusion nc =
        confusion_from_roc(0.0, IndicatorValue::defined(0.25), IndicatorValue::undefined());
    EXPECT_NEAR(nc.tn(), 0.75, kTol);
    EXPECT_NEAR(nc.fp(), 0.25, kTol);
    EXPECT_DOUBLE_EQ(nc.fn(), 0.0);
    EXPECT_DOUBLE_EQ(nc.tp(), 0.0);
}

TEST(ConfusionFromRoc, EmptyNegativeClass) {
    const NormalizedConfusion nc =
        confusion_from_roc(1.0, IndicatorValue::undefined(), IndicatorValue::defined(0.75));
    EXPECT_DOUBLE_EQ(nc.tn(), 0.0);
    EXPECT_DOUBLE_EQ(nc.fp(), 0.0);
    EXPECT_NEAR(nc.fn(), 0.25, kTol);
    EXPECT_NEAR(nc.tp(), 0.75, kTol);
}

TEST(ConfusionFromRoc, MissingRequiredConditionalThrows) {
    EXPECT_THROW(
        confusion_from_roc(0.4, IndicatorValue::undefined(), IndicatorValue::defined(0.5)),
        MissingIndicatorError);
    EXPECT_THROW(
        confusion_from_roc(0.4, IndicatorValue::defined(0.2), IndicatorValue::undefined()),
        MissingIndicatorError);
}

TEST(IndicatorValueTest, RangeIsEnforced) {
    EXPECT_THROW(IndicatorValue::defined(1.5), std::invalid_argument);
    EXPECT_THROW(IndicatorValue::defined(-0.5), std::invalid_argument);
    EXPECT_DOUBLE_EQ(IndicatorValue::defined(1.0 + 1e-13).value(), 1.0);
    EXPECT_THROW(IndicatorValue::undefined().value(), std::logic_error);
    EXPECT_DOUBLE_EQ(IndicatorValue::undefined().value_or(0.5), 0.5);
}
