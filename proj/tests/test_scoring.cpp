#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "liqsurf/config.hpp"
#include "liqsurf/scoring.hpp"
#include "oracle/equivalence.hpp"
#include "oracle/naive_scorer.hpp"

using namespace liqsurf;

namespace {

// 40x40 image, 200 above row 20 and 100 from row 20 down, vessel rows 2..37.
struct TwoBands {
    GrayImage gray = testutil::bands(40, 40, 20, 200.0, 100.0);
    VesselRegion vessel = testutil::rectangle(2, 37, 2, 37, 40, 40);
};

Indicator m1(Equation eq, Aggregation agg = Aggregation::Average)
{
    Indicator ind;
    ind.method = Method::M1;
    ind.equation = eq;
    ind.aggregation = agg;
    return ind;
}

ScoredCurve scored(double score, bool consistent, Half half)
{
    ScoredCurve s;
    s.score = score;
    s.consistent = consistent;
    s.curve.half = half;
    s.curve.h = half == Half::Line ? 0 : 3;
    return s;
}

} // namespace

TEST_SUITE("scoring")
{
    TEST_CASE("local score equations")
    {
        LocalSample s;
        s.U = 200;
        s.D = 100;
        CHECK(local_score(s, Equation::rel_U_minus_D) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(local_score(s, Equation::U_minus_D) == 100.0);
        CHECK(local_score(s, Equation::abs_U_minus_D) == 100.0);
        CHECK(local_score(s, Equation::global_rel_U_minus_D, 150.0, 250.0) == doctest::Approx(0.4));

        LocalSample eq;
        eq.U = eq.D = 73.5;
        for (Equation e : {Equation::U_minus_D, Equation::rel_U_minus_D, Equation::abs_U_minus_D,
                           Equation::abs_rel_U_minus_D, Equation::global_rel_U_minus_D}) {
            CHECK(local_score(eq, e, 10.0, 20.0) == 0.0);
        }
        LocalSample zero;
        CHECK(local_score(zero, Equation::rel_U_minus_D) == 0.0);
        CHECK(local_score(zero, Equation::global_rel_U_minus_D, 0.0, 0.0) == 0.0);

        LocalSample edge;
        edge.I = 1.0;
        edge.theta = std::numbers::pi / 2;
        edge.phi = std::numbers::pi / 2;
        edge.phi_valid = true;
        CHECK(local_score(edge, Equation::I_cos_theta_phi) == doctest::Approx(1.0).epsilon(1e-15));
        edge.phi = 0.0;
        CHECK(std::abs(local_score(edge, Equation::I_cos_theta_phi)) < 1e-15);
        edge.phi_valid = false;
        CHECK(local_score(edge, Equation::I_cos_theta_phi) == 0.0);
        CHECK(local_score(edge, Equation::I) == 1.0);
    }

    TEST_CASE("aggregation examples")
    {
        const std::vector<double> flat(10, 0.2);
        CHECK(aggregate(flat, Aggregation::Average) == doctest::Approx(0.2));
        CHECK(aggregate(flat, Aggregation::Percentile65) == 0.2);

        std::vector<double> mixed(50, 0.3);
        mixed.insert(mixed.end(), 50, -0.3);
        CHECK(aggregate(mixed, Aggregation::Average) <= 1e-15);
        // Rank 35 of 100 ascending is -0.3 and the mirrored rank is +0.3:
        // neither side is reached by 65% of the points.
        CHECK(aggregate(mixed, Aggregation::Percentile65) == 0.0);
        CHECK(oracle::percentile65(mixed) == 0.0);

        std::vector<double> skew(70, 0.2);
        skew.insert(skew.end(), 30, 0.9);
        CHECK(aggregate(skew, Aggregation::Percentile65) == 0.2);

        std::vector<double> neg(70, -0.4);
        neg.insert(neg.end(), 30, 0.1);
        CHECK(aggregate(neg, Aggregation::Percentile65) == doctest::Approx(0.4));

        CHECK(aggregate(std::vector<double>{-0.7}, Aggregation::AsIs) == doctest::Approx(0.7));
        CHECK_THROWS_AS(aggregate(std::vector<double>{}, Aggregation::Average), ParameterError);
        CHECK_THROWS_AS(aggregate(std::vector<double>{1, 2}, Aggregation::AsIs), ParameterError);
    }

    TEST_CASE("percentile65 agrees with the sorting oracle and stays within bounds")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        std::uniform_int_distribution<int> len(1, 120);
        for (int t = 0; t < 500; ++t) {
            std::vector<double> v(static_cast<std::size_t>(len(rng)));
            double mx = 0.0;
            for (auto& x : v) {
                x = d(rng);
                mx = std::max(mx, std::abs(x));
            }
            const double p = aggregate(v, Aggregation::Percentile65);
            CHECK(p == oracle::percentile65(v));
            CHECK(p >= 0.0);
            CHECK(p <= mx);
            CHECK(consistent_scores(v) == oracle::consistent(v));
        }
    }

    TEST_CASE("consistency examples")
    {
        CHECK(consistent_scores(std::vector<double>(20, 0.2)));
        CHECK_FALSE(consistent_scores(std::vector<double>(20, 0.05)));
        std::vector<double> v(90, -0.3);
        v.insert(v.end(), 10, 0.5);
        CHECK(consistent_scores(v));
        std::vector<double> w(80, -0.3);
        w.insert(w.end(), 20, 0.5);
        CHECK_FALSE(consistent_scores(w));
        CHECK_FALSE(consistent_scores(std::vector<double>{}));
    }

    TEST_CASE("unsampleable curve fails the check and throws from the sampler")
    {
        const auto v = testutil::rectangle(2, 37, 2, 37, 40, 40);
        const GrayImage g(40, 40, 50.0);
        // A line along the image's top row has no admitted row above it.
        const auto c = make_candidate(0, 2, 37, 0, Half::Line);
        CHECK_FALSE(consistency_check(c, g, v));
        CHECK_THROWS_WITH_AS(local_samples_m1(c, g, v, 1), "curve unsampleable", ParameterError);
    }

    TEST_CASE("method 1 samples on uniform and banded images")
    {
        TwoBands tb;
        const GrayImage uniform(40, 40, 100.0);
        for (const auto& s : local_samples_m1(make_candidate(20, 2, 37, 0, Half::Line), uniform, tb.vessel, 1)) {
            CHECK(s.U == 100.0);
            CHECK(s.D == 100.0);
        }
        const auto at_edge = local_samples_m1(make_candidate(20, 2, 37, 0, Half::Line), tb.gray, tb.vessel, 1);
        // The end columns need a neighbour outside the vessel and are dropped.
        CHECK(at_edge.size() == 34);
        for (const auto& s : at_edge) {
            CHECK(s.U == 200.0);
            CHECK(s.D == 100.0);
        }
        for (const auto& s : local_samples_m1(make_candidate(23, 2, 37, 0, Half::Line), tb.gray, tb.vessel, 1)) {
            CHECK(s.U == 100.0);
            CHECK(s.D == 100.0);
        }
    }

    TEST_CASE("one-pixel window on an upper half")
    {
        // Distinct value per pixel so the U/D split can be read back.
        GrayImage g(30, 30);
        for (int y = 0; y < 30; ++y) {
            for (int x = 0; x < 30; ++x) {
                g.at(x, y) = 1000.0 * y + x;
            }
        }
        const auto v = testutil::rectangle(0, 29, 0, 29, 30, 30);
        const auto c = make_candidate(15, 5, 25, 4, Half::Upper);
        const auto samples = local_samples_m1(c, g, v, 1);
        REQUIRE(samples.size() == c.points.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const int x = static_cast<int>(c.points[i].x);
            const int y = pixel_row(c.points[i].y);
            // Pixels on rows y-1 and y in columns x-1..x+1, split by each column's locus.
            double su = 0;
            double sd = 0;
            int nu = 0;
            int nd = 0;
            for (int yy = y - 1; yy <= y; ++yy) {
                for (int xx = x - 1; xx <= x + 1; ++xx) {
                    const int cx = std::clamp(xx, 5, 25);
                    const int locus = pixel_row(c.points[static_cast<std::size_t>(cx - 5)].y);
                    (yy < locus ? su : sd) += g.at(xx, yy);
                    (yy < locus ? nu : nd) += 1;
                }
            }
            CHECK(samples[i].U == doctest::Approx(su / nu));
            CHECK(samples[i].D == doctest::Approx(sd / nd));
            CHECK(samples[i].I == g.at(x, y));
        }
    }

    TEST_CASE("entry 22 on two bands")
    {
        TwoBands tb;
        const auto& p = find_preset("entry22");
        const auto planes = ImagePlanes::prepare(tb.gray, p.indicator, CannyParams{});
        const auto at = score_curve(make_candidate(20, 2, 37, 0, Half::Line), planes, tb.vessel, p.indicator);
        REQUIRE(at);
        CHECK(at->score == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(at->consistent);
        for (int row : {5, 10, 17, 23, 30, 35}) {
            const auto off = score_curve(make_candidate(row, 2, 37, 0, Half::Line), planes, tb.vessel, p.indicator);
            REQUIRE(off);
            CHECK(off->score == 0.0);
            CHECK_FALSE(off->consistent);
        }
    }

    TEST_CASE("method 3 on a clean edge line and method 2 on an empty edge map")
    {
        const auto v = testutil::rectangle(2, 37, 2, 37, 40, 40);
        ImagePlanes planes;
        planes.gray = GrayImage(40, 40, 100.0);
        planes.gray_gradient = sobel_gradient(planes.gray);
        GrayImage edge(40, 40, 0.0);
        for (int x = 0; x < 40; ++x) {
            edge.at(x, 20) = 1.0;
        }
        planes.edge = edge;
        Indicator ind;
        ind.method = Method::M3;
        ind.equation = Equation::diff_IA;
        ind.plane = PlaneKind::Edge;
        ind.aggregation = Aggregation::AsIs;
        const auto s = score_curve(make_candidate(20, 2, 37, 0, Half::Line), planes, v, ind);
        REQUIRE(s);
        CHECK(s->score == 1.0);
        ind.equation = Equation::rel_diff_IA;
        CHECK(score_curve(make_candidate(20, 2, 37, 0, Half::Line), planes, v, ind)->score == 1.0);
        ind.equation = Equation::norm_diff_IA;
        CHECK(score_curve(make_candidate(20, 2, 37, 0, Half::Line), planes, v, ind)->score == 1.0);

        planes.edge = GrayImage(40, 40, 0.0);
        Indicator m2;
        m2.method = Method::M2;
        m2.equation = Equation::I;
        m2.plane = PlaneKind::Edge;
        for (const auto& c : enumerate_candidates(v, ScanParams{})) {
            const auto r = score_curve(c, planes, v, m2);
            REQUIRE(r);
            CHECK(r->score == 0.0);
        }
    }

    TEST_CASE("interior indicator rejects lines and scores a bright disc")
    {
        GrayImage g(60, 60, 50.0);
        const auto v = testutil::rectangle(2, 57, 2, 57, 60, 60);
        Indicator ind;
        ind.method = Method::Interior;
        ind.equation = Equation::interior_minus_ring;
        ind.aggregation = Aggregation::AsIs;
        const auto planes = ImagePlanes::prepare(g, ind, CannyParams{});
        CHECK_FALSE(score_curve(make_candidate(30, 10, 50, 0, Half::Line), planes, v, ind));
        const auto flat = score_curve(make_candidate(30, 10, 50, 6, Half::Upper), planes, v, ind);
        REQUIRE(flat);
        CHECK(flat->score == 0.0);
    }

    TEST_CASE("score_ellipse picks the better half")
    {
        CHECK(score_ellipse(scored(0.6, true, Half::Upper), scored(0.3, true, Half::Lower)).ellipse_score_source ==
              Half::Upper);
        CHECK(score_ellipse(scored(0.3, true, Half::Upper), scored(0.3, true, Half::Lower)).ellipse_score_source ==
              Half::Upper);
        const auto r = score_ellipse(scored(0.6, false, Half::Upper), scored(0.3, true, Half::Lower));
        CHECK(r.ellipse_score_source == Half::Lower);
        CHECK(r.score == 0.3);
        CHECK(score_ellipse(scored(0.6, false, Half::Upper), scored(0.3, true, Half::Lower), false)
                  .ellipse_score_source == Half::Upper);
    }

    TEST_CASE("sign cancellation: absolute differences never score below signed ones")
    {
        // Column blocks of width 6 alternate which side of row 20 is brighter.
        GrayImage g(48, 40);
        for (int y = 0; y < 40; ++y) {
            for (int x = 0; x < 48; ++x) {
                const bool flip = (x / 6) % 2 == 1;
                g.at(x, y) = (y < 20) != flip ? 200.0 : 100.0;
            }
        }
        const auto v = testutil::rectangle(1, 38, 0, 47, 48, 40);
        const auto signed_ind = m1(Equation::U_minus_D);
        const auto abs_ind = m1(Equation::abs_U_minus_D);
        const auto planes = ImagePlanes::prepare(g, signed_ind, CannyParams{});
        const auto line = make_candidate(20, 0, 47, 0, Half::Line);
        const double s = score_curve(line, planes, v, signed_ind)->score;
        const double a = score_curve(line, planes, v, abs_ind)->score;
        CHECK(s < 10.0);
        CHECK(a > 60.0);

        std::mt19937_64 rng(11);
        const auto rg = testutil::random_gray(48, 40, rng);
        const auto rp = ImagePlanes::prepare(rg, signed_ind, CannyParams{});
        for (const auto& c : enumerate_candidates(v, ScanParams{0.3, 3, 0.2, 4})) {
            const auto ss = score_curve(c, rp, v, signed_ind);
            const auto aa = score_curve(c, rp, v, abs_ind);
            REQUIRE(ss.has_value() == aa.has_value());
            if (ss) {
                CHECK(aa->score >= ss->score - 1e-12);
            }
        }
    }

    TEST_CASE("scores re-derive from their local scores")
    {
        std::mt19937_64 rng(5);
        const auto g = testutil::random_gray(50, 50, rng);
        const auto v = testutil::rectangle(3, 46, 3, 46, 50, 50);
        for (const auto& p : presets()) {
            if (p.indicator.method == Method::M3 || p.indicator.method == Method::Interior ||
                p.indicator.plane == PlaneKind::RgbAveraged) {
                continue;
            }
            const auto planes = ImagePlanes::prepare(g, p.indicator, CannyParams{});
            for (const auto& c : enumerate_candidates(v, ScanParams{0.3, 5, 0.2, 7})) {
                const auto s = score_curve(c, planes, v, p.indicator);
                if (s) {
                    CHECK(s->score == doctest::Approx(aggregate(s->local_scores, p.indicator.aggregation))
                                          .epsilon(1e-12));
                    CHECK(s->score >= 0.0);
                }
            }
        }
    }

    TEST_CASE("relative scores are scale invariant")
    {
        std::mt19937_64 rng(3);
        const auto g = testutil::random_gray(40, 40, rng, 10.0, 255.0);
        const auto v = testutil::rectangle(2, 37, 2, 37, 40, 40);
        const auto cands = enumerate_candidates(v, ScanParams{0.3, 2, 0.2, 3});
        for (Equation eq : {Equation::rel_U_minus_D, Equation::abs_rel_U_minus_D}) {
            const auto ind = m1(eq);
            const auto base = ImagePlanes::prepare(g, ind, CannyParams{});
            for (double c : {0.25, 0.5, 1.0}) {
                GrayImage scaled = g;
                for (auto& px : scaled.data()) {
                    px *= c;
                }
                const auto sp = ImagePlanes::prepare(scaled, ind, CannyParams{});
                for (const auto& cand : cands) {
                    const auto a = score_curve(cand, base, v, ind);
                    const auto b = score_curve(cand, sp, v, ind);
                    REQUIRE(a.has_value() == b.has_value());
                    if (!a) {
                        continue;
                    }
                    REQUIRE(a->local_scores.size() == b->local_scores.size());
                    for (std::size_t i = 0; i < a->local_scores.size(); ++i) {
                        CHECK(std::abs(a->local_scores[i] - b->local_scores[i]) <= 1e-9);
                    }
                }
            }
        }
    }

    TEST_CASE("inversion negates U-D local scores")
    {
        std::mt19937_64 rng(9);
        const auto g = testutil::random_gray(40, 40, rng);
        GrayImage inv = g;
        for (auto& px : inv.data()) {
            px = 255.0 - px;
        }
        const auto v = testutil::rectangle(2, 37, 2, 37, 40, 40);
        const auto ind = m1(Equation::U_minus_D);
        const auto a = ImagePlanes::prepare(g, ind, CannyParams{});
        const auto b = ImagePlanes::prepare(inv, ind, CannyParams{});
        for (const auto& c : enumerate_candidates(v, ScanParams{0.3, 2, 0.2, 3})) {
            const auto sa = score_curve(c, a, v, ind);
            const auto sb = score_curve(c, b, v, ind);
            REQUIRE(sa.has_value() == sb.has_value());
            if (!sa) {
                continue;
            }
            for (std::size_t i = 0; i < sa->local_scores.size(); ++i) {
                CHECK(std::abs(sa->local_scores[i] + sb->local_scores[i]) <= 1e-9);
            }
            CHECK(std::abs(sa->score - sb->score) <= 1e-9);
        }
    }

    TEST_CASE("consistency verdicts can change under inversion")
    {
        // 255 above and 230 below: relative change 25/255 < 0.1. Inverted, 0
        // above and 25 below gives -1 everywhere.
        const auto g = testutil::bands(40, 40, 20, 255.0, 230.0);
        const auto inv = testutil::bands(40, 40, 20, 0.0, 25.0);
        const auto v = testutil::rectangle(2, 37, 2, 37, 40, 40);
        const auto line = make_candidate(20, 2, 37, 0, Half::Line);
        CHECK_FALSE(consistency_check(line, g, v));
        CHECK(consistency_check(line, inv, v));
    }

    TEST_CASE("indicator validation and plane mismatch")
    {
        CHECK_THROWS_AS(m1(Equation::I).validate(), ConfigError);
        CHECK_THROWS_AS(m1(Equation::U_minus_D, Aggregation::AsIs).validate(), ConfigError);
        Indicator m3;
        m3.method = Method::M3;
        m3.equation = Equation::diff_IA;
        m3.aggregation = Aggregation::Average;
        CHECK_THROWS_AS(m3.validate(), ConfigError);
        Indicator frac = m1(Equation::U_minus_D);
        frac.region = {RegionHeight::Mode::FractionOfVessel, 1.5};
        CHECK_THROWS_AS(frac.validate(), ConfigError);
        CHECK_THROWS_AS(method_from_string("m4"), ConfigError);
        CHECK(equation_from_string("i_cos_theta_phi") == Equation::I_cos_theta_phi);

        TwoBands tb;
        const auto planes = ImagePlanes::prepare(tb.gray, m1(Equation::U_minus_D), CannyParams{});
        Indicator edge = m1(Equation::U_minus_D);
        edge.plane = PlaneKind::Edge;
        CHECK_THROWS_AS(score_curve(make_candidate(20, 2, 37, 0, Half::Line), planes, tb.vessel, edge), ConfigError);
        Indicator rgb = m1(Equation::U_minus_D);
        rgb.plane = PlaneKind::RgbAveraged;
        CHECK_THROWS_AS(ImagePlanes::prepare(tb.gray, rgb, CannyParams{}), ConfigError);
    }

    TEST_CASE("every preset matches the naive oracle")
    {
        for (const auto& p : presets()) {
            CAPTURE(p.name);
            const auto st = oracle::compare_with_library(p, 6, 12, 101);
            CHECK_MESSAGE(st.mismatches == 0, st.first_failure);
            CHECK(st.compared > 0);
        }
    }
}
