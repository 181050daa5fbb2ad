// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "earid/signal.hpp"
#include "support/oracles.hpp"

using namespace earid;

namespace {

double db(double mag) { return 20.0 * std::log10(mag); }

Recording make_recording(std::vector<double> ch1, std::vector<double> ch2, double fs = 250.0) {
    Recording r;
    r.subject = "R01";
    r.fs = fs;
    r.channels = {std::move(ch1), std::move(ch2)};
    return r;
}

double peak_after(const std::vector<double>& y, std::size_t from) {
    double m = 0.0;
    for (std::size_t i = from; i < y.size(); ++i) m = std::max(m, std::abs(y[i]));
    return m;
}

} // namespace

TEST(DesignBandpass, SuppressesDc) {
    const auto f = design_bandpass({}, 250.0);
    EXPECT_LT(std::abs(frequency_response(f, 0.0)), 1e-3);
}

TEST(DesignBandpass, EdgesAtMinus3dB) {
    const auto f = design_bandpass({}, 250.0);
    EXPECT_NEAR(db(std::abs(frequency_response(f, 0.5))), -3.0103, 0.5);
    EXPECT_NEAR(db(std::abs(frequency_response(f, 30.0))), -3.0103, 0.5);
}

TEST(DesignBandpass, MidBandUnityGain) {
    const auto f = design_bandpass({}, 250.0);
    EXPECT_NEAR(db(std::abs(frequency_response(f, 10.0))), 0.0, 0.2);
}

TEST(DesignBandpass, MatchesAnalogPrototypeMagnitude) {
    for (double fs : {250.0, 1200.0}) {
        const FilterSpec spec{};
        const auto f = design_bandpass(spec, fs);
        for (double hz : {0.1, 0.5, 1.0, 5.0, 10.0, 20.0, 30.0, 45.0, 60.0, 100.0}) {
            const double expected = oracle::butterworth_bandpass_magnitude(spec.order, spec.low_hz, spec.high_hz, fs, hz);
            EXPECT_NEAR(std::abs(frequency_response(f, hz)), expected, 1e-6) << "fs " << fs << " f " << hz;
        }
    }
}

TEST(DesignBandpass, PolesInsideUnitCircle) {
    for (double fs : {128.0, 250.0, 1200.0})
        for (int order : {2, 4, 6}) {
            const auto f = design_bandpass({order, 0.5, 30.0}, fs);
            ASSERT_EQ(f.sections.size(), static_cast<std::size_t>(order));
            for (const auto& p : f.poles()) EXPECT_LT(std::abs(p), 1.0);
        }
    const auto alpha = design_bandpass({4, 8.0, 13.0}, 250.0);
    for (const auto& p : alpha.poles()) EXPECT_LT(std::abs(p), 1.0);
}

TEST(DesignBandpass, RejectsInvalidSpecs) {
    EXPECT_THROW(design_bandpass({4, 0.0, 30.0}, 250.0), Error);
    EXPECT_THROW(design_bandpass({4, 30.0, 10.0}, 250.0), Error);
    EXPECT_THROW(design_bandpass({4, 0.5, 125.0}, 250.0), Error);
    EXPECT_THROW(design_bandpass({3, 0.5, 30.0}, 250.0), Error);
    try {
        design_bandpass({4, 0.5, 200.0}, 250.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidSpec);
    }
}

TEST(FilterRecording, ZeroInZeroOut) {
    const auto f = design_bandpass({}, 250.0);
    const auto out = filter_recording(make_recording(std::vector<double>(1000, 0.0), std::vector<double>(1000, 0.0)), f);
    for (const auto& ch : out.channels)
        for (double v : ch) EXPECT_EQ(v, 0.0);
}

TEST(FilterRecording, PassesTenHertz) {
    const auto f = design_bandpass({}, 250.0);
    const auto x = oracle::sine(250 * 20, 250.0, 10.0);
    const auto out = filter_recording(make_recording(x, x), f);
    EXPECT_NEAR(peak_after(out.channels[0], 250 * 10), 1.0, 0.02);
}

TEST(FilterRecording, AttenuatesSixtyHertz) {
    const auto f = design_bandpass({}, 250.0);
    const auto x = oracle::sine(250 * 20, 250.0, 60.0);
    const auto out = filter_recording(make_recording(x, x), f);
    const double amp = peak_after(out.channels[1], 250 * 10);
    EXPECT_LT(amp, 0.15);
    EXPECT_NEAR(amp, oracle::butterworth_bandpass_magnitude(4, 0.5, 30.0, 250.0, 60.0), 0.01);
}

TEST(FilterRecording, PreservesIdentityAndIsDeterministic) {
    const auto f = design_bandpass({}, 250.0);
    auto rec = make_recording(oracle::white_noise(2000, 1), oracle::white_noise(2000, 2));
    rec.subject = "R07";
    rec.day = 2;
    rec.trial = 3;
    const auto a = filter_recording(rec, f);
    const auto b = filter_recording(rec, f);
    EXPECT_EQ(a.subject, "R07");
    EXPECT_EQ(a.day, 2);
    EXPECT_EQ(a.trial, 3);
    EXPECT_EQ(a.channels, b.channels);
}

TEST(TrimHead, DropsLeadingSamples) {
    const auto rec = make_recording(std::vector<double>(47500, 1.0), std::vector<double>(47500, 2.0));
    const auto t = trim_head(rec, 5.0);
    EXPECT_EQ(t.samples(), 46250u);
    EXPECT_DOUBLE_EQ(t.duration(), 185.0);
}

TEST(TrimHead, ZeroIsIdentity) {
    const auto rec = make_recording(oracle::white_noise(500, 3), oracle::white_noise(500, 4));
    EXPECT_EQ(trim_head(rec, 0.0).channels, rec.channels);
}

TEST(TrimHead, TooShortIsAnError) {
    const auto rec = make_recording(std::vector<double>(1000, 0.0), std::vector<double>(1000, 0.0));
    try {
        trim_head(rec, 5.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooShort);
    }
}

TEST(Segmentize, CountsFollowFloor) {
    const auto rec = make_recording(std::vector<double>(46250, 0.0), std::vector<double>(46250, 0.0));
    const std::vector<std::pair<double, std::size_t>> cases{{10, 18}, {20, 9}, {30, 6}, {60, 3}, {90, 2}};
    for (const auto& [len, n] : cases) {
        const auto segs = segmentize(rec, len);
        ASSERT_EQ(segs.size(), n) << len;
        EXPECT_EQ(segs[0].channels[0].size(), static_cast<std::size_t>(len * 250));
        EXPECT_EQ(segs[0].epoch_mask.size(), static_cast<std::size_t>(len / 2));
    }
    EXPECT_TRUE(segmentize(rec, 200.0).empty());
}

TEST(Segmentize, PartitionsTheRecording) {
    std::vector<double> x(46250);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    const auto rec = make_recording(x, x);
    const auto segs = segmentize(rec, 60.0);
    std::vector<double> joined;
    for (const auto& s : segs) {
        EXPECT_EQ(s.index, static_cast<int>(&s - &segs[0]));
        joined.insert(joined.end(), s.channels[0].begin(), s.channels[0].end());
    }
    ASSERT_EQ(joined.size(), 3u * 15000u);
    for (std::size_t i = 0; i < joined.size(); ++i) ASSERT_EQ(joined[i], x[i]);
}

TEST(RejectArtifacts, CleanSegmentKeepsEveryEpoch) {
    const auto rec = make_recording(std::vector<double>(15000, 0.0), std::vector<double>(15000, 0.0));
    const auto seg = reject_artifacts(segmentize(rec, 60.0)[0], 50.0);
    EXPECT_EQ(seg.retained(), 30u);
}

TEST(RejectArtifacts, SingleSampleOverThresholdRejectsItsEpoch) {
    std::vector<double> ch2(15000, 0.0);
    ch2[3 * 500 + 17] = 51.0; // epoch index 3
    const auto rec = make_recording(std::vector<double>(15000, 0.0), ch2);
    const auto seg = reject_artifacts(segmentize(rec, 60.0)[0], 50.0);
    for (std::size_t e = 0; e < seg.epoch_mask.size(); ++e) EXPECT_EQ(seg.epoch_mask[e], e != 3) << e;
    // exactly at the threshold is retained
    ch2[3 * 500 + 17] = 50.0;
    EXPECT_EQ(reject_artifacts(segmentize(make_recording(std::vector<double>(15000, 0.0), ch2), 60.0)[0], 50.0).retained(),
              30u);
}

TEST(RejectArtifacts, RejectsExactlyTheSpikedEpochs) {
    auto ch1 = oracle::white_noise(15000, 11, 5.0);
    auto ch2 = oracle::white_noise(15000, 12, 5.0);
    const std::vector<std::size_t> spiked{0, 7, 21};
    for (auto e : spiked) (e == 7 ? ch2 : ch1)[e * 500 + 250] = -100.0;
    const auto seg = reject_artifacts(segmentize(make_recording(ch1, ch2), 60.0)[0], 50.0);
    for (std::size_t e = 0; e < 30; ++e)
        EXPECT_EQ(seg.epoch_mask[e], std::find(spiked.begin(), spiked.end(), e) == spiked.end()) << e;
}

TEST(RejectArtifacts, LowerThresholdNeverRetainsMore) {
    const auto rec = make_recording(oracle::white_noise(15000, 5, 20.0), oracle::white_noise(15000, 6, 20.0));
    const auto seg = segmentize(rec, 60.0)[0];
    const auto hi = reject_artifacts(seg, 70.0);
    const auto lo = reject_artifacts(seg, 55.0);
    for (std::size_t e = 0; e < 30; ++e)
        if (!hi.epoch_mask[e]) {
            EXPECT_FALSE(lo.epoch_mask[e]);
        }
    EXPECT_LE(lo.retained(), hi.retained());
    EXPECT_THROW(reject_artifacts(seg, 0.0), Error);
}
