// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "earid/earid.hpp"
#include "support/tempdir.hpp"

using namespace earid;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GeneratorConfig tiny_generator() {
    GeneratorConfig g;
    g.n_clients = 4;
    g.n_imposters = 2;
    g.duration_s = 70.0;
    return g;
}

EvalConfig tiny_eval(const fs::path& data) {
    EvalConfig cfg;
    cfg.dataset = data;
    cfg.segment_lengths = {30};
    cfg.classifiers = {ClassifierKind::Cosine, ClassifierKind::Lda, ClassifierKind::Svm};
    cfg.svm_grid.C = {1.0, 10.0};
    cfg.svm_grid.gamma = {0.1, 1.0};
    cfg.svm_folds = 3;
    return cfg;
}

} // namespace

TEST(Config, ParseOverridesAndComments) {
    std::istringstream in(R"(# evaluation
setups = b
segment_lengths = 20, 60   # two lengths
classifiers = cos, svm
include_sn = no
seed = 7
svm_kernels = linear, rbf
svm_client_weight = 3
)");
    EvalConfig cfg;
    parse_config(in, cfg, "test.cfg");
    EXPECT_EQ(cfg.setups, std::vector<earid::Setup>{earid::Setup::B});
    EXPECT_EQ(cfg.segment_lengths, (std::vector<double>{20, 60}));
    EXPECT_EQ(cfg.classifiers, (std::vector<ClassifierKind>{ClassifierKind::Cosine, ClassifierKind::Svm}));
    EXPECT_FALSE(cfg.include_sn);
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.svm_grid.kernels, (std::vector<Kernel>{Kernel::Linear, Kernel::Rbf}));
    EXPECT_EQ(cfg.svm_client_weight, 3.0);
}

TEST(Config, WriteThenParseRoundTrips) {
    EvalConfig cfg;
    cfg.dataset = "/data/x";
    cfg.segment_lengths = {10, 90};
    cfg.cos_threshold = 0.25;
    cfg.filter.order = 6;
    std::ostringstream out;
    write_config(out, cfg);
    EvalConfig back;
    std::istringstream in(out.str());
    parse_config(in, back);
    std::ostringstream again;
    write_config(again, back);
    EXPECT_EQ(out.str(), again.str());
    EXPECT_EQ(back.cos_threshold, 0.25);
    EXPECT_EQ(back.filter.order, 6);
}

TEST(Config, ErrorsNameTheLine) {
    EvalConfig cfg;
    std::istringstream unknown("seed = 1\nsegment_len = 3\n");
    try {
        parse_config(unknown, cfg, "x.cfg");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
        EXPECT_NE(std::string(e.what()).find("x.cfg:2"), std::string::npos);
    }
    std::istringstream bad_bool("include_sn = maybe\n");
    EXPECT_THROW(parse_config(bad_bool, cfg), Error);
    std::istringstream no_equals("seed 1\n");
    EXPECT_THROW(parse_config(no_equals, cfg), Error);

    EvalConfig empty;
    empty.classifiers.clear();
    EXPECT_THROW(check_config(empty), Error);
    EvalConfig negative;
    negative.segment_lengths = {-1};
    EXPECT_THROW(check_config(negative), Error);
}

TEST(Evaluation, EndToEndSmallDataset) {
    testing_support::TempDir data, out;
    const Dataset ds = generate_dataset(tiny_generator(), data.path());
    const auto cfg = tiny_eval(data.path());
    const auto summary = run_evaluation(cfg, ds, out.path(), nullptr, 2);
    EXPECT_EQ(summary.verification.size(), 2u * 3u);
    EXPECT_FALSE(fs::exists(out.path() / "FAILED"));
    for (const auto& f : expected_eval_files(true)) EXPECT_TRUE(fs::exists(out.path() / f)) << f;

    // 4 clients x 2 days x 3 trials, 2 segments of 30 s each
    const auto plans = enumerate_runs(earid::Setup::R, ds);
    ASSERT_EQ(plans.size(), 24u);
    const auto stores = extract_features(ds, {30}, pipeline_of(cfg), 1);
    const auto& store = stores.at(30.0);
    const CellResult cos = run_cell({earid::Setup::R, 30, ClassifierKind::Cosine, FeatureSet::PsdAr}, plans, store, cfg, 4, 1);
    const auto& vin = cos.slices.by_role.at(Role::VIN);
    // every never-enrolled row is accepted in exactly one of the four client runs
    EXPECT_EQ(vin.fp * 4, vin.total());
    EXPECT_EQ(cos.slices.overall.fn, cos.slices.overall.fp);
    EXPECT_EQ(cos.slices.overall.total(), 24 * 4 * 2);

    std::map<std::tuple<int, int, RowLabel>, int> accepted;
    for (const auto& p : cos.predictions)
        if (p.role == Role::VIN) accepted[{p.run.day, p.run.trial, p.source}] += p.predicted > 0;
    EXPECT_EQ(accepted.size(), 2u * 3u * 2u * 2u);
    for (const auto& [key, n] : accepted) EXPECT_EQ(n, 1);
}

TEST(Evaluation, ByteIdenticalAcrossThreadCounts) {
    testing_support::TempDir data, a, b;
    const Dataset ds = generate_dataset(tiny_generator(), data.path());
    auto cfg = tiny_eval(data.path());
    cfg.classifiers = {ClassifierKind::Cosine, ClassifierKind::Svm};
    run_evaluation(cfg, ds, a.path(), nullptr, 1);
    run_evaluation(cfg, ds, b.path(), nullptr, 3);
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a.path())) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), a.path());
        ASSERT_TRUE(fs::exists(b.path() / rel)) << rel;
        EXPECT_EQ(slurp(entry.path()), slurp(b.path() / rel)) << rel;
        ++compared;
    }
    EXPECT_GT(compared, 10u);

    write_report(a.path(), a.path() / "report", {}, 1);
    write_report(b.path(), b.path() / "report", {}, 2);
    for (const auto* f : {"verification_table.csv", "identification_vs_length.csv", "psd_plot.csv", "summary.txt"})
        EXPECT_EQ(slurp(a.path() / "report" / f), slurp(b.path() / "report" / f)) << f;
}

TEST(Evaluation, SegmentLongerThanRecordingIsRejected) {
    testing_support::TempDir data, out;
    const Dataset ds = generate_dataset(tiny_generator(), data.path());
    auto cfg = tiny_eval(data.path());
    cfg.segment_lengths = {90};
    try {
        run_evaluation(cfg, ds, out.path(), nullptr, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("exceeds the trimmed recording"), std::string::npos) << e.what();
    }
    EXPECT_TRUE(fs::exists(out.path() / "FAILED"));
}

TEST(Report, EmptyDirectoryListsMissingFiles) {
    testing_support::TempDir dir;
    try {
        write_report(dir.path(), dir.path() / "r");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingFile);
        EXPECT_NE(std::string(e.what()).find("verification.csv"), std::string::npos);
    }
}
