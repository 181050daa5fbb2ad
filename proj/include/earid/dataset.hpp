// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_DATASET_HPP
#define EARID_DATASET_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "csv.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "signal.hpp"

namespace earid {

namespace fs = std::filesystem;

enum class Cohort { R, N };

inline char cohort_char(Cohort c) { return c == Cohort::R ? 'R' : 'N'; }

struct ManifestEntry {
    std::string subject;
    Cohort cohort = Cohort::R;
    int day = 1;
    int trial = 1;
    double fs = 0.0;
    double duration_s = 0.0;
    std::string ch1_file;
    std::string ch2_file;

    std::size_t expected_samples() const { return static_cast<std::size_t>(std::llround(fs * duration_s)); }
};

// ---------------------------------------------------------------------------
// Raw float32 little-endian sample files

inline void write_f32le(const fs::path& path, const std::vector<double>& samples) {
    std::vector<char> bytes(samples.size() * 4);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(samples[i]));
        for (int b = 0; b < 4; ++b) bytes[i * 4 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

inline std::vector<double> read_f32le(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 4 != 0) throw Error(ErrorKind::SizeMismatch, path.string() + " is not a whole number of float32 samples");
    std::vector<double> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i * 4 + static_cast<std::size_t>(b)]) << (8 * b);
        out[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Manifest

inline const std::vector<std::string>& manifest_header() {
    static const std::vector<std::string> h{"subject", "cohort", "day", "trial", "fs", "duration_s", "ch1_file", "ch2_file"};
    return h;
}

/// A validated dataset: manifest entries plus on-demand recording access.
class Dataset {
public:
    Dataset() = default;
    Dataset(fs::path root, std::vector<ManifestEntry> entries) : root_(std::move(root)), entries_(std::move(entries)) {}

    const fs::path& root() const { return root_; }
    const std::vector<ManifestEntry>& entries() const { return entries_; }

    std::vector<std::string> subjects(Cohort cohort) const {
        std::set<std::string> ids;
        for (const auto& e : entries_)
            if (e.cohort == cohort) ids.insert(e.subject);
        return {ids.begin(), ids.end()};
    }

    const ManifestEntry* find(const std::string& subject, int day, int trial) const {
        for (const auto& e : entries_)
            if (e.subject == subject && e.day == day && e.trial == trial) return &e;
        return nullptr;
    }

    Recording load(const ManifestEntry& e) const {
        Recording rec;
        rec.subject = e.subject;
        rec.day = e.day;
        rec.trial = e.trial;
        rec.fs = e.fs;
        rec.channels[0] = read_f32le(root_ / e.ch1_file);
        rec.channels[1] = read_f32le(root_ / e.ch2_file);
        return rec;
    }

private:
    fs::path root_;
    std::vector<ManifestEntry> entries_;
};

inline void write_manifest(std::ostream& out, const std::vector<ManifestEntry>& entries) {
    const auto& h = manifest_header();
    for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
    out << '\n';
    for (const auto& e : entries)
        out << e.subject << ',' << cohort_char(e.cohort) << ',' << e.day << ',' << e.trial << ',' << csv::format(e.fs)
            << ',' << csv::format(e.duration_s) << ',' << e.ch1_file << ',' << e.ch2_file << '\n';
}

inline std::vector<ManifestEntry> parse_manifest(std::istream& in) {
    const csv::Table t = csv::read(in, "manifest.csv");
    csv::expect_header(t, manifest_header(), "manifest.csv");
    std::vector<ManifestEntry> out;
    for (const auto& r : t.rows) {
        ManifestEntry e;
        e.subject = std::string(csv::trim(r[0]));
        const auto cohort = csv::trim(r[1]);
        if (cohort == "R") e.cohort = Cohort::R;
        else if (cohort == "N") e.cohort = Cohort::N;
        else throw Error(ErrorKind::InvalidCohort, "unknown cohort '" + std::string(cohort) + "'");
        e.day = static_cast<int>(csv::to_int(r[2]));
        e.trial = static_cast<int>(csv::to_int(r[3]));
        e.fs = csv::to_double(r[4]);
        e.duration_s = csv::to_double(r[5]);
        e.ch1_file = std::string(csv::trim(r[6]));
        e.ch2_file = std::string(csv::trim(r[7]));
        out.push_back(std::move(e));
    }
    return out;
}

/// Structural checks: unique keys, complete day x trial grid for cohort R,
/// a single day for cohort N, positive rates and durations.
inline void validate_manifest(const std::vector<ManifestEntry>& entries) {
    std::set<std::tuple<std::string, int, int>> keys;
    std::map<std::string, Cohort> cohort_of;
    std::map<std::string, std::set<std::pair<int, int>>> grid;
    for (const auto& e : entries) {
        if (!(e.fs > 0.0) || !(e.duration_s > 0.0))
            throw Error(ErrorKind::InvalidArgument, e.subject + ": fs and duration must be positive");
        if (e.day < 1 || e.trial < 1) throw Error(ErrorKind::InvalidArgument, e.subject + ": day and trial are 1-based");
        if (!keys.insert({e.subject, e.day, e.trial}).second)
            throw Error(ErrorKind::DuplicateKey, "duplicate entry (" + e.subject + ", " + std::to_string(e.day) + ", " +
                                                     std::to_string(e.trial) + ")");
        auto [it, fresh] = cohort_of.emplace(e.subject, e.cohort);
        if (!fresh && it->second != e.cohort)
            throw Error(ErrorKind::InvalidCohort, e.subject + " appears in both cohorts");
        grid[e.subject].insert({e.day, e.trial});
    }

    std::set<std::pair<int, int>> r_grid;
    bool have_r = false;
    for (const auto& [subject, cells] : grid) {
        const Cohort c = cohort_of[subject];
        int max_day = 0, max_trial = 0;
        for (auto [d, t] : cells) {
            max_day = std::max(max_day, d);
            max_trial = std::max(max_trial, t);
        }
        if (static_cast<std::size_t>(max_day * max_trial) != cells.size())
            throw Error(ErrorKind::InvalidCohort, subject + " does not have a complete day x trial grid");
        if (c == Cohort::N && max_day != 1)
            throw Error(ErrorKind::InvalidCohort, subject + " (cohort N) must have a single recording day");
        if (c == Cohort::R) {
            if (!have_r) {
                r_grid = cells;
                have_r = true;
            } else if (cells != r_grid) {
                throw Error(ErrorKind::InvalidCohort, subject + " has a different day x trial grid from other R subjects");
            }
        }
    }
}

inline Dataset load_dataset(const fs::path& dir) {
    const fs::path manifest = dir / "manifest.csv";
    std::ifstream in(manifest);
    if (!in) throw Error(ErrorKind::MissingFile, "missing " + manifest.string());
    auto entries = parse_manifest(in);
    validate_manifest(entries);
    for (const auto& e : entries) {
        for (const auto& file : {e.ch1_file, e.ch2_file}) {
            const fs::path p = dir / file;
            std::error_code ec;
            const auto size = fs::file_size(p, ec);
            if (ec) throw Error(ErrorKind::MissingFile, "missing sample file " + p.string());
            const std::size_t expected = e.expected_samples() * 4;
            if (size != expected)
                throw Error(ErrorKind::SizeMismatch, p.string() + " has " + std::to_string(size) + " bytes, expected " +
                                                         std::to_string(expected));
        }
    }
    return Dataset(dir, std::move(entries));
}

// ---------------------------------------------------------------------------
// Synthetic generator

struct GeneratorConfig {
    int n_clients = 15;
    int n_imposters = 5;
    int days = 2;
    int trials = 3;
    double duration_s = 190.0;
    double fs = 250.0;
    std::uint64_t seed = 42;

    bool drift = true;
    double max_peak_shift_hz = 0.3;
    double min_gain_factor = 0.8;
    double max_gain_factor = 1.25;

    double artifact_rate = 0.03; // fraction of 2 s epochs hit by a transient
    double artifact_min_uv = 60.0;
    double artifact_max_uv = 120.0;

    double channel_mix = 0.7;
};

struct DayDrift {
    double peak_shift_hz = 0.0;
    double gain_factor = 1.0;
};

struct PolePair {
    double freq_hz = 0.0;
    double radius = 0.0;
};

struct SubjectProfile {
    std::string subject;
    Cohort cohort = Cohort::R;
    int index = 1;
    double alpha_peak_hz = 10.0;
    double alpha_bandwidth_hz = 1.0;
    double alpha_gain_uv = 5.0;
    std::vector<PolePair> background_poles; // five pairs -> AR(10)
    double background_uv = 6.0;
    double noise_floor_uv = 1.0;
    std::vector<DayDrift> drift; // index day-1; day 1 is the reference
};

inline std::string subject_id(Cohort cohort, int index, int count) {
    const int width = std::max(2, static_cast<int>(std::to_string(count).size()));
    std::string num = std::to_string(index);
    return std::string(1, cohort_char(cohort)) + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num;
}

/// Deterministic in (seed, cohort, index); independent of other subjects.
inline SubjectProfile make_profile(const GeneratorConfig& cfg, Cohort cohort, int index) {
    Rng rng(derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(cohort_char(cohort)), static_cast<std::uint64_t>(index)}));
    SubjectProfile p;
    p.cohort = cohort;
    p.index = index;
    p.subject = subject_id(cohort, index, cohort == Cohort::R ? cfg.n_clients : cfg.n_imposters);
    p.alpha_peak_hz = rng.uniform(8.5, 12.5);
    p.alpha_bandwidth_hz = rng.uniform(0.6, 1.6);
    p.alpha_gain_uv = rng.uniform(3.0, 8.0);
    p.background_poles = {
        {rng.uniform(0.5, 2.0), rng.uniform(0.95, 0.99)},
        {rng.uniform(2.0, 4.0), rng.uniform(0.90, 0.97)},
        {rng.uniform(4.5, 7.5), rng.uniform(0.88, 0.96)},
        {rng.uniform(15.0, 20.0), rng.uniform(0.85, 0.95)},
        {rng.uniform(20.0, 28.0), rng.uniform(0.85, 0.95)},
    };
    p.background_uv = rng.uniform(4.0, 7.0);
    p.noise_floor_uv = rng.uniform(0.5, 1.5);
    const int days = cohort == Cohort::R ? cfg.days : 1;
    p.drift.resize(static_cast<std::size_t>(days));
    for (int d = 1; d < days; ++d) {
        const double shift = rng.uniform(-cfg.max_peak_shift_hz, cfg.max_peak_shift_hz);
        const double gain = rng.uniform(cfg.min_gain_factor, cfg.max_gain_factor);
        if (cfg.drift) p.drift[static_cast<std::size_t>(d)] = DayDrift{shift, gain};
    }
    return p;
}

namespace detail {

// All-pole filter 1 / A(z) with A built from conjugate pole pairs.
inline std::vector<double> ar_polynomial(const std::vector<PolePair>& pairs, double fs) {
    std::vector<double> a{1.0};
    for (const auto& pp : pairs) {
        const double w = 2.0 * std::numbers::pi * pp.freq_hz / fs;
        const std::array<double, 3> q{1.0, -2.0 * pp.radius * std::cos(w), pp.radius * pp.radius};
        std::vector<double> next(a.size() + 2, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < 3; ++j) next[i + j] += a[i] * q[j];
        a = std::move(next);
    }
    return a;
}

inline void all_pole(const std::vector<double>& a, std::vector<double>& x) {
    const std::size_t p = a.size() - 1;
    for (std::size_t t = 0; t < x.size(); ++t) {
        double v = x[t];
        for (std::size_t k = 1; k <= p && k <= t; ++k) v -= a[k] * x[t - k];
        x[t] = v;
    }
}

// Gain that brings the filter's stationary output to unit variance.
inline double unit_variance_gain(const std::vector<double>& a) {
    std::vector<double> h(8192, 0.0);
    h[0] = 1.0;
    all_pole(a, h);
    double energy = 0.0;
    for (double v : h) energy += v * v;
    return 1.0 / std::sqrt(energy);
}

// One channel's worth of the subject process, without sensor noise.
inline std::vector<double> subject_process(const SubjectProfile& p, const DayDrift& drift, double fs, std::size_t n,
                                           std::size_t warmup, Rng& rng) {
    const auto bg_a = ar_polynomial(p.background_poles, fs);
    const double peak = p.alpha_peak_hz + drift.peak_shift_hz;
    const double radius = std::exp(-std::numbers::pi * p.alpha_bandwidth_hz / fs);
    const auto alpha_a = ar_polynomial({PolePair{peak, radius}}, fs);

    std::vector<double> bg(n + warmup), alpha(n + warmup);
    for (auto& v : bg) v = rng.normal();
    for (auto& v : alpha) v = rng.normal();
    all_pole(bg_a, bg);
    all_pole(alpha_a, alpha);
    const double bg_gain = p.background_uv * unit_variance_gain(bg_a);
    const double alpha_gain = p.alpha_gain_uv * drift.gain_factor * unit_variance_gain(alpha_a);

    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = bg_gain * bg[t + warmup] + alpha_gain * alpha[t + warmup];
    return out;
}

} // namespace detail

/// Synthesizes one trial. Ch1 is the subject process plus sensor noise; Ch2
/// mixes Ch1 with an independent realization of the same process.
inline Recording synthesize_trial(const GeneratorConfig& cfg, const SubjectProfile& p, int day, int trial) {
    Rng rng(derive_seed(cfg.seed, {2, static_cast<std::uint64_t>(cohort_char(p.cohort)),
                                   static_cast<std::uint64_t>(p.index), static_cast<std::uint64_t>(day),
                                   static_cast<std::uint64_t>(trial)}));
    const DayDrift drift = p.drift.at(static_cast<std::size_t>(day - 1));
    const std::size_t n = static_cast<std::size_t>(std::llround(cfg.duration_s * cfg.fs));
    const auto warmup = static_cast<std::size_t>(std::llround(4.0 * cfg.fs));

    Recording rec;
    rec.subject = p.subject;
    rec.day = day;
    rec.trial = trial;
    rec.fs = cfg.fs;

    auto ch1 = detail::subject_process(p, drift, cfg.fs, n, warmup, rng);
    auto other = detail::subject_process(p, drift, cfg.fs, n, warmup, rng);
    const double mix = cfg.channel_mix;
    const double rest = std::sqrt(std::max(0.0, 1.0 - mix * mix));
    std::vector<double> ch2(n);
    for (std::size_t t = 0; t < n; ++t) {
        ch1[t] += p.noise_floor_uv * rng.normal();
        ch2[t] = mix * ch1[t] + rest * other[t] + p.noise_floor_uv * rng.normal();
    }

    // transient artifacts: half-sine bumps on the raw 2 s grid
    const auto epoch = static_cast<std::size_t>(std::floor(kEpochSeconds * cfg.fs));
    for (std::size_t start = 0; epoch > 0 && start + epoch <= n; start += epoch) {
        if (rng.uniform() >= cfg.artifact_rate) continue;
        const double amp = rng.uniform(cfg.artifact_min_uv, cfg.artifact_max_uv) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        const auto width = static_cast<std::size_t>(std::llround(rng.uniform(0.2, 0.5) * cfg.fs));
        const auto offset = static_cast<std::size_t>(rng.below(epoch > width ? epoch - width : 1));
        const auto which = rng.below(3); // ch1, ch2 or both
        for (std::size_t i = 0; i < width && start + offset + i < n; ++i) {
            const double v = amp * std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(width));
            if (which != 1) ch1[start + offset + i] += v;
            if (which != 0) ch2[start + offset + i] += v;
        }
    }
    rec.channels[0] = std::move(ch1);
    rec.channels[1] = std::move(ch2);
    return rec;
}

inline std::vector<SubjectProfile> make_profiles(const GeneratorConfig& cfg) {
    std::vector<SubjectProfile> out;
    for (int i = 1; i <= cfg.n_clients; ++i) out.push_back(make_profile(cfg, Cohort::R, i));
    for (int i = 1; i <= cfg.n_imposters; ++i) out.push_back(make_profile(cfg, Cohort::N, i));
    return out;
}

inline void check_generator_config(const GeneratorConfig& cfg) {
    if (cfg.n_clients < 1 || cfg.n_imposters < 1 || cfg.days < 1 || cfg.trials < 1)
        throw Error(ErrorKind::InvalidArgument, "subject, day and trial counts must be >= 1");
    if (!(cfg.fs > 0.0) || !(cfg.duration_s > 0.0))
        throw Error(ErrorKind::InvalidArgument, "fs and duration must be positive");
    if (cfg.artifact_rate < 0.0 || cfg.artifact_rate > 1.0)
        throw Error(ErrorKind::InvalidArgument, "artifact rate must lie in [0, 1]");
}

/// Writes manifest.csv, profiles.csv and one .f32le file per channel.
inline Dataset generate_dataset(const GeneratorConfig& cfg, const fs::path& dir) {
    check_generator_config(cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());

    const auto profiles = make_profiles(cfg);
    struct Job {
        const SubjectProfile* profile;
        int day, trial;
    };
    std::vector<Job> jobs;
    std::vector<ManifestEntry> entries;
    for (const auto& p : profiles) {
        const int days = p.cohort == Cohort::R ? cfg.days : 1;
        for (int d = 1; d <= days; ++d)
            for (int t = 1; t <= cfg.trials; ++t) {
                jobs.push_back({&p, d, t});
                ManifestEntry e;
                e.subject = p.subject;
                e.cohort = p.cohort;
                e.day = d;
                e.trial = t;
                e.fs = cfg.fs;
                e.duration_s = cfg.duration_s;
                const std::string stem = p.subject + "_d" + std::to_string(d) + "_t" + std::to_string(t);
                e.ch1_file = stem + "_ch1.f32le";
                e.ch2_file = stem + "_ch2.f32le";
                entries.push_back(std::move(e));
            }
    }

    parallel_for(jobs.size(), [&](std::size_t i) {
        const Recording rec = synthesize_trial(cfg, *jobs[i].profile, jobs[i].day, jobs[i].trial);
        write_f32le(dir / entries[i].ch1_file, rec.channels[0]);
        write_f32le(dir / entries[i].ch2_file, rec.channels[1]);
    });

    {
        std::ofstream out(dir / "manifest.csv", std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write manifest in " + dir.string());
        write_manifest(out, entries);
    }
    {
        std::ofstream out(dir / "profiles.csv", std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write profiles in " + dir.string());
        out << "subject,cohort,alpha_peak_hz,alpha_bandwidth_hz,alpha_gain_uv,day,peak_shift_hz,gain_factor\n";
        for (const auto& p : profiles)
            for (std::size_t d = 0; d < p.drift.size(); ++d)
                out << p.subject << ',' << cohort_char(p.cohort) << ',' << csv::format(p.alpha_peak_hz) << ','
                    << csv::format(p.alpha_bandwidth_hz) << ',' << csv::format(p.alpha_gain_uv) << ',' << d + 1 << ','
                    << csv::format(p.drift[d].peak_shift_hz) << ',' << csv::format(p.drift[d].gain_factor) << '\n';
    }
    return Dataset(dir, std::move(entries));
}

/// FNV-1a over the manifest and every sample file, in manifest order.
inline std::uint64_t dataset_checksum(const Dataset& ds) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + p.string());
        char buf[1 << 14];
        while (in.read(buf, sizeof buf) || in.gcount() > 0) {
            for (std::streamsize i = 0; i < in.gcount(); ++i) {
                h ^= static_cast<unsigned char>(buf[i]);
                h *= 0x100000001b3ull;
            }
        }
    };
    feed(ds.root() / "manifest.csv");
    for (const auto& e : ds.entries()) {
        feed(ds.root() / e.ch1_file);
        feed(ds.root() / e.ch2_file);
    }
    return h;
}

} // namespace earid

#endif
