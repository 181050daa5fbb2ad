// Copyright 2026 The earid Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EARID_CLASSIFIERS_HPP
#define EARID_CLASSIFIERS_HPP

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "classifiers/cosine.hpp"
#include "classifiers/lda.hpp"
#include "classifiers/svm.hpp"
#include "classifiers/tuning.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "matrix.hpp"

namespace earid {

enum class ClassifierKind { Cosine, Lda, Svm };

inline std::string to_string(ClassifierKind k) {
    switch (k) {
    case ClassifierKind::Cosine: return "cos";
    case ClassifierKind::Lda: return "lda";
    case ClassifierKind::Svm: return "svm";
    }
    return "?";
}

inline ClassifierKind parse_classifier(std::string_view s) {
    if (s == "cos" || s == "cosine") return ClassifierKind::Cosine;
    if (s == "lda") return ClassifierKind::Lda;
    if (s == "svm") return ClassifierKind::Svm;
    throw Error(ErrorKind::Parse, "unknown classifier '" + std::string(s) + "'");
}

using TrainedClassifier = std::variant<CosineTemplate<int>, LdaModel, SvmModel>;

struct TrainOptions {
    double lda_shrinkage = kDefaultLdaShrinkage;
    SvmOptions svm;
    SvmGrid grid;
    std::size_t folds = 5;
    std::uint64_t seed = 0; // SVM fold assignment
};

/// Common entry point: labels are +1 (client) / -1 (imposter). The SVM is
/// tuned by stratified cross-validation inside the training rows, then
/// refit on all of them.
inline TrainedClassifier train_classifier(ClassifierKind kind, const Matrix& x, std::span<const int> y,
                                          const TrainOptions& opt = {}) {
    switch (kind) {
    case ClassifierKind::Cosine:
        return make_cosine_template(x, std::vector<int>(y.begin(), y.end()));
    case ClassifierKind::Lda:
        return lda_train(x, y, opt.lda_shrinkage);
    case ClassifierKind::Svm: {
        const TuningResult t = tune_svm(x, y, opt.svm, opt.seed, opt.grid, opt.folds);
        return svm_train(x, y, t.best, opt.svm);
    }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown classifier");
}

inline int predict(const TrainedClassifier& model, std::span<const double> v) {
    struct Visitor {
        std::span<const double> v;
        int operator()(const CosineTemplate<int>& t) const { return cosine_nn_predict(t, v); }
        int operator()(const LdaModel& m) const { return lda_predict(m, v); }
        int operator()(const SvmModel& m) const { return svm_predict(m, v); }
    };
    return std::visit(Visitor{v}, model);
}

/// Flat audit dump: `key,value` header lines, then one line per stored row.
inline void write_model(std::ostream& out, const TrainedClassifier& model) {
    if (const auto* t = std::get_if<CosineTemplate<int>>(&model)) {
        out << "kind,cos\nrows," << t->rows.rows() << "\nlabel,values...\n";
        for (std::size_t r = 0; r < t->rows.rows(); ++r) {
            out << t->labels[r];
            for (double v : t->rows.row(r)) out << ',' << csv::format(v);
            out << '\n';
        }
    } else if (const auto* m = std::get_if<LdaModel>(&model)) {
        out << "kind,lda\nshrinkage," << csv::format(m->shrinkage) << "\nbias," << csv::format(m->bias) << "\nweights";
        for (double w : m->weights) out << ',' << csv::format(w);
        out << '\n';
    } else if (const auto* s = std::get_if<SvmModel>(&model)) {
        out << "kind,svm\nkernel," << to_string(s->hyper.kernel) << "\nC," << csv::format(s->hyper.C) << "\ngamma,"
            << csv::format(s->hyper.gamma) << "\ndegree," << s->hyper.degree << "\ncoef0," << csv::format(s->hyper.coef0)
            << "\nclient_weight," << csv::format(s->client_weight) << "\nrho," << csv::format(s->rho)
            << "\nsupport_vectors," << s->coef.size() << "\ncoef,values...\n";
        for (std::size_t i = 0; i < s->coef.size(); ++i) {
            out << csv::format(s->coef[i]);
            for (double v : s->support.row(i)) out << ',' << csv::format(v);
            out << '\n';
        }
    }
}

} // namespace earid

#endif
