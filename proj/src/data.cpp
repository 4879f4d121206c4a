// Copyright 2026 The QFL-HEP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qfl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>

#include "qfl/error.hpp"
#include "qfl/random.hpp"

namespace qfl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                          s.front() == '"' || s.front() == '\'')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                          s.back() == '"' || s.back() == '\'')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void format_error(std::string_view source, std::size_t line,
                               const std::string &what) {
    throw FormatError(std::string(source) + ":" + std::to_string(line) + ": " +
                      what);
}

double parse_number(std::string_view field, std::string_view source,
                    std::size_t line, std::size_t column) {
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        format_error(source, line,
                     "column " + std::to_string(column + 1) +
                         " is not a number: '" + std::string(field) + "'");
    }
    if (!std::isfinite(v)) {
        format_error(source, line,
                     "column " + std::to_string(column + 1) + " is not finite");
    }
    return v;
}

struct ParsedRow {
    std::size_t line{0};
    int label{0};
    std::vector<double> values;
};

} // namespace

std::string_view to_string(FeatureSubset s) {
    return s == FeatureSubset::Full18 ? "full18" : "low7";
}

FeatureSubset parse_feature_subset(std::string_view s) {
    if (s == "full18") {
        return FeatureSubset::Full18;
    }
    if (s == "low7") {
        return FeatureSubset::Low7;
    }
    throw ConfigError("feature_subset must be full18 or low7, got '" +
                      std::string(s) + "'");
}

std::span<const std::string_view> subset_columns(FeatureSubset s) {
    if (s == FeatureSubset::Full18) {
        return kSusyColumns;
    }
    return kLow7Columns;
}

Dataset Dataset::take(std::span<const std::size_t> idx) const {
    Dataset out;
    out.feature_names = feature_names;
    out.features.reserve(idx.size() * num_features());
    out.labels.reserve(idx.size());
    for (std::size_t i : idx) {
        const auto r = row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(labels[i]);
    }
    return out;
}

Dataset parse_csv(std::istream &in, const CsvOptions &options,
                  std::string_view source) {
    Dataset data;
    const std::size_t width = options.feature_columns;
    std::string line;
    std::size_t line_no = 0;

    if (options.has_header) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!trim(line).empty()) {
                break;
            }
        }
        const auto names = split_fields(line);
        if (names.size() != width + 1) {
            format_error(source, line_no,
                         "header has " + std::to_string(names.size()) +
                             " columns, expected " + std::to_string(width + 1));
        }
        for (std::size_t c = 1; c < names.size(); ++c) {
            data.feature_names.emplace_back(names[c]);
        }
    } else {
        if (width != kSusyColumns.size()) {
            for (std::size_t c = 0; c < width; ++c) {
                data.feature_names.push_back("f" + std::to_string(c));
            }
        } else {
            data.feature_names.assign(kSusyColumns.begin(), kSusyColumns.end());
        }
    }

    auto parse_row = [&](std::string_view text, std::size_t at) {
        const auto fields = split_fields(text);
        if (fields.size() != width + 1) {
            format_error(source, at,
                         "expected " + std::to_string(width + 1) +
                             " columns (label + features), got " +
                             std::to_string(fields.size()));
        }
        ParsedRow r;
        r.line = at;
        const double label = parse_number(fields[0], source, at, 0);
        if (label != 0.0 && label != 1.0) {
            format_error(source, at, "label must be 0 or 1");
        }
        r.label = static_cast<int>(label);
        r.values.reserve(width);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            r.values.push_back(parse_number(fields[c], source, at, c));
        }
        return r;
    };

    const bool reservoir =
        options.sampling == Sampling::Random && options.max_rows > 0;
    Rng rng(derive_seed(options.sample_seed, {0x5a3e}));
    std::vector<ParsedRow> rows;
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (!reservoir) {
            rows.push_back(parse_row(line, line_no));
            if (options.max_rows > 0 && rows.size() == options.max_rows) {
                break;
            }
            continue;
        }
        // Algorithm R over the whole file; every row is still validated.
        ParsedRow r = parse_row(line, line_no);
        ++seen;
        if (rows.size() < options.max_rows) {
            rows.push_back(std::move(r));
        } else {
            const auto j = static_cast<std::size_t>(rng.below(seen));
            if (j < options.max_rows) {
                rows[j] = std::move(r);
            }
        }
    }
    if (reservoir) {
        std::sort(rows.begin(), rows.end(),
                  [](const ParsedRow &a, const ParsedRow &b) { return a.line < b.line; });
    }

    data.features.reserve(rows.size() * width);
    data.labels.reserve(rows.size());
    for (auto &r : rows) {
        data.features.insert(data.features.end(), r.values.begin(), r.values.end());
        data.labels.push_back(r.label);
    }
    return data;
}

Dataset load_csv(const std::filesystem::path &path, const CsvOptions &options) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open data file '" + path.string() + "'");
    }
    return parse_csv(in, options, path.string());
}

Dataset select_columns(const Dataset &data,
                       std::span<const std::string_view> names) {
    std::vector<std::size_t> cols;
    cols.reserve(names.size());
    for (auto name : names) {
        const auto it =
            std::find(data.feature_names.begin(), data.feature_names.end(), name);
        if (it == data.feature_names.end()) {
            throw ConfigError("unknown feature name '" + std::string(name) + "'");
        }
        cols.push_back(static_cast<std::size_t>(it - data.feature_names.begin()));
    }
    Dataset out;
    out.labels = data.labels;
    out.feature_names.assign(names.begin(), names.end());
    out.features.reserve(data.size() * cols.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto r = data.row(i);
        for (std::size_t c : cols) {
            out.features.push_back(r[c]);
        }
    }
    return out;
}

Dataset select_features(const Dataset &data, FeatureSubset subset) {
    return select_columns(data, subset_columns(subset));
}

std::pair<Dataset, Dataset> split(const Dataset &data, double ratio,
                                  std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ConfigError("split ratio must lie in (0, 1)");
    }
    Rng rng(derive_seed(seed, {0x5911}));
    const auto perm = rng.permutation(data.size());
    const auto n_train = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(data.size())));
    const std::span<const std::size_t> all(perm);
    return {data.take(all.first(n_train)), data.take(all.subspan(n_train))};
}

std::string_view to_string(NormMode m) {
    return m == NormMode::MinMax ? "minmax" : "zscore";
}

NormMode parse_norm_mode(std::string_view s) {
    if (s == "minmax") {
        return NormMode::MinMax;
    }
    if (s == "zscore") {
        return NormMode::ZScore;
    }
    throw ConfigError("normalization must be minmax or zscore, got '" +
                      std::string(s) + "'");
}

Normalization fit_normalization(const Dataset &train, NormMode mode) {
    if (train.size() == 0) {
        throw DataError("cannot fit normalization on an empty training split");
    }
    const std::size_t d = train.num_features();
    Normalization norm;
    norm.mode = mode;
    norm.feature_names = train.feature_names;
    norm.a.assign(d, 0.0);
    norm.b.assign(d, 0.0);
    const auto n = static_cast<double>(train.size());
    for (std::size_t c = 0; c < d; ++c) {
        if (mode == NormMode::MinMax) {
            double lo = train.row(0)[c];
            double hi = lo;
            for (std::size_t i = 1; i < train.size(); ++i) {
                lo = std::min(lo, train.row(i)[c]);
                hi = std::max(hi, train.row(i)[c]);
            }
            norm.a[c] = lo;
            norm.b[c] = hi;
            if (hi == lo) {
                norm.constant_features.push_back(c);
            }
        } else {
            double mean = 0.0;
            for (std::size_t i = 0; i < train.size(); ++i) {
                mean += train.row(i)[c];
            }
            mean /= n;
            double var = 0.0;
            for (std::size_t i = 0; i < train.size(); ++i) {
                const double dv = train.row(i)[c] - mean;
                var += dv * dv;
            }
            norm.a[c] = mean;
            norm.b[c] = std::sqrt(var / n);
            if (norm.b[c] == 0.0) {
                norm.constant_features.push_back(c);
            }
        }
    }
    for (std::size_t c : norm.constant_features) {
        std::cerr << "warning: feature '" << train.feature_names[c]
                  << "' is constant on the training split; mapped to 0\n";
    }
    return norm;
}

Dataset apply_normalization(const Dataset &data, const Normalization &norm) {
    if (norm.a.size() != data.num_features()) {
        throw ShapeError("normalization covers " + std::to_string(norm.a.size()) +
                         " features, data has " +
                         std::to_string(data.num_features()));
    }
    constexpr double pi = std::numbers::pi;
    Dataset out = data;
    const std::size_t d = data.num_features();
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            double &x = out.features[i * d + c];
            const double a = norm.a[c];
            const double b = norm.b[c];
            if (norm.mode == NormMode::MinMax) {
                x = b == a ? 0.0
                           : std::clamp(-pi + 2.0 * pi * (x - a) / (b - a), -pi, pi);
            } else {
                x = b == 0.0 ? 0.0 : (x - a) / b;
            }
        }
    }
    return out;
}

NormalizedSplit normalize_fit_transform(const Dataset &train, const Dataset &test,
                                        NormMode mode) {
    NormalizedSplit out;
    out.metadata = fit_normalization(train, mode);
    out.train = apply_normalization(train, out.metadata);
    out.test = apply_normalization(test, out.metadata);
    return out;
}

std::vector<LabeledSequence> make_sequences(const Dataset &data,
                                            std::size_t window) {
    if (window < 1) {
        throw ConfigError("sequence window must be at least 1");
    }
    if (window > data.size()) {
        throw ConfigError("sequence window " + std::to_string(window) +
                          " exceeds dataset size " + std::to_string(data.size()));
    }
    std::vector<LabeledSequence> out;
    out.reserve(data.size() - window + 1);
    for (std::size_t end = window - 1; end < data.size(); ++end) {
        LabeledSequence s;
        s.label = data.labels[end];
        s.steps.reserve(window);
        for (std::size_t i = end + 1 - window; i <= end; ++i) {
            const auto r = data.row(i);
            s.steps.emplace_back(r.begin(), r.end());
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string fingerprint(const Dataset &data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const void *p, std::size_t n) {
        const auto *bytes = static_cast<const unsigned char *>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto &name : data.feature_names) {
        feed(name.data(), name.size());
    }
    feed(data.labels.data(), data.labels.size() * sizeof(int));
    feed(data.features.data(), data.features.size() * sizeof(double));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace qfl
