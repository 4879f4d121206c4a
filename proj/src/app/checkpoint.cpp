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
#include "qfl/app/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qfl/error.hpp"

namespace qfl::app {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'Q', 'F', 'L', 'C', 'K', 'P', 'T', '1'};

template <class T>
void put(std::string &out, const T &v) {
    out.append(reinterpret_cast<const char *>(&v), sizeof v);
}

class Reader {
public:
    Reader(std::string_view bytes, std::string source)
        : bytes_(bytes), source_(std::move(source)) {}

    template <class T>
    T get(const char *what) {
        T v{};
        std::memcpy(&v, take(sizeof v, what).data(), sizeof v);
        return v;
    }

    std::string_view take(std::size_t n, const char *what) {
        if (bytes_.size() - pos_ < n) {
            throw FormatError(source_ + ": truncated checkpoint while reading " + what);
        }
        const auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    [[nodiscard]] bool done() const { return pos_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::string source_;
    std::size_t pos_{0};
};

std::uint32_t kind_tag(ModelKind k) { return static_cast<std::uint32_t>(k); }

std::uint64_t hash_value(const RunConfig &c) {
    return std::stoull(config_hash(c), nullptr, 16);
}

} // namespace

void write_file_atomic(const std::filesystem::path &path, std::string_view bytes) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write '" + tmp.string() + "'");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            throw IoError("short write to '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() +
                      "': " + ec.message());
    }
}

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
    nlohmann::json header;
    header["config"] = to_text(ckpt.config);
    header["feature_names"] = ckpt.feature_names;
    header["dataset_fingerprint"] = ckpt.dataset_fingerprint;
    header["normalization"] = {{"mode", to_string(ckpt.normalization.mode)},
                               {"a", ckpt.normalization.a},
                               {"b", ckpt.normalization.b},
                               {"constant_features", ckpt.normalization.constant_features}};
    const std::string text = header.dump();
    const std::vector<double> params = get_params(ckpt.model);

    std::string out(kMagic, sizeof kMagic);
    put(out, kCheckpointVersion);
    put(out, kind_tag(kind_of(ckpt.model)));
    put(out, hash_value(ckpt.config));
    put(out, static_cast<std::uint64_t>(text.size()));
    out += text;
    put(out, static_cast<std::uint64_t>(params.size()));
    out.append(reinterpret_cast<const char *>(params.data()),
               params.size() * sizeof(double));
    write_file_atomic(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    const std::string src = path.string();
    Reader r(bytes, src);

    if (r.take(sizeof kMagic, "magic") != std::string_view(kMagic, sizeof kMagic)) {
        throw FormatError(src + ": not a checkpoint file");
    }
    const auto version = r.get<std::uint32_t>("version");
    if (version != kCheckpointVersion) {
        throw FormatError(src + ": unsupported checkpoint version " +
                          std::to_string(version));
    }
    const auto kind = r.get<std::uint32_t>("model kind");
    const auto hash = r.get<std::uint64_t>("config hash");
    const auto header_len = r.get<std::uint64_t>("header length");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(r.take(header_len, "header"));
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(src + ": malformed checkpoint header: " + e.what());
    }

    Checkpoint ck;
    try {
        ck.config = parse_config(header.at("config").get<std::string>(), src);
        ck.feature_names = header.at("feature_names").get<std::vector<std::string>>();
        ck.dataset_fingerprint = header.at("dataset_fingerprint").get<std::string>();
        const auto &n = header.at("normalization");
        ck.normalization.mode = parse_norm_mode(n.at("mode").get<std::string>());
        ck.normalization.feature_names = ck.feature_names;
        ck.normalization.a = n.at("a").get<std::vector<double>>();
        ck.normalization.b = n.at("b").get<std::vector<double>>();
        ck.normalization.constant_features =
            n.at("constant_features").get<std::vector<std::size_t>>();
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(src + ": incomplete checkpoint header: " + e.what());
    }
    if (hash_value(ck.config) != hash) {
        throw FormatError(src + ": config hash does not match the stored config");
    }
    if (kind != kind_tag(ck.config.model_kind)) {
        throw FormatError(src + ": model kind tag disagrees with the stored config");
    }

    const auto count = r.get<std::uint64_t>("parameter count");
    ck.model = make_zero_model(ck.config.model_config());
    if (count != param_count(ck.model)) {
        throw FormatError(src + ": checkpoint holds " + std::to_string(count) +
                          " parameters, config implies " +
                          std::to_string(param_count(ck.model)));
    }
    std::vector<double> params(count);
    const auto raw = r.take(count * sizeof(double), "parameters");
    std::memcpy(params.data(), raw.data(), raw.size());
    if (!r.done()) {
        throw FormatError(src + ": trailing bytes after parameters");
    }
    set_params(ck.model, params);
    return ck;
}

} // namespace qfl::app
