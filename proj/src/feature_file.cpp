#include "greid/feature_file.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "greid/error.hpp"

namespace greid {

namespace {

using nlohmann::json;

constexpr std::array<char, 4> kMagic{'G', 'R', 'F', 'B'};

void put_u32(std::ostream& os, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(b.data(), 4);
}

void put_f32(std::ostream& os, double v) { put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

std::uint32_t get_u32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 4)) {
        throw Error("invalid-features", "truncated binary feature file");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

Vector get_f32s(std::istream& is, std::size_t n) {
    Vector v(n);
    for (auto& x : v) x = static_cast<double>(std::bit_cast<float>(get_u32(is)));
    return v;
}

void check_dim(const Vector& v, std::size_t dim, const std::string& id) {
    if (v.size() != dim) {
        throw Error("inconsistent-feature-dim", "image '" + id + "' has a vector of dimension " +
                                                    std::to_string(v.size()) + ", expected " +
                                                    std::to_string(dim));
    }
}

FeatureFile read_binary(std::istream& is) {
    FeatureFile f;
    f.version = static_cast<int>(get_u32(is));
    f.dim = get_u32(is);
    const std::size_t edge_dim = get_u32(is);
    const std::uint32_t count = get_u32(is);
    for (std::uint32_t r = 0; r < count; ++r) {
        const std::uint32_t len = get_u32(is);
        std::string id(len, '\0');
        if (!is.read(id.data(), len)) throw Error("invalid-features", "truncated binary feature file");
        const std::uint32_t n = get_u32(is);
        FeatureRecord rec;
        rec.global = get_f32s(is, f.dim);
        for (std::uint32_t i = 0; i < n; ++i) rec.persons.push_back(get_f32s(is, f.dim));
        if (edge_dim > 0) {
            rec.edges.emplace();
            for (int e = 0; e < pair_count(static_cast<int>(n)); ++e) rec.edges->push_back(get_f32s(is, edge_dim));
        }
        f.records.emplace(std::move(id), std::move(rec));
    }
    return f;
}

FeatureFile read_text(std::istream& is) {
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::exception& e) {
        throw Error("invalid-features", std::string("feature file is not valid JSON: ") + e.what());
    }
    try {
        FeatureFile f;
        f.version = doc.at("version").get<int>();
        f.dim = doc.at("dim").get<std::size_t>();
        for (const auto& [id, rec] : doc.at("images").items()) {
            FeatureRecord r;
            r.global = rec.at("global").get<Vector>();
            r.persons = rec.at("persons").get<std::vector<Vector>>();
            if (rec.contains("edges")) r.edges = rec.at("edges").get<std::vector<Vector>>();
            check_dim(r.global, f.dim, id);
            for (const auto& v : r.persons) check_dim(v, f.dim, id);
            f.records.emplace(id, std::move(r));
        }
        return f;
    } catch (const json::exception& e) {
        throw Error("invalid-features", std::string("feature file schema: ") + e.what());
    }
}

}  // namespace

FeatureFileFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".bin" ? FeatureFileFormat::binary : FeatureFileFormat::text;
}

FeatureFile read_feature_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("missing-file", "cannot open feature file " + path.string(), ErrorKind::runtime);
    std::array<char, 4> head{};
    is.read(head.data(), 4);
    if (is.gcount() == 4 && head == kMagic) return read_binary(is);
    is.clear();
    is.seekg(0);
    return read_text(is);
}

void write_feature_file(const FeatureFile& file, const std::filesystem::path& path, FeatureFileFormat format) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("unwritable-path", "cannot write " + path.string(), ErrorKind::runtime);
    if (format == FeatureFileFormat::text) {
        json images = json::object();
        for (const auto& [id, rec] : file.records) {
            json r{{"global", rec.global}, {"persons", rec.persons}};
            if (rec.edges) r["edges"] = *rec.edges;
            images[id] = std::move(r);
        }
        os << json{{"version", file.version}, {"dim", file.dim}, {"images", std::move(images)}}.dump() << '\n';
        return;
    }
    std::size_t edge_dim = 0;
    for (const auto& [id, rec] : file.records) {
        if (rec.edges && !rec.edges->empty()) edge_dim = rec.edges->front().size();
    }
    os.write(kMagic.data(), 4);
    put_u32(os, static_cast<std::uint32_t>(file.version));
    put_u32(os, static_cast<std::uint32_t>(file.dim));
    put_u32(os, static_cast<std::uint32_t>(edge_dim));
    put_u32(os, static_cast<std::uint32_t>(file.records.size()));
    for (const auto& [id, rec] : file.records) {
        put_u32(os, static_cast<std::uint32_t>(id.size()));
        os.write(id.data(), static_cast<std::streamsize>(id.size()));
        put_u32(os, static_cast<std::uint32_t>(rec.persons.size()));
        check_dim(rec.global, file.dim, id);
        for (double v : rec.global) put_f32(os, v);
        for (const auto& p : rec.persons) {
            check_dim(p, file.dim, id);
            for (double v : p) put_f32(os, v);
        }
        if (edge_dim > 0) {
            if (!rec.edges) throw Error("invalid-features", "image '" + id + "' lacks edge vectors");
            for (const auto& e : *rec.edges) {
                check_dim(e, edge_dim, id);
                for (double v : e) put_f32(os, v);
            }
        }
    }
    if (!os) throw Error("unwritable-path", "failed writing " + path.string(), ErrorKind::runtime);
}

std::vector<FeatureBundle> load_external_features(const FeatureFile& file,
                                                  std::span<const GroupObservation> observations,
                                                  const SpatialHistogramConfig& cfg) {
    std::vector<FeatureBundle> out;
    out.reserve(observations.size());
    std::optional<std::size_t> edge_dim;
    for (const auto& obs : observations) {
        const auto it = file.records.find(obs.image_id);
        if (it == file.records.end()) {
            throw Error("missing-features", "no features for image '" + obs.image_id + "'");
        }
        const FeatureRecord& rec = it->second;
        check_dim(rec.global, file.dim, obs.image_id);
        for (const auto& p : rec.persons) check_dim(p, file.dim, obs.image_id);
        if (rec.edges) {
            for (const auto& e : *rec.edges) {
                if (!edge_dim) edge_dim = e.size();
                check_dim(e, *edge_dim, obs.image_id);
            }
        }
        out.push_back(assemble_bundle(obs, rec.persons, rec.global, rec.edges, cfg));
    }
    return out;
}

}  // namespace greid
