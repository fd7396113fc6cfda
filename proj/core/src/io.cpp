#include "dknn/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dknn {
namespace {

std::int64_t parse_int(std::string_view field, const char* what) {
    std::int64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::invalid_argument(std::string("dataset: bad ") + what +
                                    " field '" + std::string(field) + "'");
    return value;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& ds) {
    out << "id,label";
    for (std::size_t i = 0; i < ds.dim; ++i) out << ",c" << i;
    out << '\n';
    for (const Point& p : ds.points) {
        out << p.id << ',';
        if (p.label) out << *p.label;
        for (std::int64_t c : p.coords) out << ',' << c;
        out << '\n';
    }
}

void write_dataset_file(const std::string& path, const Dataset& ds) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_dataset(f, ds);
    if (!f) throw std::runtime_error("write failed: " + path);
}

Dataset read_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("dataset: missing header");
    std::size_t dim = 0;
    {
        std::stringstream hs(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        if (cols.size() < 2 || cols[0] != "id" || cols[1] != "label")
            throw std::invalid_argument("dataset: bad header '" + line + "'");
        dim = cols.size() - 2;
    }
    Dataset ds;
    ds.dim = dim;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string field;
        Point p;
        if (!std::getline(ls, field, ','))
            throw std::invalid_argument("dataset: short row '" + line + "'");
        p.id = static_cast<std::uint64_t>(parse_int(field, "id"));
        if (!std::getline(ls, field, ','))
            throw std::invalid_argument("dataset: short row '" + line + "'");
        if (!field.empty()) p.label = parse_int(field, "label");
        while (std::getline(ls, field, ','))
            p.coords.push_back(parse_int(field, "coordinate"));
        if (p.coords.size() != dim)
            throw std::invalid_argument("dataset: row dimension mismatch");
        ds.points.push_back(std::move(p));
    }
    return ds;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open dataset: " + path);
    return read_dataset(f);
}

Distribution distribution_from_string(const std::string& s) {
    if (s == "uniform") return Distribution::Uniform;
    if (s == "clustered") return Distribution::Clustered;
    if (s == "geometric") return Distribution::Geometric;
    throw std::invalid_argument("unknown distribution: " + s);
}

Dataset generate_dataset(std::uint64_t n, std::size_t d, int k,
                         std::uint64_t seed, Distribution dist,
                         std::uint64_t labels) {
    if (d < 1 || d > kMaxDim)
        throw std::invalid_argument("generate: dimension out of range");
    if (n > kMaxPoints) throw std::invalid_argument("generate: n too large");
    if (k < 1) throw std::invalid_argument("generate: k must be >= 1");

    const std::uint64_t range = std::uint64_t{1} << 30;
    Rng rng(seed, 0x6e6, 0);

    // Cluster centers for the clustered distribution.
    std::vector<std::vector<std::int64_t>> centers;
    if (dist == Distribution::Clustered) {
        for (int c = 0; c < 10; ++c) {
            auto& center = centers.emplace_back();
            for (std::size_t j = 0; j < d; ++j)
                center.push_back(static_cast<std::int64_t>(rng.below(range)));
        }
    }

    Dataset ds;
    ds.dim = d;
    ds.points.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Point p;
        const std::uint64_t machine = i % static_cast<std::uint64_t>(k);
        p.id = (machine << 32) | (i / static_cast<std::uint64_t>(k));
        p.coords.reserve(d);
        switch (dist) {
            case Distribution::Uniform:
                for (std::size_t j = 0; j < d; ++j)
                    p.coords.push_back(static_cast<std::int64_t>(rng.below(range)));
                break;
            case Distribution::Clustered: {
                const auto& center = centers[rng.below(centers.size())];
                for (std::size_t j = 0; j < d; ++j) {
                    const std::int64_t off =
                        static_cast<std::int64_t>(rng.below(2048)) - 1024;
                    std::int64_t v = center[j] + off;
                    v = std::max<std::int64_t>(0, std::min<std::int64_t>(v, range - 1));
                    p.coords.push_back(v);
                }
                break;
            }
            case Distribution::Geometric:
                for (std::size_t j = 0; j < d; ++j) {
                    const std::uint64_t exp = rng.below(30);
                    p.coords.push_back(
                        static_cast<std::int64_t>(rng.below(std::uint64_t{1} << exp) +
                                                  (std::uint64_t{1} << exp) - 1));
                }
                break;
        }
        if (labels > 0) p.label = static_cast<std::int64_t>(rng.below(labels));
        ds.points.push_back(std::move(p));
    }
    return ds;
}

Point random_query(std::size_t d, std::uint64_t seed, std::uint64_t trial) {
    Rng rng(seed, 0x9e3, trial);
    Point q;
    q.id = ~std::uint64_t{0};
    for (std::size_t j = 0; j < d; ++j)
        q.coords.push_back(static_cast<std::int64_t>(rng.below(std::uint64_t{1} << 30)));
    return q;
}

}  // namespace dknn
