#include "imblab/dataset_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace imblab {
namespace {

constexpr char kMagic[4] = {'I', 'M', 'B', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ostream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
#endif
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!is) throw std::runtime_error("dataset binary: truncated stream");
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_BIG_ENDIAN__
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
#endif
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_dataset_csv(std::ostream& os, const Dataset& ds, const std::string& comment) {
    if (ds.adjacency)
        throw std::invalid_argument("write_dataset_csv: graphs require the binary format");
    const std::size_t d = ds.dim();
    os << "# imblab csv v1 dataset n=" << ds.size() << " d=" << d << " C=" << ds.num_classes()
       << "\n";
    if (!comment.empty()) os << "# " << comment << "\n";
    for (std::size_t j = 0; j < d; ++j) os << "x" << j << ",";
    os << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto row = ds.features.row(i);
        for (std::size_t j = 0; j < d; ++j) os << format_double(row[j]) << ",";
        os << ds.labels[i] << "\n";
    }
}

Dataset read_dataset_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    bool header_skipped = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_skipped && line.find("label") != std::string::npos) {
            header_skipped = true;
            continue;
        }
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.empty()) continue;
        labels.push_back(static_cast<int>(vals.back()));
        vals.pop_back();
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error("dataset csv: no data rows");
    const std::size_t d = rows[0].size();
    Dataset ds;
    ds.features = DenseMatrix(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw std::runtime_error("dataset csv: ragged rows");
        for (std::size_t j = 0; j < d; ++j) ds.features(i, j) = rows[i][j];
    }
    ds.labels = std::move(labels);
    ds.validate();
    return ds;
}

void write_dataset_binary(std::ostream& os, const Dataset& ds) {
    os.write(kMagic, 4);
    write_le<std::uint32_t>(os, kVersion);
    write_le<std::uint64_t>(os, ds.size());
    write_le<std::uint64_t>(os, ds.dim());
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ds.num_classes()));
    write_le<std::uint8_t>(os, ds.adjacency ? 1 : 0);
    if (ds.adjacency) write_le<std::uint64_t>(os, ds.adjacency->size());
    for (double v : ds.features.data()) write_le<double>(os, v);
    for (int l : ds.labels) write_le<std::int32_t>(os, l);
    if (ds.adjacency)
        for (const auto& [a, b] : *ds.adjacency) {
            write_le<std::int32_t>(os, a);
            write_le<std::int32_t>(os, b);
        }
}

Dataset read_dataset_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("dataset binary: bad magic");
    if (read_le<std::uint32_t>(is) != kVersion)
        throw std::runtime_error("dataset binary: unsupported version");
    const auto n = read_le<std::uint64_t>(is);
    const auto d = read_le<std::uint64_t>(is);
    read_le<std::uint32_t>(is);  // class count, informational
    const bool has_adj = read_le<std::uint8_t>(is) != 0;
    std::uint64_t edge_count = has_adj ? read_le<std::uint64_t>(is) : 0;

    Dataset ds;
    ds.features = DenseMatrix(n, d);
    for (double& v : ds.features.data()) v = read_le<double>(is);
    ds.labels.resize(n);
    for (int& l : ds.labels) l = read_le<std::int32_t>(is);
    if (has_adj) {
        std::vector<Edge> edges(edge_count);
        for (auto& [a, b] : edges) {
            a = read_le<std::int32_t>(is);
            b = read_le<std::int32_t>(is);
        }
        ds.adjacency = std::move(edges);
    }
    ds.validate();
    return ds;
}

namespace {
bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

void save_dataset(const std::string& path, const Dataset& ds, const std::string& comment) {
    if (ends_with(path, ".csv")) {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("save_dataset: cannot open " + path);
        write_dataset_csv(os, ds, comment);
    } else {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("save_dataset: cannot open " + path);
        write_dataset_binary(os, ds);
    }
}

Dataset load_dataset(const std::string& path) {
    if (ends_with(path, ".csv")) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("load_dataset: cannot open " + path);
        return read_dataset_csv(is);
    }
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_dataset: cannot open " + path);
    return read_dataset_binary(is);
}

}  // namespace imblab
