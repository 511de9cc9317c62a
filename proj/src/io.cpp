#include "tubalkit/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tubalkit {

namespace {

constexpr std::array<char, 6> kMagic{'T', 'T', 'E', 'N', '1', '\0'};

template <typename T>
void put_le(std::ostream& out, T v) {
    static_assert(std::endian::native == std::endian::little, "big-endian hosts not supported");
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("truncated tensor file");
    return v;
}

DenseTensor read_binary(std::istream& in) {
    std::array<char, 6> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw IoError("bad tensor magic");
    auto order = get_le<std::uint32_t>(in);
    if (order < 3 || order > 64) throw IoError("unsupported tensor order " + std::to_string(order));
    Dims dims(order);
    std::size_t total = 1;
    for (auto& d : dims) {
        d = static_cast<std::size_t>(get_le<std::uint64_t>(in));
        total *= d;
    }
    std::vector<double> data(total);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(total * sizeof(double)));
    if (!in) throw IoError("truncated tensor data");
    return DenseTensor(dims, std::move(data));
}

DenseTensor read_text(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty tensor file");
    std::istringstream head(line);
    std::string tag;
    head >> tag;
    if (tag != "dims:") throw IoError("text tensor must start with 'dims:'");
    Dims dims;
    std::size_t d;
    while (head >> d) dims.push_back(d);
    std::size_t total = 1;
    for (auto v : dims) total *= v;
    std::vector<double> data;
    data.reserve(total);
    double v;
    while (in >> v) data.push_back(v);
    if (!in.eof()) throw IoError("unparseable value in text tensor");
    if (data.size() != total) {
        throw IoError("text tensor has " + std::to_string(data.size()) + " values, expected " + std::to_string(total));
    }
    return DenseTensor(dims, std::move(data));
}

}  // namespace

void write_tensor(std::ostream& out, const DenseTensor& x) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(x.order()));
    for (auto d : x.dims()) put_le<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(x.data()), static_cast<std::streamsize>(x.size() * sizeof(double)));
    if (!out) throw IoError("failed to write tensor");
}

void write_tensor(const std::string& path, const DenseTensor& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_tensor(out, x);
}

void write_tensor_text(std::ostream& out, const DenseTensor& x) {
    out << "dims:";
    for (auto d : x.dims()) out << ' ' << d;
    out << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << (i + 1 == x.size() ? '\n' : ' ');
}

void write_tensor_text(const std::string& path, const DenseTensor& x) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_tensor_text(out, x);
}

DenseTensor read_tensor(std::istream& in) {
    char first = static_cast<char>(in.peek());
    if (first == 'T') return read_binary(in);
    return read_text(in);
}

DenseTensor read_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return read_tensor(in);
}

}  // namespace tubalkit
