#include "spinzero/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace spinzero {

namespace {

void put(std::ostream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (char& b : bytes) {
        b = static_cast<char>(bits & 0xffu);
        bits >>= 8;
    }
    out.write(bytes, 8);
}

double get(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw std::runtime_error("field file: unexpected end of data");
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
    return std::bit_cast<double>(bits);
}

int get_int(std::istream& in, const char* what) {
    const double v = get(in);
    if (v != std::floor(v) || v < 0 || v > 1 << 20)
        throw std::runtime_error(std::string("field file: invalid ") + what);
    return static_cast<int>(v);
}

}  // namespace

nlohmann::json geometry_json(const TorusSpinGeometry& geom) {
    nlohmann::json lattice = nlohmann::json::array();
    for (int i = 0; i < geom.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < geom.dim(); ++j) row.push_back(geom.lattice()(i, j));
        lattice.push_back(row);
    }
    return {{"n", geom.dim()}, {"grid", geom.grid()}, {"delta", geom.delta()}, {"lattice", lattice}};
}

void write_field(const SpinorField& psi, const std::filesystem::path& path) {
    const auto& geom = *psi.geometry();
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("field file: cannot open " + path.string());
        put(out, geom.dim());
        for (int g : geom.grid()) put(out, g);
        for (double d : geom.delta()) put(out, d);
        for (int i = 0; i < geom.dim(); ++i)
            for (int j = 0; j < geom.dim(); ++j) put(out, geom.lattice()(i, j));
        for (Eigen::Index k = 0; k < psi.values().size(); ++k) {
            put(out, psi.values()(k).real());
            put(out, psi.values()(k).imag());
        }
        if (!out) throw std::runtime_error("field file: write failed for " + path.string());
    }
    auto meta = geometry_json(geom);
    meta["components"] = SpinorFiber::rank();
    meta["layout"] = "point-major, last axis fastest; per point: component 0 (re, im), component 1 (re, im)";
    meta["encoding"] = "float64 little-endian";
    std::ofstream side(path.string() + ".json");
    if (!side) throw std::runtime_error("field file: cannot open sidecar for " + path.string());
    side << meta.dump(2) << '\n';
}

SpinorField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("field file: cannot open " + path.string());
    const int n = get_int(in, "dimension");
    if (n != 2 && n != 3) throw std::runtime_error("field file: invalid dimension");
    std::vector<int> grid(static_cast<std::size_t>(n));
    for (int& g : grid) g = get_int(in, "grid count");
    std::vector<double> delta(static_cast<std::size_t>(n));
    for (double& d : delta) d = get(in);
    Eigen::MatrixXd lattice(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lattice(i, j) = get(in);
    GeometryPtr geom;
    try {
        geom = TorusSpinGeometry::make(lattice, delta, grid);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("field file: bad header: ") + e.what());
    }
    Eigen::VectorXcd values(static_cast<Eigen::Index>(2 * geom->num_points()));
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double re = get(in);
        values(k) = cplx{re, get(in)};
    }
    if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("field file: trailing data");
    return SpinorField(geom, std::move(values));
}

}  // namespace spinzero
