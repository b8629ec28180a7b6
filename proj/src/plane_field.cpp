#include "heis/plane_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>

namespace heis {

namespace {

constexpr int kStencil = 6;

// Lagrange weights for the nodes 0..5 at fractional position s.
std::array<double, kStencil> lagrange6(double s) {
    std::array<double, kStencil> w{};
    for (int j = 0; j < kStencil; ++j) {
        double num = 1.0;
        double den = 1.0;
        for (int m = 0; m < kStencil; ++m) {
            if (m == j) continue;
            num *= s - m;
            den *= j - m;
        }
        w[j] = num / den;
    }
    return w;
}

}  // namespace

PlaneField PlaneField::zeros(double S, int N) {
    if (!(S > 0.0) || N < 8) throw std::invalid_argument("PlaneField: need S > 0 and N >= 8");
    PlaneField f;
    f.S = S;
    f.N = N;
    f.h = 2.0 * S / N;
    f.values.assign(static_cast<std::size_t>(N) * N, cplx{});
    return f;
}

double PlaneField::norm_sq() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s * h * h;
}

double PlaneField::l1_norm() const {
    double s = 0.0;
    for (const auto& v : values) s += std::abs(v);
    return s * h * h;
}

double PlaneField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

cplx PlaneField::sample(double x, double y) const {
    const double u = (x + S) / h;
    const double v = (y + S) / h;
    if (u < 0.0 || v < 0.0 || u > N - 1 || v > N - 1) return {};
    auto base = [&](double c) {
        int b = static_cast<int>(std::floor(c)) - 2;
        return std::clamp(b, 0, N - kStencil);
    };
    const int bi = base(u);
    const int bj = base(v);
    const auto wx = lagrange6(u - bi);
    const auto wy = lagrange6(v - bj);
    cplx acc{};
    for (int b = 0; b < kStencil; ++b) {
        cplx row{};
        for (int a = 0; a < kStencil; ++a) row += wx[a] * at(bi + a, bj + b);
        acc += wy[b] * row;
    }
    return acc;
}

double PlaneField::boundary_fraction(int ring) const {
    double edge = 0.0;
    double total = 0.0;
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const double e = std::norm(at(i, j));
            total += e;
            if (i < ring || j < ring || i >= N - ring || j >= N - ring) edge += e;
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

bool PlaneField::same_grid(const PlaneField& other) const {
    return N == other.N && std::abs(S - other.S) <= 1e-12 * S;
}

void PlaneField::validate() const {
    if (!(S > 0.0) || N < 8) throw std::invalid_argument("PlaneField: need S > 0 and N >= 8");
    if (std::abs(h - 2.0 * S / N) > 1e-12 * h)
        throw std::invalid_argument("PlaneField: spacing inconsistent with S and N");
    if (values.size() != static_cast<std::size_t>(N) * N)
        throw std::invalid_argument("PlaneField: sample count does not match N*N");
    if (!std::isfinite(norm_sq())) throw std::invalid_argument("PlaneField: non-finite samples");
}

PlaneField& PlaneField::operator+=(const PlaneField& other) {
    if (!same_grid(other)) throw std::invalid_argument("PlaneField: grid mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    return *this;
}

PlaneField& PlaneField::operator*=(cplx s) {
    for (auto& v : values) v *= s;
    return *this;
}

PlaneField operator+(PlaneField a, const PlaneField& b) { return a += b; }

PlaneField operator-(PlaneField a, const PlaneField& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("PlaneField: grid mismatch");
    for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] -= b.values[i];
    return a;
}

PlaneField operator*(cplx s, PlaneField a) { return a *= s; }

double relative_l2(const PlaneField& a, const PlaneField& b) {
    const double den = b.norm_sq();
    if (den == 0.0) return std::sqrt((a - b).norm_sq());
    return std::sqrt((a - b).norm_sq() / den);
}

void write_plane_field(const PlaneField& f, const std::filesystem::path& path) {
    f.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write("HPF1", 4);
    const std::int64_t n = f.N;
    out.write(reinterpret_cast<const char*>(&f.S), sizeof(double));
    out.write(reinterpret_cast<const char*>(&f.h), sizeof(double));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
}

PlaneField read_plane_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "HPF1", 4) != 0)
        throw std::runtime_error(path.string() + ": not a plane-field file");
    PlaneField f;
    std::int64_t nx = 0, ny = 0;
    in.read(reinterpret_cast<char*>(&f.S), sizeof(double));
    in.read(reinterpret_cast<char*>(&f.h), sizeof(double));
    in.read(reinterpret_cast<char*>(&nx), sizeof(nx));
    in.read(reinterpret_cast<char*>(&ny), sizeof(ny));
    if (!in || nx != ny || nx < 8 || nx > (1 << 15))
        throw std::runtime_error(path.string() + ": bad plane-field header");
    f.N = static_cast<int>(nx);
    f.values.resize(static_cast<std::size_t>(nx) * ny);
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
    if (!in) throw std::runtime_error(path.string() + ": truncated payload");
    f.validate();
    return f;
}

void write_plane_field_csv(const PlaneField& f, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "x,y,re,im\n" << std::setprecision(17);
    for (int j = 0; j < f.N; ++j)
        for (int i = 0; i < f.N; ++i)
            out << f.coord(i) << ',' << f.coord(j) << ',' << f.at(i, j).real() << ','
                << f.at(i, j).imag() << '\n';
}

}  // namespace heis
