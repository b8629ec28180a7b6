#pragma once

#include <complex>
#include <filesystem>
#include <vector>

namespace heis {

using cplx = std::complex<double>;

/// Complex samples on the square lattice x_i = -S + i h, i = 0..N-1, h = 2S/N,
/// identified with C. Stored row-major: values[j * N + i] is the sample at (x_i, y_j).
/// For even N the origin is the node (N/2, N/2).
struct PlaneField {
    double S = 0.0;
    int N = 0;
    double h = 0.0;
    std::vector<cplx> values;

    static PlaneField zeros(double S, int N);

    template <class F>
    static PlaneField from_function(double S, int N, F&& f) {
        PlaneField out = zeros(S, N);
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) out.values[j * N + i] = f(out.coord(i), out.coord(j));
        return out;
    }

    double coord(int i) const { return -S + i * h; }
    cplx& at(int i, int j) { return values[static_cast<std::size_t>(j) * N + i]; }
    const cplx& at(int i, int j) const { return values[static_cast<std::size_t>(j) * N + i]; }

    /// Riemann-sum L^2 norm squared h^2 sum |f|^2.
    double norm_sq() const;
    double l1_norm() const;
    double max_abs() const;

    /// Sixth-order Lagrange interpolation (6 x 6 stencil); zero outside the lattice box.
    cplx sample(double x, double y) const;

    /// Fraction of the L^2 energy carried by the outer `ring` lattice rows and columns.
    double boundary_fraction(int ring = 4) const;

    bool same_grid(const PlaneField& other) const;
    void validate() const;

    PlaneField& operator+=(const PlaneField& other);
    PlaneField& operator*=(cplx s);
};

PlaneField operator+(PlaneField a, const PlaneField& b);
PlaneField operator-(PlaneField a, const PlaneField& b);
PlaneField operator*(cplx s, PlaneField a);

/// Relative L^2 distance ||a - b|| / ||ref||, with ref = b.
double relative_l2(const PlaneField& a, const PlaneField& b);

/// Binary layout: "HPF1", S (f64), h (f64), N (i64), N (i64), then N*N (re, im) f64 pairs.
void write_plane_field(const PlaneField& f, const std::filesystem::path& path);
PlaneField read_plane_field(const std::filesystem::path& path);

/// CSV with header x,y,re,im.
void write_plane_field_csv(const PlaneField& f, const std::filesystem::path& path);

}  // namespace heis
