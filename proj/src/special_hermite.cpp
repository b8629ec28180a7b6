#include "heis/special_hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "heis/laguerre.hpp"

namespace heis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryTolerance = 1e-6;

void check_lambda(double lambda) {
    if (lambda == 0.0) throw std::invalid_argument("lambda must be nonzero");
}

// E[a][b] = exp(i (lambda/2) h^2 (a - c)(b - c)), c = N/2; row-major N x N.
std::vector<cplx> phase_table(const PlaneField& f, double lambda) {
    const int N = f.N;
    const double c = 0.5 * N;
    const double scale = 0.5 * lambda * f.h * f.h;
    std::vector<cplx> table(static_cast<std::size_t>(N) * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) table[a * N + b] = std::polar(1.0, scale * (a - c) * (b - c));
    return table;
}

// Real kernel on the (2N-1)^2 difference lattice, index (dj + N - 1)(2N - 1) + (di + N - 1).
template <class F>
std::vector<double> difference_kernel(const PlaneField& f, F&& radial) {
    const int N = f.N;
    const int M = 2 * N - 1;
    std::vector<double> g(static_cast<std::size_t>(M) * M);
    for (int dj = -(N - 1); dj <= N - 1; ++dj)
        for (int di = -(N - 1); di <= N - 1; ++di)
            g[(dj + N - 1) * M + (di + N - 1)] = radial(f.h * std::hypot(di, dj));
    return g;
}

// sum_u f(u) e^{-(i lambda/2) Im(z conj u)} G_k(z - u) for every output z and every kernel.
std::vector<PlaneField> convolve_real_kernels(const PlaneField& f,
                                              const std::vector<std::vector<double>>& kernels,
                                              double lambda) {
    const int N = f.N;
    const int M = 2 * N - 1;
    const auto E = phase_table(f, lambda);
    std::vector<PlaneField> out(kernels.size(), PlaneField::zeros(f.S, N));
    std::vector<double> wr(static_cast<std::size_t>(N) * N), wi(wr.size());
    const double area = f.h * f.h;
    for (int j1 = 0; j1 < N; ++j1) {
        for (int i1 = 0; i1 < N; ++i1) {
            // twisted input for this output node
            for (int j2 = 0; j2 < N; ++j2) {
                const cplx row_phase = E[i1 * N + j2];
                for (int i2 = 0; i2 < N; ++i2) {
                    const cplx v = f.at(i2, j2) * std::conj(E[j1 * N + i2]) * row_phase;
                    wr[j2 * N + i2] = v.real();
                    wi[j2 * N + i2] = v.imag();
                }
            }
            for (std::size_t k = 0; k < kernels.size(); ++k) {
                const double* G = kernels[k].data();
                double sr = 0.0;
                double si = 0.0;
                for (int j2 = 0; j2 < N; ++j2) {
                    const double* grow = G + (j1 - j2 + N - 1) * M + (i1 + N - 1);
                    const double* pr = wr.data() + j2 * N;
                    const double* pi = wi.data() + j2 * N;
                    for (int i2 = 0; i2 < N; ++i2) {
                        const double gk = grow[-i2];
                        sr += pr[i2] * gk;
                        si += pi[i2] * gk;
                    }
                }
                out[k].at(i1, j1) = cplx(sr, si) * area;
            }
        }
    }
    return out;
}

double interior_norm_sq(const PlaneField& f, int ring) {
    double s = 0.0;
    for (int j = ring; j < f.N - ring; ++j)
        for (int i = ring; i < f.N - ring; ++i) s += std::norm(f.at(i, j));
    return s * f.h * f.h;
}

}  // namespace

SpecialHermiteEigenpair special_hermite_eigenpair(int k, double lambda, int n) {
    check_lambda(lambda);
    if (k < 0 || n < 1) throw std::invalid_argument("special_hermite_eigenpair: need k >= 0, n >= 1");
    return {k, lambda, (2.0 * k + n) * std::abs(lambda)};
}

TwistedConvolution twisted_convolve(const PlaneField& f, const PlaneField& g, double lambda) {
    check_lambda(lambda);
    f.validate();
    g.validate();
    if (!f.same_grid(g)) throw std::invalid_argument("twisted_convolve: grid mismatch");
    const int N = f.N;
    const int c = N / 2;
    const auto E = phase_table(f, lambda);
    TwistedConvolution result{PlaneField::zeros(f.S, N), 0.0, false};
    const double area = f.h * f.h;
    for (int j1 = 0; j1 < N; ++j1) {
        for (int i1 = 0; i1 < N; ++i1) {
            cplx acc{};
            for (int j2 = 0; j2 < N; ++j2) {
                const int gj = j1 - j2 + c;
                if (gj < 0 || gj >= N) continue;
                const cplx row_phase = E[i1 * N + j2];
                cplx row{};
                for (int i2 = 0; i2 < N; ++i2) {
                    const int gi = i1 - i2 + c;
                    if (gi < 0 || gi >= N) continue;
                    row += f.at(i2, j2) * std::conj(E[j1 * N + i2]) * g.at(gi, gj);
                }
                acc += row * row_phase;
            }
            result.field.at(i1, j1) = acc * area;
        }
    }
    result.boundary_fraction = std::max(f.boundary_fraction(), g.boundary_fraction());
    result.truncation_warning = result.boundary_fraction > kBoundaryTolerance;
    return result;
}

std::vector<PlaneField> twisted_convolve_phi_all(const PlaneField& f, int k_max, double lambda) {
    check_lambda(lambda);
    f.validate();
    if (k_max < 0) throw std::invalid_argument("twisted_convolve_phi: k must be >= 0");
    std::vector<std::vector<double>> kernels(k_max + 1);
    const int N = f.N;
    const int M = 2 * N - 1;
    for (auto& kern : kernels) kern.resize(static_cast<std::size_t>(M) * M);
    // one Laguerre recurrence per lattice offset fills every kernel
    const double root = std::sqrt(std::abs(lambda));
    for (int dj = -(N - 1); dj <= N - 1; ++dj) {
        for (int di = -(N - 1); di <= N - 1; ++di) {
            const double r = f.h * std::hypot(di, dj);
            const auto seq = psi_sequence(0.0, root * r, k_max);
            for (int k = 0; k <= k_max; ++k) kernels[k][(dj + N - 1) * M + (di + N - 1)] = seq[k];
        }
    }
    return convolve_real_kernels(f, kernels, lambda);
}

PlaneField twisted_convolve_phi(const PlaneField& f, int k, double lambda) {
    check_lambda(lambda);
    if (k < 0) throw std::invalid_argument("twisted_convolve_phi: k must be >= 0");
    const double root = std::sqrt(std::abs(lambda));
    auto kernel = difference_kernel(f, [&](double r) { return psi({k, 0.0}, root * r); });
    return std::move(convolve_real_kernels(f, {kernel}, lambda).front());
}

PlaneField project_special_hermite(const PlaneField& f, int k, double lambda) {
    auto out = twisted_convolve_phi(f, k, lambda);
    out *= std::abs(lambda) / (2.0 * kPi);
    return out;
}

SpecialHermiteExpansion special_hermite_expansion(const PlaneField& f, int k_max, double lambda,
                                                  double tail_tolerance) {
    SpecialHermiteExpansion ex;
    ex.components = twisted_convolve_phi_all(f, k_max, lambda);
    ex.field_energy = f.norm_sq();
    double captured = 0.0;
    for (auto& comp : ex.components) {
        comp *= std::abs(lambda) / (2.0 * kPi);
        ex.energies.push_back(comp.norm_sq());
        captured += ex.energies.back();
    }
    ex.tail_energy = ex.field_energy - captured;
    ex.truncated = ex.field_energy > 0.0 &&
                   std::abs(ex.tail_energy) > tail_tolerance * ex.field_energy;
    return ex;
}

namespace {

// sixth-order central differences
constexpr double kD2[4] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
constexpr double kD1[4] = {0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};

cplx d2x(const PlaneField& f, int i, int j) {
    cplx s = kD2[0] * f.at(i, j);
    for (int m = 1; m <= 3; ++m) s += kD2[m] * (f.at(i + m, j) + f.at(i - m, j));
    return s;
}
cplx d2y(const PlaneField& f, int i, int j) {
    cplx s = kD2[0] * f.at(i, j);
    for (int m = 1; m <= 3; ++m) s += kD2[m] * (f.at(i, j + m) + f.at(i, j - m));
    return s;
}
cplx d1x(const PlaneField& f, int i, int j) {
    cplx s{};
    for (int m = 1; m <= 3; ++m) s += kD1[m] * (f.at(i + m, j) - f.at(i - m, j));
    return s;
}
cplx d1y(const PlaneField& f, int i, int j) {
    cplx s{};
    for (int m = 1; m <= 3; ++m) s += kD1[m] * (f.at(i, j + m) - f.at(i, j - m));
    return s;
}

}  // namespace

PlaneField apply_laplacian(const PlaneField& f) {
    f.validate();
    PlaneField out = PlaneField::zeros(f.S, f.N);
    const double inv = 1.0 / (f.h * f.h);
    for (int j = kStencilRing; j < f.N - kStencilRing; ++j)
        for (int i = kStencilRing; i < f.N - kStencilRing; ++i)
            out.at(i, j) = (d2x(f, i, j) + d2y(f, i, j)) * inv;
    return out;
}

PlaneField apply_rotation(const PlaneField& f) {
    f.validate();
    PlaneField out = PlaneField::zeros(f.S, f.N);
    const double inv = 1.0 / f.h;
    for (int j = kStencilRing; j < f.N - kStencilRing; ++j)
        for (int i = kStencilRing; i < f.N - kStencilRing; ++i)
            out.at(i, j) = (f.coord(i) * d1y(f, i, j) - f.coord(j) * d1x(f, i, j)) * inv;
    return out;
}

PlaneField apply_special_hermite_operator(const PlaneField& f, double lambda) {
    PlaneField out = apply_laplacian(f);
    out *= -1.0;
    if (lambda == 0.0) return out;
    const PlaneField rot = apply_rotation(f);
    const double q = 0.25 * lambda * lambda;
    for (int j = kStencilRing; j < f.N - kStencilRing; ++j) {
        for (int i = kStencilRing; i < f.N - kStencilRing; ++i) {
            const double x = f.coord(i);
            const double y = f.coord(j);
            out.at(i, j) += q * (x * x + y * y) * f.at(i, j) - cplx(0.0, lambda) * rot.at(i, j);
        }
    }
    return out;
}

double interior_relative_l2(const PlaneField& a, const PlaneField& b, int ring) {
    const double den = interior_norm_sq(b, ring);
    const double num = interior_norm_sq(a - b, ring);
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

PlaneField twisted_translate(const PlaneField& f, cplx w, double lambda) {
    f.validate();
    const double lo = -f.S;
    const double hi = f.coord(f.N - 1);
    double lost = 0.0;
    double total = 0.0;
    for (int j = 0; j < f.N; ++j) {
        for (int i = 0; i < f.N; ++i) {
            const double e = std::norm(f.at(i, j));
            total += e;
            const double x = f.coord(i) + w.real();
            const double y = f.coord(j) + w.imag();
            if (x < lo || x > hi || y < lo || y > hi) lost += e;
        }
    }
    if (total > 0.0 && lost > kBoundaryTolerance * total)
        throw std::invalid_argument("twisted_translate: translate leaves the lattice (energy fraction " +
                                    std::to_string(lost / total) + ")");
    return PlaneField::from_function(f.S, f.N, [&](double x, double y) {
        const double im = w.imag() * x - w.real() * y;  // Im(w conj z)
        return std::polar(1.0, 0.5 * lambda * im) * f.sample(x - w.real(), y - w.imag());
    });
}

void BigradedHarmonic::validate(int n) const {
    if (p < 0 || q < 0) throw std::invalid_argument("BigradedHarmonic: degrees must be >= 0");
    if (n == 1 && p * q != 0)
        throw std::invalid_argument("BigradedHarmonic: on C one of p, q must vanish");
}

cplx BigradedHarmonic::operator()(cplx z) const {
    cplx v{1.0, 0.0};
    for (int i = 0; i < p; ++i) v *= z;
    for (int i = 0; i < q; ++i) v *= std::conj(z);
    return v;
}

double hecke_bochner_coefficient(const RadialProfile& g, const BigradedHarmonic& P, int k, int n) {
    P.validate(n);
    if (n != 1) throw std::invalid_argument("hecke_bochner: only n = 1 is supported");
    if (k < 0) throw std::invalid_argument("hecke_bochner: k must be >= 0");
    if (g.values.size() != g.grid.size())
        throw std::invalid_argument("hecke_bochner: profile/grid size mismatch");
    if (k < P.p) return 0.0;
    const int j = k - P.p;
    const int m = n + P.p + P.q;
    double integral = 0.0;
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
        const double r = g.grid.nodes[i];
        integral += g.grid.weights[i] * g.values[i] * psi({j, m - 1.0}, r) * std::pow(r, 2 * m - 1);
    }
    const double area = 2.0 * std::pow(kPi, m) / std::tgamma(m);
    return std::pow(2.0 * kPi, -(P.p + P.q)) * area * integral;
}

PlaneField hecke_bochner_project(const RadialProfile& g, const BigradedHarmonic& P, int k, int n,
                                 double S, int N) {
    const double c = hecke_bochner_coefficient(g, P, k, n);
    if (c == 0.0) return PlaneField::zeros(S, N);
    const int j = k - P.p;
    const int m = n + P.p + P.q;
    return PlaneField::from_function(S, N, [&](double x, double y) {
        const cplx z{x, y};
        return c * P(z) * phi_radial(j, m, 1.0, std::abs(z));
    });
}

AngularMode spherical_harmonic_coefficient(const PlaneField& f, int p, int q, int angles) {
    f.validate();
    if (p < 0 || q < 0) throw std::invalid_argument("spherical_harmonic_coefficient: p, q >= 0");
    if (angles < 64) throw std::invalid_argument("spherical_harmonic_coefficient: need >= 64 angles");
    const double h = f.h;
    const double r_max = f.S - 4.0 * h;
    const int count = static_cast<int>(r_max / h);
    if (count < 16) throw std::invalid_argument("spherical_harmonic_coefficient: lattice too small");
    AngularMode mode;
    mode.grid = make_radial_grid(count * h, count, GridScheme::uniform);
    mode.values.resize(count);
    const int freq = p - q;
    const int degree = p + q;
    for (int i = 0; i < count; ++i) {
        const double r = mode.grid.nodes[i];
        cplx acc{};
        for (int a = 0; a < angles; ++a) {
            const double th = 2.0 * kPi * a / angles;
            acc += f.sample(r * std::cos(th), r * std::sin(th)) * std::polar(1.0, -freq * th);
        }
        mode.values[i] = acc / static_cast<double>(angles) / std::pow(r, degree);
    }
    // even quartic a + b r^2 + c r^4 through the three nodes nearest to 2h from above
    int first = 0;
    while (first < count && mode.grid.nodes[first] < 2.0 * h) ++first;
    double A[3][3];
    cplx rhs[3];
    for (int a = 0; a < 3; ++a) {
        const double r2 = mode.grid.nodes[first + a] * mode.grid.nodes[first + a];
        A[a][0] = 1.0;
        A[a][1] = r2;
        A[a][2] = r2 * r2;
        rhs[a] = mode.values[first + a];
    }
    for (int col = 0; col < 3; ++col) {
        for (int row = col + 1; row < 3; ++row) {
            const double factor = A[row][col] / A[col][col];
            for (int b = col; b < 3; ++b) A[row][b] -= factor * A[col][b];
            rhs[row] -= factor * rhs[col];
        }
    }
    cplx coef[3];
    for (int row = 2; row >= 0; --row) {
        cplx s = rhs[row];
        for (int b = row + 1; b < 3; ++b) s -= A[row][b] * coef[b];
        coef[row] = s / A[row][row];
    }
    mode.at_origin = coef[0];
    for (int i = 0; i < count; ++i) {
        const double r = mode.grid.nodes[i];
        if (r >= 2.0 * h) break;
        mode.values[i] = coef[0] + coef[1] * (r * r) + coef[2] * (r * r * r * r);
    }
    return mode;
}

namespace {

// Solves the symmetric positive system A x = b in place (Gaussian elimination, partial pivoting).
template <class T>
std::vector<T> solve_dense(std::vector<std::vector<double>> A, std::vector<T> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= factor * A[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<T> x(n);
    for (std::size_t r = n; r-- > 0;) {
        T s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

}  // namespace

VanishingReport vanishing_order(const PlaneField& f, cplx w, int max_order, double lambda) {
    f.validate();
    if (max_order < 0 || max_order > 6)
        throw std::invalid_argument("vanishing_order: max_order must lie in [0, 6]");
    constexpr int kDegree = 16;
    const double reach = std::min(1.5, 0.25 * f.S);
    const double lo = -f.S + 3.0 * f.h;
    const double hi = f.coord(f.N - 1) - 3.0 * f.h;
    if (w.real() - reach < lo || w.real() + reach > hi || w.imag() - reach < lo || w.imag() + reach > hi)
        throw std::invalid_argument("vanishing_order: sampling disc leaves the lattice");

    // monomial coefficients of T_n: d^m/dx^m T_n(0) = m! mono[n][m]
    std::vector<std::vector<double>> mono(kDegree + 1, std::vector<double>(kDegree + 1, 0.0));
    mono[0][0] = 1.0;
    mono[1][1] = 1.0;
    for (int n = 2; n <= kDegree; ++n)
        for (int d = 0; d <= kDegree; ++d)
            mono[n][d] = (d > 0 ? 2.0 * mono[n - 1][d - 1] : 0.0) - mono[n - 2][d];

    // lattice directions; at a lattice node the samples are exact grid values
    const int directions[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    const double gi = (w.real() + f.S) / f.h;
    const double gj = (w.imag() + f.S) / f.h;
    const bool on_node = std::abs(gi - std::round(gi)) < 1e-9 && std::abs(gj - std::round(gj)) < 1e-9;

    VanishingReport report;
    report.derivatives.assign(max_order + 1, 0.0);
    double noise = 0.0;
    double scale = 0.0;
    for (const auto& d : directions) {
        const double step = f.h * std::hypot(d[0], d[1]);
        const int L = static_cast<int>(reach / step);
        if (2 * L + 1 < kDegree + 5) throw std::invalid_argument("vanishing_order: lattice too coarse");
        const double rho = L * step;
        std::vector<double> xs;
        std::vector<cplx> ys;
        for (int l = -L; l <= L; ++l) {
            const cplx z(l * d[0] * f.h, l * d[1] * f.h);
            // (T_{-w} f)(z) = e^{(i lambda/2) Im(-w conj z)} f(z + w)
            const double im = -(w.imag() * z.real() - w.real() * z.imag());
            const cplx value = on_node ? f.at(static_cast<int>(std::round(gi)) + l * d[0],
                                              static_cast<int>(std::round(gj)) + l * d[1])
                                       : f.sample(z.real() + w.real(), z.imag() + w.imag());
            xs.push_back(l * step / rho);
            ys.push_back(std::polar(1.0, 0.5 * lambda * im) * value);
            scale = std::max(scale, std::abs(ys.back()));
        }
        // least squares in the Chebyshev basis T_0..T_D on [-1, 1]
        const std::size_t P = xs.size();
        std::vector<std::vector<double>> basis(P, std::vector<double>(kDegree + 1));
        for (std::size_t l = 0; l < P; ++l) {
            basis[l][0] = 1.0;
            basis[l][1] = xs[l];
            for (int n = 2; n <= kDegree; ++n)
                basis[l][n] = 2.0 * xs[l] * basis[l][n - 1] - basis[l][n - 2];
        }
        std::vector<std::vector<double>> normal(kDegree + 1, std::vector<double>(kDegree + 1, 0.0));
        std::vector<cplx> rhs(kDegree + 1);
        for (std::size_t l = 0; l < P; ++l)
            for (int a = 0; a <= kDegree; ++a) {
                rhs[a] += basis[l][a] * ys[l];
                for (int b = 0; b <= kDegree; ++b) normal[a][b] += basis[l][a] * basis[l][b];
            }
        const auto coef = solve_dense(normal, rhs);
        double resid = 0.0;
        for (std::size_t l = 0; l < P; ++l) {
            cplx fit{};
            for (int n = 0; n <= kDegree; ++n) fit += coef[n] * basis[l][n];
            resid += std::norm(fit - ys[l]);
        }
        const double sigma = std::sqrt(resid / static_cast<double>(P - kDegree - 1));
        double fact = 1.0;
        for (int m = 0; m <= max_order; ++m) {
            if (m > 0) fact *= m;
            std::vector<double> g(kDegree + 1);
            cplx value{};
            for (int n = 0; n <= kDegree; ++n) {
                g[n] = mono[n][m];
                value += coef[n] * mono[n][m];
            }
            // standard error of the linear functional g . coef
            const auto v = solve_dense(normal, g);
            double var = 0.0;
            for (int n = 0; n <= kDegree; ++n) var += g[n] * v[n];
            const double rscale = fact * std::pow(rho, -m);
            report.derivatives[m] = std::max(report.derivatives[m], std::abs(value) * rscale);
            noise = std::max(noise, 3.0 * sigma * std::sqrt(std::max(var, 0.0)) * rscale);
        }
    }
    report.noise_floor = std::max(noise, 1e-12 * scale);
    return report;
}

}  // namespace heis
