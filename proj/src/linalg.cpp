#include "entorder/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace entorder::linalg {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << "shapes " << a.rows() << "x" << a.cols() << " and " << b.rows() << "x" << b.cols();
    fail(ErrorKind::DimensionMismatch, os.str());
  }
}

void require_bipartite(const ComplexMatrix& rho, int dim_a, int dim_b) {
  const std::size_t d = static_cast<std::size_t>(dim_a) * static_cast<std::size_t>(dim_b);
  if (!rho.square() || rho.rows() != d) {
    std::ostringstream os;
    os << "matrix is " << rho.rows() << "x" << rho.cols() << ", expected " << d << "x" << d
       << " for dims (" << dim_a << "," << dim_b << ")";
    fail(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& e : entries_) e *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "product of " << a.rows() << "x" << a.cols() << " and " << b.rows() << "x" << b.cols();
    fail(ErrorKind::DimensionMismatch, os.str());
  }
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

ComplexMatrix conjugate(const ComplexMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.entries().size(); ++i) c.entries()[i] = std::conj(a.entries()[i]);
  return c;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

Complex trace(const ComplexMatrix& a) {
  Complex t{};
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& e : a.entries()) s += std::norm(e);
  return std::sqrt(s);
}

double hermiticity_defect(const ComplexMatrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
  return worst;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return a.square() && hermiticity_defect(a) <= tol;
}

ComplexMatrix outer(std::span<const Complex> u, std::span<const Complex> v) {
  ComplexMatrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

Complex expectation(const ComplexMatrix& a, std::span<const Complex> u) {
  Complex s{};
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex row{};
    for (std::size_t j = 0; j < a.cols(); ++j) row += a(i, j) * u[j];
    s += std::conj(u[i]) * row;
  }
  return s;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const Complex f = a(ia, ja);
      if (f == Complex{}) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          k(ia * b.rows() + ib, ja * b.cols() + jb) = f * b(ib, jb);
    }
  return k;
}

EigenDecomposition hermitian_eig(const ComplexMatrix& a) {
  if (!a.square()) fail(ErrorKind::DimensionMismatch, "eigendecomposition needs a square matrix");
  const double defect = hermiticity_defect(a);
  if (defect > kHermitianTol) {
    std::ostringstream os;
    os << "symmetry defect " << defect << " exceeds " << kHermitianTol;
    fail(ErrorKind::NotHermitian, os.str());
  }

  const std::size_t n = a.rows();
  // Work on the symmetrized copy so the defect cannot bias rotations.
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(frobenius_norm(m), 1.0);
  const double stop = 1e-15 * scale;

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(m(p, q));
    if (std::sqrt(2.0 * off) <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex g = m(p, q);
        const double mag = std::abs(g);
        if (mag <= 1e-300) continue;
        const Complex u = g / mag;  // phase of the pivot
        const double alpha = m(p, p).real();
        const double beta = m(q, q).real();
        const double tau = (beta - alpha) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // R = [[c, s*u], [-s*conj(u), c]] on the (p, q) plane; m <- R^H m R
        for (std::size_t k = 0; k < n; ++k) {
          const Complex mkp = m(k, p);
          const Complex mkq = m(k, q);
          m(k, p) = c * mkp - s * std::conj(u) * mkq;
          m(k, q) = s * u * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex mpk = m(p, k);
          const Complex mqk = m(q, k);
          m(p, k) = c * mpk - s * u * mqk;
          m(q, k) = s * std::conj(u) * mpk + c * mqk;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        m(p, p) = m(p, p).real();
        m(q, q) = m(q, q).real();

        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(u) * vkq;
          v(k, q) = s * u * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m(i, i).real() > m(j, j).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.eigenvalues[c] = m(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = v(r, order[c]);
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, int dim_a, int dim_b, Subsystem keep) {
  require_bipartite(rho, dim_a, dim_b);
  const std::size_t da = static_cast<std::size_t>(dim_a);
  const std::size_t db = static_cast<std::size_t>(dim_b);
  if (keep == Subsystem::A) {
    ComplexMatrix out(da, da);
    for (std::size_t i = 0; i < da; ++i)
      for (std::size_t j = 0; j < da; ++j)
        for (std::size_t b = 0; b < db; ++b) out(i, j) += rho(i * db + b, j * db + b);
    return out;
  }
  ComplexMatrix out(db, db);
  for (std::size_t a = 0; a < db; ++a)
    for (std::size_t b = 0; b < db; ++b)
      for (std::size_t i = 0; i < da; ++i) out(a, b) += rho(i * db + a, i * db + b);
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, int dim_a, int dim_b, Subsystem side) {
  require_bipartite(rho, dim_a, dim_b);
  const std::size_t da = static_cast<std::size_t>(dim_a);
  const std::size_t db = static_cast<std::size_t>(dim_b);
  ComplexMatrix out(rho.rows(), rho.cols());
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t a = 0; a < db; ++a)
      for (std::size_t j = 0; j < da; ++j)
        for (std::size_t b = 0; b < db; ++b) {
          if (side == Subsystem::B)
            out(i * db + a, j * db + b) = rho(i * db + b, j * db + a);
          else
            out(i * db + a, j * db + b) = rho(j * db + a, i * db + b);
        }
  return out;
}

MatrixLog matrix_log_psd(const ComplexMatrix& a, double cutoff) {
  const EigenDecomposition eig = hermitian_eig(a);
  const std::size_t n = a.rows();
  MatrixLog out;
  out.null_space.assign(n, false);
  out.value = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = eig.eigenvalues[k];
    if (lam < kEigClipFloor) {
      std::ostringstream os;
      os << "eigenvalue " << lam << " below " << kEigClipFloor;
      fail(ErrorKind::NegativeEigenvalue, os.str());
    }
    double loglam = 0.0;
    if (lam <= cutoff) {
      out.null_space[k] = true;
    } else {
      loglam = std::log2(lam);
    }
    if (loglam == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = eig.eigenvectors(r, k) * loglam;
      for (std::size_t c = 0; c < n; ++c)
        out.value(r, c) += vr * std::conj(eig.eigenvectors(c, k));
    }
  }
  return out;
}

double von_neumann_entropy(const ComplexMatrix& rho) {
  const EigenDecomposition eig = hermitian_eig(rho);
  double s = 0.0;
  for (double lam : eig.eigenvalues) {
    if (lam > kSupportCutoff) s -= lam * std::log2(lam);
  }
  const double cap = std::log2(static_cast<double>(rho.rows()));
  return std::clamp(s, 0.0, cap);
}

double quantum_relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_same_shape(rho, sigma);
  const EigenDecomposition sig = hermitian_eig(sigma);
  const std::size_t n = rho.rows();

  std::vector<Complex> col(n);
  double cross = 0.0;        // tr(rho log2 sigma) over the support of sigma
  double null_overlap = 0.0; // tr(rho P_null(sigma))
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r = 0; r < n; ++r) col[r] = sig.eigenvectors(r, k);
    const double weight = expectation(rho, col).real();
    if (sig.eigenvalues[k] > kSupportCutoff) {
      cross += weight * std::log2(sig.eigenvalues[k]);
    } else {
      null_overlap += weight;
    }
  }
  if (null_overlap > 1e-9) return std::numeric_limits<double>::infinity();

  const EigenDecomposition re = hermitian_eig(rho);
  double self = 0.0;  // tr(rho log2 rho)
  for (double lam : re.eigenvalues)
    if (lam > kSupportCutoff) self += lam * std::log2(lam);

  double value = self - cross;
  if (value < 0.0 && value > -1e-9) value = 0.0;  // round-off below the Klein bound
  return value;
}

}  // namespace entorder::linalg
