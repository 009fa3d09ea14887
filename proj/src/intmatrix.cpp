#include "kleinsolv/intmatrix.hpp"

#include "kleinsolv/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace kleinsolv::linalg {

namespace {

void require_same_dim(const IntMatrix& a, const IntMatrix& b) {
  if (a.dim() != b.dim()) throw NumericError("dimension mismatch");
}

} // namespace

ZVec zvec_from(const std::vector<long>& v) {
  ZVec out;
  out.reserve(v.size());
  for (long x : v) out.emplace_back(x);
  return out;
}

Vec zvec_to_real(const ZVec& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].get_d();
  return out;
}

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
  const int n = static_cast<int>(rows.size());
  IntMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw NumericError("matrix must be square");
    for (int j = 0; j < n; ++j) m.at(i, j) = rows[i][static_cast<size_t>(j)];
  }
  return m;
}

IntMatrix IntMatrix::round_from(const Mat& a) {
  if (a.rows() != a.cols()) throw NumericError("matrix must be square");
  const int n = static_cast<int>(a.rows());
  IntMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = std::round(a(i, j));
      if (!std::isfinite(r)) throw NumericError("non-finite entry");
      mpz_class z;
      mpz_set_d(z.get_mpz_t(), r);
      m.at(i, j) = z;
    }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  require_same_dim(*this, o);
  IntMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      const mpz_class& aik = at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < n_; ++j) r.at(i, j) += aik * o.at(k, j);
    }
  return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  require_same_dim(*this, o);
  IntMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.at(i, j) = at(i, j) - o.at(i, j);
  return r;
}

ZVec IntMatrix::apply(const ZVec& v) const {
  if (static_cast<int>(v.size()) != n_) throw NumericError("dimension mismatch");
  ZVec r(static_cast<size_t>(n_), mpz_class(0));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r[static_cast<size_t>(i)] += at(i, j) * v[static_cast<size_t>(j)];
  return r;
}

mpz_class IntMatrix::det() const {
  if (n_ == 0) return 1;
  std::vector<mpz_class> a = a_;
  auto e = [&](int i, int j) -> mpz_class& { return a[static_cast<size_t>(i) * n_ + j]; };
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n_; ++k) {
    if (e(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n_; ++i)
        if (e(i, k) != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      for (int j = 0; j < n_; ++j) std::swap(e(k, j), e(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n_; ++i)
      for (int j = k + 1; j < n_; ++j) {
        mpz_class num = e(i, j) * e(k, k) - e(i, k) * e(k, j);
        mpz_divexact(e(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = e(k, k);
  }
  mpz_class d = e(n_ - 1, n_ - 1);
  return sign > 0 ? d : mpz_class(-d);
}

IntMatrix IntMatrix::adjugate() const {
  if (n_ == 1) {
    IntMatrix r(1);
    r.at(0, 0) = 1;
    return r;
  }
  IntMatrix r(n_);
  IntMatrix minor(n_ - 1);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      int mi = 0;
      for (int ii = 0; ii < n_; ++ii) {
        if (ii == i) continue;
        int mj = 0;
        for (int jj = 0; jj < n_; ++jj) {
          if (jj == j) continue;
          minor.at(mi, mj) = at(ii, jj);
          ++mj;
        }
        ++mi;
      }
      mpz_class c = minor.det();
      // adj = transpose of cofactors
      r.at(j, i) = ((i + j) % 2 == 0) ? c : mpz_class(-c);
    }
  return r;
}

IntMatrix IntMatrix::inverse_unimodular() const {
  mpz_class d = det();
  if (d != 1 && d != -1) throw NumericError("not unimodular");
  IntMatrix adj = adjugate();
  if (d == -1)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) adj.at(i, j) = -adj.at(i, j);
  return adj;
}

IntMatrix IntMatrix::pow(long n) const {
  IntMatrix base = *this;
  unsigned long k;
  if (n < 0) {
    base = inverse_unimodular();
    k = static_cast<unsigned long>(-(n + 1)) + 1; // avoids overflow at LONG_MIN
  } else {
    k = static_cast<unsigned long>(n);
  }
  IntMatrix r = identity(n_);
  while (k > 0) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

Mat IntMatrix::to_real() const {
  Mat m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = at(i, j).get_d();
  return m;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < n_; ++i) {
    os << (i ? ",[" : "[");
    for (int j = 0; j < n_; ++j) os << (j ? "," : "") << at(i, j).get_str();
    os << "]";
  }
  os << "]";
  return os.str();
}

DetPower int_det_and_power(const IntMatrix& b, long n) {
  DetPower r;
  r.det = b.det();
  if (n < 0 && r.det != 1 && r.det != -1) throw NumericError("not unimodular");
  r.power = b.pow(n);
  return r;
}

namespace {

// Exact Gauss-Jordan over the rationals: returns a^{-1} * rhs.
std::vector<std::vector<mpq_class>> rational_solve(const IntMatrix& a,
                                                   std::vector<std::vector<mpq_class>> rhs) {
  const int n = a.dim();
  std::vector<std::vector<mpq_class>> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<size_t>(i)].resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) w[static_cast<size_t>(i)][static_cast<size_t>(j)] = a.at(i, j);
  }
  const size_t m = rhs[0].size();
  for (int k = 0; k < n; ++k) {
    int p = -1;
    for (int i = k; i < n; ++i)
      if (w[static_cast<size_t>(i)][static_cast<size_t>(k)] != 0) {
        p = i;
        break;
      }
    if (p < 0) throw NumericError("not invertible");
    std::swap(w[static_cast<size_t>(k)], w[static_cast<size_t>(p)]);
    std::swap(rhs[static_cast<size_t>(k)], rhs[static_cast<size_t>(p)]);
    const mpq_class piv = w[static_cast<size_t>(k)][static_cast<size_t>(k)];
    for (int j = k; j < n; ++j) w[static_cast<size_t>(k)][static_cast<size_t>(j)] /= piv;
    for (size_t j = 0; j < m; ++j) rhs[static_cast<size_t>(k)][j] /= piv;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const mpq_class f = w[static_cast<size_t>(i)][static_cast<size_t>(k)];
      if (f == 0) continue;
      for (int j = k; j < n; ++j)
        w[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * w[static_cast<size_t>(k)][static_cast<size_t>(j)];
      for (size_t j = 0; j < m; ++j)
        rhs[static_cast<size_t>(i)][j] -= f * rhs[static_cast<size_t>(k)][j];
    }
  }
  return rhs;
}

} // namespace

Mat inverse_exact(const IntMatrix& a) {
  return inverse_exact_times(a, IntMatrix::identity(a.dim()));
}

Vec solve_exact(const IntMatrix& a, const ZVec& rhs) {
  if (static_cast<int>(rhs.size()) != a.dim()) throw NumericError("dimension mismatch");
  std::vector<std::vector<mpq_class>> r(rhs.size());
  for (size_t i = 0; i < rhs.size(); ++i) r[i] = {mpq_class(rhs[i])};
  auto x = rational_solve(a, std::move(r));
  Vec out(a.dim());
  for (int i = 0; i < a.dim(); ++i) out[i] = x[static_cast<size_t>(i)][0].get_d();
  return out;
}

Mat inverse_exact_times(const IntMatrix& a, const IntMatrix& b) {
  const int n = a.dim();
  if (b.dim() != n) throw NumericError("dimension mismatch");
  std::vector<std::vector<mpq_class>> rhs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    rhs[static_cast<size_t>(i)].resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) rhs[static_cast<size_t>(i)][static_cast<size_t>(j)] = b.at(i, j);
  }
  auto x = rational_solve(a, std::move(rhs));
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = x[static_cast<size_t>(i)][static_cast<size_t>(j)].get_d();
  return out;
}

} // namespace kleinsolv::linalg
