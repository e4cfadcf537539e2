#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace oracle {

namespace {

std::vector<int> digits(std::int64_t index, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    d[s] = static_cast<int>(index % dims[s]);
    index /= dims[s];
  }
  return d;
}

std::int64_t compose(const std::vector<int>& d, const std::vector<int>& dims) {
  std::int64_t index = 0;
  for (std::size_t s = 0; s < dims.size(); ++s) index = index * dims[s] + d[s];
  return index;
}

std::int64_t product(const std::vector<int>& dims) {
  std::int64_t p = 1;
  for (int d : dims) p *= d;
  return p;
}

double gauss(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
double unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Vec3 random_ball(Rng& rng) {
  Vec3 v(gauss(rng), gauss(rng), gauss(rng));
  return v.normalized() * std::cbrt(unit(rng));
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix pauli(int axis) {
  Matrix p(2, 2);
  switch (axis) {
    case 0:
      p << 0, 1, 1, 0;
      break;
    case 1:
      p << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    default:
      p << 1, 0, 0, -1;
  }
  return p;
}

Matrix pauli_on(int axis, int site, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int s = 0; s < n; ++s) out = kron(out, s == site ? pauli(axis) : Matrix::Identity(2, 2));
  return out;
}

Matrix collective(int axis, int n) {
  const std::int64_t dim = std::int64_t{1} << n;
  Matrix out = Matrix::Zero(dim, dim);
  for (int s = 0; s < n; ++s) out += 0.5 * pauli_on(axis, s, n);
  return out;
}

Matrix partial_transpose(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<int>& side_a) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      auto dr = digits(r, dims);
      auto dc = digits(c, dims);
      for (int s : side_a) std::swap(dr[s], dc[s]);
      out(compose(dr, dims), compose(dc, dims)) = m(r, c);
    }
  }
  return out;
}

Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  std::vector<int> kdims;
  for (int s : keep) kdims.push_back(dims[s]);
  const std::int64_t kd = product(kdims);
  Matrix out = Matrix::Zero(kd, kd);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto dr = digits(r, dims);
      const auto dc = digits(c, dims);
      bool diagonal = true;
      for (std::size_t s = 0; s < dims.size(); ++s) {
        if (std::find(keep.begin(), keep.end(), static_cast<int>(s)) == keep.end() &&
            dr[s] != dc[s]) {
          diagonal = false;
        }
      }
      if (!diagonal) continue;
      std::vector<int> kr;
      std::vector<int> kc;
      for (int s : keep) {
        kr.push_back(dr[s]);
        kc.push_back(dc[s]);
      }
      out(compose(kr, kdims), compose(kc, kdims)) += m(r, c);
    }
  }
  return out;
}

Matrix realign(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& side_a) {
  std::vector<int> a = side_a;
  std::sort(a.begin(), a.end());
  std::vector<int> b;
  for (int s = 0; s < static_cast<int>(dims.size()); ++s) {
    if (std::find(a.begin(), a.end(), s) == a.end()) b.push_back(s);
  }
  std::vector<int> adims;
  std::vector<int> bdims;
  for (int s : a) adims.push_back(dims[s]);
  for (int s : b) bdims.push_back(dims[s]);
  const std::int64_t da = product(adims);
  const std::int64_t db = product(bdims);
  Matrix out(da * da, db * db);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto dr = digits(r, dims);
      const auto dc = digits(c, dims);
      std::vector<int> ar;
      std::vector<int> ac;
      std::vector<int> br;
      std::vector<int> bc;
      for (int s : a) {
        ar.push_back(dr[s]);
        ac.push_back(dc[s]);
      }
      for (int s : b) {
        br.push_back(dr[s]);
        bc.push_back(dc[s]);
      }
      out(compose(ar, adims) * da + compose(ac, adims), compose(br, bdims) * db + compose(bc, bdims)) =
          m(r, c);
    }
  }
  return out;
}

Moments moments(const Matrix& rho, int n) {
  Moments out;
  std::array<Matrix, 3> j;
  for (int a = 0; a < 3; ++a) {
    j[a] = collective(a, n);
    out.j[a] = (rho * j[a]).trace().real();
  }
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      out.c(k, l) = 0.5 * (rho * (j[k] * j[l] + j[l] * j[k])).trace().real();
    }
  }
  return out;
}

Moments dicke_moments(int n, int m) {
  Moments out;
  const double jz = 0.5 * n - m;
  const double big_j = 0.5 * n;
  const double transverse = 0.5 * (big_j * (big_j + 1) - jz * jz);
  out.j = Vec3(0, 0, jz);
  out.c = Mat3::Zero();
  out.c(0, 0) = out.c(1, 1) = transverse;
  out.c(2, 2) = jz * jz;
  return out;
}

double min_eigenvalue(const Matrix& h) {
  Eigen::ComplexEigenSolver<Matrix> es(h, false);
  return es.eigenvalues().real().minCoeff();
}

Vector random_pure(int dim, Rng& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return v.normalized();
}

Matrix random_density(int dim, int rank, Rng& rng) {
  Matrix g(dim, rank);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < rank; ++k) g(i, k) = Complex(gauss(rng), gauss(rng));
  }
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Matrix random_unitary(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) g(i, k) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int k = 0; k < dim; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
  return q;
}

Mat3 random_rotation(Rng& rng) {
  Mat3 g;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) g(i, k) = gauss(rng);
  }
  Eigen::HouseholderQR<Mat3> qr(g);
  Mat3 q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

Vector random_symmetric(int n, Rng& rng) {
  const std::int64_t dim = std::int64_t{1} << n;
  Vector psi = Vector::Zero(dim);
  for (int m = 0; m <= n; ++m) {
    const Complex coeff(gauss(rng), gauss(rng));
    const double count = std::round(std::tgamma(n + 1.0) / (std::tgamma(m + 1.0) * std::tgamma(n - m + 1.0)));
    for (std::int64_t i = 0; i < dim; ++i) {
      if (std::popcount(static_cast<std::uint64_t>(i)) == m) psi[i] += coeff / std::sqrt(count);
    }
  }
  return psi.normalized();
}

Matrix random_separable(int n, int components, Rng& rng) {
  const std::int64_t dim = std::int64_t{1} << n;
  Matrix rho = Matrix::Zero(dim, dim);
  double total = 0.0;
  for (int c = 0; c < components; ++c) {
    Matrix prod = Matrix::Identity(1, 1);
    for (int s = 0; s < n; ++s) {
      const Vec3 r = random_ball(rng);
      const Matrix q =
          0.5 * (Matrix::Identity(2, 2) + r[0] * pauli(0) + r[1] * pauli(1) + r[2] * pauli(2));
      prod = kron(prod, q);
    }
    const double w = unit(rng) + 1e-3;
    rho += w * prod;
    total += w;
  }
  return rho / total;
}

// ---------------------------------------------------------------------------

ConvexHull3::Face ConvexHull3::make_face(int a, int b, int c, const Vec3& inside) const {
  Vec3 normal = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
  Face f{{a, b, c}, normal, 0.0};
  if (normal.dot(inside - pts_[a]) > 0) {
    f.v = {a, c, b};
    f.normal = -normal;
  }
  f.normal.normalize();
  f.offset = f.normal.dot(pts_[a]);
  return f;
}

ConvexHull3::ConvexHull3(const std::vector<Vec3>& points, double eps) : pts_(points), eps_(eps) {
  const int n = static_cast<int>(pts_.size());
  if (n < 4) throw std::invalid_argument("hull needs four points");
  int i0 = 0;
  for (int i = 1; i < n; ++i) {
    if (pts_[i][0] < pts_[i0][0]) i0 = i;
  }
  int i1 = i0;
  for (int i = 0; i < n; ++i) {
    if ((pts_[i] - pts_[i0]).norm() > (pts_[i1] - pts_[i0]).norm()) i1 = i;
  }
  const Vec3 axis = (pts_[i1] - pts_[i0]).normalized();
  auto line_dist = [&](int i) {
    const Vec3 d = pts_[i] - pts_[i0];
    return (d - d.dot(axis) * axis).norm();
  };
  int i2 = i0;
  for (int i = 0; i < n; ++i) {
    if (line_dist(i) > line_dist(i2)) i2 = i;
  }
  const Vec3 pn = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
  int i3 = i0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(pn.dot(pts_[i] - pts_[i0])) > std::abs(pn.dot(pts_[i3] - pts_[i0]))) i3 = i;
  }
  if (std::abs(pn.dot(pts_[i3] - pts_[i0])) <= eps_) throw std::invalid_argument("flat point cloud");

  const Vec3 inside = (pts_[i0] + pts_[i1] + pts_[i2] + pts_[i3]) / 4.0;
  faces_ = {make_face(i0, i1, i2, inside), make_face(i0, i1, i3, inside),
            make_face(i0, i2, i3, inside), make_face(i1, i2, i3, inside)};

  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<char> visible(faces_.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (faces_[f].normal.dot(pts_[p]) - faces_[f].offset > eps_) visible[f] = any = true;
    }
    if (!any) continue;
    std::map<std::pair<int, int>, int> edges;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = faces_[f].v;
      for (int e = 0; e < 3; ++e) ++edges[{v[e], v[(e + 1) % 3]}];
    }
    std::vector<Face> next;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      if (!visible[f]) next.push_back(faces_[f]);
    }
    for (const auto& [edge, count] : edges) {
      if (edges.contains({edge.second, edge.first})) continue;
      next.push_back(make_face(edge.first, edge.second, p, inside));
    }
    faces_ = std::move(next);
  }
}

bool ConvexHull3::contains(const Vec3& x, double tol) const {
  return std::all_of(faces_.begin(), faces_.end(),
                     [&](const Face& f) { return f.normal.dot(x) - f.offset <= tol; });
}

}  // namespace oracle
