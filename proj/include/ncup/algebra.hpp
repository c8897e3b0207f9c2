#pragma once

// Finite-dimensional C*-algebras realised as direct sums of full matrix
// algebras M_{n_1}(C) + ... + M_{n_B}(C). Elements are lists of square
// complex blocks; the C*-norm is the largest singular value over blocks.

#include <algorithm>
#include <complex>
#include <limits>
#include <cstddef>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ncup/errors.hpp"

namespace ncup {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kDefaultPositivityTol = 1e-10;

namespace linalg {

inline double largest_singular_value(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

/// Singular values in decreasing order.
inline Eigen::VectorXd singular_values(const CMatrix& m) {
    if (m.size() == 0) return {};
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues();
}

/// Eigenvalues of the Hermitian part (m + m*)/2, increasing.
inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
    CMatrix h = (m + m.adjoint()) * 0.5;
    if (h.rows() == 1) return Eigen::VectorXd::Constant(1, h(0, 0).real());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace linalg

class AlgebraShape {
public:
    AlgebraShape() : dims_{1} {}

    explicit AlgebraShape(std::vector<std::size_t> block_dims) : dims_(std::move(block_dims)) {
        if (dims_.empty()) throw InputError("algebra shape needs at least one block");
        for (std::size_t n : dims_) {
            if (n == 0) throw InputError("algebra block dimensions must be positive");
        }
    }

    AlgebraShape(std::initializer_list<std::size_t> block_dims)
        : AlgebraShape(std::vector<std::size_t>(block_dims)) {}

    /// The scalar algebra C.
    static AlgebraShape scalars() { return AlgebraShape({1}); }

    const std::vector<std::size_t>& block_dims() const noexcept { return dims_; }
    std::size_t num_blocks() const noexcept { return dims_.size(); }
    std::size_t block_dim(std::size_t i) const { return dims_.at(i); }

    /// Complex dimension sum_i n_i^2.
    std::size_t dim() const noexcept {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0},
                               [](std::size_t acc, std::size_t n) { return acc + n * n; });
    }

    bool is_commutative() const noexcept {
        return std::all_of(dims_.begin(), dims_.end(), [](std::size_t n) { return n == 1; });
    }

    std::string to_string() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
        os << ']';
        return os.str();
    }

    friend bool operator==(const AlgebraShape&, const AlgebraShape&) = default;

private:
    std::vector<std::size_t> dims_;
};

inline void require_same_shape(const AlgebraShape& a, const AlgebraShape& b, const char* what) {
    if (a != b) {
        throw InputError(std::string(what) + ": algebra shape mismatch " + a.to_string() + " vs " +
                         b.to_string());
    }
}

class AlgebraElement {
public:
    AlgebraElement() : AlgebraElement(zero(AlgebraShape::scalars())) {}

    AlgebraElement(AlgebraShape shape, std::vector<CMatrix> blocks)
        : shape_(std::move(shape)), blocks_(std::move(blocks)) {
        if (blocks_.size() != shape_.num_blocks()) {
            throw InputError("algebra element has " + std::to_string(blocks_.size()) +
                             " blocks, shape " + shape_.to_string() + " needs " +
                             std::to_string(shape_.num_blocks()));
        }
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            const auto n = static_cast<Eigen::Index>(shape_.block_dim(i));
            if (blocks_[i].rows() != n || blocks_[i].cols() != n) {
                throw InputError("algebra element block " + std::to_string(i) + " must be " +
                                 std::to_string(n) + "x" + std::to_string(n));
            }
        }
    }

    static AlgebraElement zero(const AlgebraShape& shape) { return scalar(shape, 0.0); }
    static AlgebraElement identity(const AlgebraShape& shape) { return scalar(shape, 1.0); }

    /// z times the unit.
    static AlgebraElement scalar(const AlgebraShape& shape, Complex z) {
        std::vector<CMatrix> blocks;
        blocks.reserve(shape.num_blocks());
        for (std::size_t n : shape.block_dims()) {
            const auto k = static_cast<Eigen::Index>(n);
            blocks.push_back(CMatrix::Identity(k, k) * z);
        }
        return AlgebraElement(shape, std::move(blocks));
    }

    const AlgebraShape& shape() const noexcept { return shape_; }
    const std::vector<CMatrix>& blocks() const noexcept { return blocks_; }
    const CMatrix& block(std::size_t i) const { return blocks_.at(i); }
    CMatrix& block(std::size_t i) { return blocks_.at(i); }

    AlgebraElement star() const {
        AlgebraElement out = *this;
        for (auto& b : out.blocks_) b.adjointInPlace();
        return out;
    }

    double norm() const {
        double best = 0.0;
        for (const auto& b : blocks_) best = std::max(best, linalg::largest_singular_value(b));
        return best;
    }

    bool is_zero(double tol) const { return norm() <= tol; }

    /// Smallest eigenvalue of the Hermitian part, over all blocks.
    double min_eigenvalue() const {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& b : blocks_) lo = std::min(lo, linalg::hermitian_eigenvalues(b)(0));
        return lo;
    }

    bool is_self_adjoint(double tol) const {
        const double scale = std::max(1.0, norm());
        for (const auto& b : blocks_) {
            if (linalg::largest_singular_value(b - b.adjoint()) > tol * scale) return false;
        }
        return true;
    }

    bool is_positive(double tol = kDefaultPositivityTol) const {
        if (tol < 0) throw InputError("positivity tolerance must be nonnegative");
        const double scale = std::max(1.0, norm());
        return is_self_adjoint(tol) && min_eigenvalue() >= -tol * scale;
    }

    AlgebraElement& operator+=(const AlgebraElement& o) {
        require_same_shape(shape_, o.shape_, "add");
        for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
        return *this;
    }

    AlgebraElement& operator-=(const AlgebraElement& o) {
        require_same_shape(shape_, o.shape_, "subtract");
        for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
        return *this;
    }

    AlgebraElement& operator*=(Complex z) {
        for (auto& b : blocks_) b *= z;
        return *this;
    }

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator-(AlgebraElement a) { return a *= -1.0; }
    friend AlgebraElement operator*(Complex z, AlgebraElement a) { return a *= z; }
    friend AlgebraElement operator*(AlgebraElement a, Complex z) { return a *= z; }

    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
        require_same_shape(a.shape_, b.shape_, "multiply");
        std::vector<CMatrix> blocks(a.blocks_.size());
        for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].noalias() = a.blocks_[i] * b.blocks_[i];
        return AlgebraElement(a.shape_, std::move(blocks));
    }

    /// a * b^*, the summand of every inner product.
    friend AlgebraElement mul_star(const AlgebraElement& a, const AlgebraElement& b) {
        require_same_shape(a.shape_, b.shape_, "multiply");
        std::vector<CMatrix> blocks(a.blocks_.size());
        for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].noalias() = a.blocks_[i] * b.blocks_[i].adjoint();
        return AlgebraElement(a.shape_, std::move(blocks));
    }

    friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
        if (a.shape_ != b.shape_) return false;
        for (std::size_t i = 0; i < a.blocks_.size(); ++i) {
            if (a.blocks_[i] != b.blocks_[i]) return false;
        }
        return true;
    }

private:
    AlgebraShape shape_;
    std::vector<CMatrix> blocks_;
};

// Named forms of the algebra operations.

inline AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) { return a + b; }
inline AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) { return a * b; }
inline AlgebraElement star(const AlgebraElement& a) { return a.star(); }
inline AlgebraElement scale(Complex z, const AlgebraElement& a) { return z * a; }
inline double norm(const AlgebraElement& a) { return a.norm(); }
inline bool is_positive(const AlgebraElement& a, double tol = kDefaultPositivityTol) { return a.is_positive(tol); }
inline bool is_zero(const AlgebraElement& a, double tol) {
    if (tol < 0) throw InputError("zero tolerance must be nonnegative");
    return a.is_zero(tol);
}

/// Distance ||a - b|| in the C*-norm.
inline double distance(const AlgebraElement& a, const AlgebraElement& b) { return (a - b).norm(); }

/// Standard complex Gaussian entries (real and imaginary parts N(0, 1/2)).
template <class Rng>
CMatrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = Complex(re, im);
        }
    }
    return m;
}

template <class Rng>
AlgebraElement random_element(const AlgebraShape& shape, Rng& rng) {
    std::vector<CMatrix> blocks;
    blocks.reserve(shape.num_blocks());
    for (std::size_t n : shape.block_dims()) {
        const auto k = static_cast<Eigen::Index>(n);
        blocks.push_back(random_gaussian_matrix(k, k, rng));
    }
    return AlgebraElement(shape, std::move(blocks));
}

/// a a^* for random a: always positive.
template <class Rng>
AlgebraElement random_positive_element(const AlgebraShape& shape, Rng& rng) {
    const AlgebraElement a = random_element(shape, rng);
    return mul_star(a, a);
}

}  // namespace ncup
