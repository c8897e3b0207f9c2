#pragma once

// The free Hilbert C*-module A^d over a finite-dimensional algebra A.
//
// Conventions: A acts on the left, <x, y> = sum_i x_i y_i^*, and module
// operators act on the right, (xM)_j = sum_i x_i M_ij. Under the flattening
// M_d(A) ~ M_{d n_1}(C) + ... + M_{d n_B}(C), a vector x becomes, for each
// block k, the n_k x (d n_k) matrix X_k = [x_1|k ... x_d|k], so that
// <x, y>|k = X_k Y_k^* and (xM)|k = X_k M_k.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ncup/algebra.hpp"

namespace ncup {

inline constexpr double kDefaultInvSqrtTol = 1e-10;

class ModuleVector {
public:
    ModuleVector(AlgebraShape shape, std::vector<AlgebraElement> entries)
        : shape_(std::move(shape)), entries_(std::move(entries)) {
        if (entries_.empty()) throw InputError("module vector needs at least one entry");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].shape() != shape_) {
                throw InputError("module vector entry " + std::to_string(i) + " has shape " +
                                 entries_[i].shape().to_string() + ", expected " + shape_.to_string());
            }
        }
    }

    static ModuleVector zero(const AlgebraShape& shape, std::size_t d) {
        if (d == 0) throw InputError("module rank d must be positive");
        return ModuleVector(shape, std::vector<AlgebraElement>(d, AlgebraElement::zero(shape)));
    }

    /// e_i: the unit in slot i (zero-based), zero elsewhere.
    static ModuleVector basis(const AlgebraShape& shape, std::size_t d, std::size_t i) {
        if (i >= d) throw InputError("basis index out of range");
        ModuleVector v = zero(shape, d);
        v.entries_[i] = AlgebraElement::identity(shape);
        return v;
    }

    /// Rebuild from per-block flattened matrices X_k of size n_k x (d n_k).
    static ModuleVector from_flat(const AlgebraShape& shape, std::size_t d, const std::vector<CMatrix>& flat) {
        if (flat.size() != shape.num_blocks()) throw InputError("flattened vector block count mismatch");
        std::vector<AlgebraElement> entries(d, AlgebraElement::zero(shape));
        for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
            const auto n = static_cast<Eigen::Index>(shape.block_dim(k));
            if (flat[k].rows() != n || flat[k].cols() != n * static_cast<Eigen::Index>(d)) {
                throw InputError("flattened vector block has the wrong size");
            }
            for (std::size_t i = 0; i < d; ++i) {
                entries[i].block(k) = flat[k].middleCols(static_cast<Eigen::Index>(i) * n, n);
            }
        }
        return ModuleVector(shape, std::move(entries));
    }

    const AlgebraShape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<AlgebraElement>& entries() const noexcept { return entries_; }
    const AlgebraElement& entry(std::size_t i) const { return entries_.at(i); }
    AlgebraElement& entry(std::size_t i) { return entries_.at(i); }

    CMatrix flat_block(std::size_t k) const {
        const auto n = static_cast<Eigen::Index>(shape_.block_dim(k));
        CMatrix out(n, n * static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < size(); ++i) {
            out.middleCols(static_cast<Eigen::Index>(i) * n, n) = entries_[i].block(k);
        }
        return out;
    }

    ModuleVector& operator+=(const ModuleVector& o) {
        check_conformant(o, "module add");
        for (std::size_t i = 0; i < size(); ++i) entries_[i] += o.entries_[i];
        return *this;
    }

    ModuleVector& operator-=(const ModuleVector& o) {
        check_conformant(o, "module subtract");
        for (std::size_t i = 0; i < size(); ++i) entries_[i] -= o.entries_[i];
        return *this;
    }

    ModuleVector& operator*=(Complex z) {
        for (auto& e : entries_) e *= z;
        return *this;
    }

    friend ModuleVector operator+(ModuleVector x, const ModuleVector& y) { return x += y; }
    friend ModuleVector operator-(ModuleVector x, const ModuleVector& y) { return x -= y; }
    friend ModuleVector operator*(Complex z, ModuleVector x) { return x *= z; }

    /// Left module action (a x)_i = a x_i.
    friend ModuleVector operator*(const AlgebraElement& a, ModuleVector x) {
        require_same_shape(a.shape(), x.shape_, "module action");
        for (auto& e : x.entries_) e = a * e;
        return x;
    }

    void check_conformant(const ModuleVector& o, const char* what) const {
        require_same_shape(shape_, o.shape_, what);
        if (size() != o.size()) {
            throw InputError(std::string(what) + ": module rank mismatch " + std::to_string(size()) +
                             " vs " + std::to_string(o.size()));
        }
    }

private:
    AlgebraShape shape_;
    std::vector<AlgebraElement> entries_;
};

template <class Rng>
ModuleVector random_vector(const AlgebraShape& shape, std::size_t d, Rng& rng) {
    std::vector<AlgebraElement> entries;
    entries.reserve(d);
    for (std::size_t i = 0; i < d; ++i) entries.push_back(random_element(shape, rng));
    return ModuleVector(shape, std::move(entries));
}

inline AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y) {
    x.check_conformant(y, "inner product");
    AlgebraElement acc = AlgebraElement::zero(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) acc += mul_star(x.entry(i), y.entry(i));
    return acc;
}

inline double module_norm(const ModuleVector& x) { return std::sqrt(inner_product(x, x).norm()); }

/// Smallest eigenvalue of ||<y,y>|| <x,x> - <x,y><y,x>. Nonnegative up to roundoff.
inline double cauchy_schwarz_gap(const ModuleVector& x, const ModuleVector& y) {
    x.check_conformant(y, "cauchy-schwarz gap");
    const AlgebraElement xy = inner_product(x, y);
    const AlgebraElement bound = inner_product(y, y).norm() * inner_product(x, x);
    return (bound - mul_star(xy, xy)).min_eigenvalue();
}

/// A d x d matrix over A, acting on row vectors from the right. Stored in the
/// flattened form: one (d n_k) x (d n_k) complex matrix per algebra block.
class ModuleOperator {
public:
    ModuleOperator(AlgebraShape shape, std::size_t d, std::vector<CMatrix> flat)
        : shape_(std::move(shape)), d_(d), flat_(std::move(flat)) {
        if (d_ == 0) throw InputError("module rank d must be positive");
        if (flat_.size() != shape_.num_blocks()) throw InputError("operator block count mismatch");
        for (std::size_t k = 0; k < flat_.size(); ++k) {
            const auto m = static_cast<Eigen::Index>(d_ * shape_.block_dim(k));
            if (flat_[k].rows() != m || flat_[k].cols() != m) {
                throw InputError("operator block " + std::to_string(k) + " must be " + std::to_string(m) +
                                 "x" + std::to_string(m));
            }
        }
    }

    static ModuleOperator identity(const AlgebraShape& shape, std::size_t d) {
        return scalar(shape, d, 1.0);
    }

    static ModuleOperator scalar(const AlgebraShape& shape, std::size_t d, Complex z) {
        std::vector<CMatrix> flat;
        for (std::size_t n : shape.block_dims()) {
            const auto m = static_cast<Eigen::Index>(d * n);
            flat.push_back(CMatrix::Identity(m, m) * z);
        }
        return ModuleOperator(shape, d, std::move(flat));
    }

    /// From row-major entries M_ij, i, j < d.
    static ModuleOperator from_entries(const AlgebraShape& shape, std::size_t d,
                                       const std::vector<AlgebraElement>& entries) {
        if (entries.size() != d * d) throw InputError("operator needs d*d entries");
        std::vector<CMatrix> flat;
        for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
            const auto n = static_cast<Eigen::Index>(shape.block_dim(k));
            const auto m = static_cast<Eigen::Index>(d) * n;
            CMatrix f(m, m);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    const auto& e = entries[i * d + j];
                    require_same_shape(e.shape(), shape, "operator entry");
                    f.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n) = e.block(k);
                }
            }
            flat.push_back(std::move(f));
        }
        return ModuleOperator(shape, d, std::move(flat));
    }

    const AlgebraShape& shape() const noexcept { return shape_; }
    std::size_t dim() const noexcept { return d_; }
    const std::vector<CMatrix>& flat_blocks() const noexcept { return flat_; }
    const CMatrix& flat_block(std::size_t k) const { return flat_.at(k); }

    AlgebraElement entry(std::size_t i, std::size_t j) const {
        if (i >= d_ || j >= d_) throw InputError("operator entry index out of range");
        std::vector<CMatrix> blocks;
        for (std::size_t k = 0; k < shape_.num_blocks(); ++k) {
            const auto n = static_cast<Eigen::Index>(shape_.block_dim(k));
            blocks.push_back(flat_[k].block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n));
        }
        return AlgebraElement(shape_, std::move(blocks));
    }

    ModuleVector apply(const ModuleVector& x) const {
        check_vector(x, "operator apply");
        std::vector<CMatrix> out;
        out.reserve(flat_.size());
        for (std::size_t k = 0; k < flat_.size(); ++k) out.push_back(x.flat_block(k) * flat_[k]);
        return ModuleVector::from_flat(shape_, d_, out);
    }

    /// Entrywise-starred transpose: the conjugate transpose of each flattened block.
    ModuleOperator adjoint() const {
        ModuleOperator out = *this;
        for (auto& f : out.flat_) f.adjointInPlace();
        return out;
    }

    /// Norm in the C*-algebra M_d(A).
    double norm() const {
        double best = 0.0;
        for (const auto& f : flat_) best = std::max(best, linalg::largest_singular_value(f));
        return best;
    }

    bool is_self_adjoint(double tol) const {
        const double scale = std::max(1.0, norm());
        for (const auto& f : flat_) {
            if (linalg::largest_singular_value(f - f.adjoint()) > tol * scale) return false;
        }
        return true;
    }

    ModuleOperator& operator+=(const ModuleOperator& o) {
        check_operator(o, "operator add");
        for (std::size_t k = 0; k < flat_.size(); ++k) flat_[k] += o.flat_[k];
        return *this;
    }

    ModuleOperator& operator-=(const ModuleOperator& o) {
        check_operator(o, "operator subtract");
        for (std::size_t k = 0; k < flat_.size(); ++k) flat_[k] -= o.flat_[k];
        return *this;
    }

    friend ModuleOperator operator+(ModuleOperator a, const ModuleOperator& b) { return a += b; }
    friend ModuleOperator operator-(ModuleOperator a, const ModuleOperator& b) { return a -= b; }

    /// Composition in matrix order: x (A B) = (x A) B.
    friend ModuleOperator operator*(const ModuleOperator& a, const ModuleOperator& b) {
        a.check_operator(b, "operator compose");
        std::vector<CMatrix> flat;
        for (std::size_t k = 0; k < a.flat_.size(); ++k) flat.push_back(a.flat_[k] * b.flat_[k]);
        return ModuleOperator(a.shape_, a.d_, std::move(flat));
    }

private:
    void check_vector(const ModuleVector& x, const char* what) const {
        require_same_shape(shape_, x.shape(), what);
        if (x.size() != d_) throw InputError(std::string(what) + ": vector rank does not match operator");
    }

    void check_operator(const ModuleOperator& o, const char* what) const {
        require_same_shape(shape_, o.shape_, what);
        if (d_ != o.d_) throw InputError(std::string(what) + ": operator rank mismatch");
    }

    AlgebraShape shape_;
    std::size_t d_;
    std::vector<CMatrix> flat_;
};

inline ModuleVector op_apply(const ModuleOperator& m, const ModuleVector& x) { return m.apply(x); }
inline ModuleOperator op_adjoint(const ModuleOperator& m) { return m.adjoint(); }

/// Inverse square root of a positive invertible operator, per flattened block
/// through the Hermitian eigendecomposition. Throws SingularOperatorError when
/// the smallest eigenvalue is at most tol times the largest.
inline ModuleOperator op_inv_sqrt(const ModuleOperator& m, double tol = kDefaultInvSqrtTol) {
    if (!m.is_self_adjoint(1e-10)) throw PreconditionError("op_inv_sqrt: operator is not self-adjoint");
    std::vector<Eigen::SelfAdjointEigenSolver<CMatrix>> solvers;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& f : m.flat_blocks()) {
        solvers.emplace_back(CMatrix((f + f.adjoint()) * 0.5));
        const auto& ev = solvers.back().eigenvalues();
        lo = std::min(lo, ev(0));
        hi = std::max(hi, ev(ev.size() - 1));
    }
    if (!(hi > 0.0) || lo <= tol * hi) {
        throw SingularOperatorError("op_inv_sqrt: operator is singular (min eigenvalue " + std::to_string(lo) +
                                    ", max eigenvalue " + std::to_string(hi) + ")");
    }
    std::vector<CMatrix> flat;
    for (const auto& es : solvers) {
        const CMatrix& v = es.eigenvectors();
        const Eigen::VectorXd scale = es.eigenvalues().array().rsqrt();
        flat.push_back(v * scale.cast<Complex>().asDiagonal() * v.adjoint());
    }
    return ModuleOperator(m.shape(), m.dim(), std::move(flat));
}

}  // namespace ncup
