#pragma once

// Finite modular frames in A^d: analysis and synthesis maps, the frame
// operator, Parseval tests, canonical Parseval-isation, cross coherence and
// support counting for algebra-valued coefficient sequences.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ncup/csmodule.hpp"

namespace ncup {

inline constexpr double kDefaultSparsityTol = 1e-8;
inline constexpr double kDefaultParsevalTol = 1e-8;

class ModularFrame {
public:
    explicit ModularFrame(std::vector<ModuleVector> vectors) : vectors_(std::move(vectors)) {
        if (vectors_.empty()) throw InputError("a frame needs at least one vector");
        for (std::size_t n = 1; n < vectors_.size(); ++n) {
            if (vectors_[n].shape() != vectors_[0].shape() || vectors_[n].size() != vectors_[0].size()) {
                throw InputError("frame vector " + std::to_string(n) + " does not live in the same module as vector 0");
            }
        }
    }

    const AlgebraShape& shape() const noexcept { return vectors_.front().shape(); }
    std::size_t dim() const noexcept { return vectors_.front().size(); }
    std::size_t size() const noexcept { return vectors_.size(); }
    const std::vector<ModuleVector>& vectors() const noexcept { return vectors_; }
    const ModuleVector& operator[](std::size_t n) const { return vectors_.at(n); }

    void check_vector(const ModuleVector& x, const char* what) const {
        require_same_shape(shape(), x.shape(), what);
        if (x.size() != dim()) {
            throw InputError(std::string(what) + ": vector has rank " + std::to_string(x.size()) +
                             ", frame lives in rank " + std::to_string(dim()));
        }
    }

private:
    std::vector<ModuleVector> vectors_;
};

/// A finite A-valued sequence with the l2(A) inner product sum_n a_n b_n^*.
struct AnalysisCoefficients {
    std::vector<AlgebraElement> coeffs;

    std::size_t size() const noexcept { return coeffs.size(); }
    const AlgebraElement& operator[](std::size_t n) const { return coeffs.at(n); }

    /// delta_n: the unit at index n, zero elsewhere.
    static AnalysisCoefficients delta(const AlgebraShape& shape, std::size_t count, std::size_t n) {
        if (n >= count) throw InputError("delta index out of range");
        AnalysisCoefficients a{std::vector<AlgebraElement>(count, AlgebraElement::zero(shape))};
        a.coeffs[n] = AlgebraElement::identity(shape);
        return a;
    }
};

inline AlgebraElement l2_inner_product(const AnalysisCoefficients& a, const AnalysisCoefficients& b) {
    if (a.size() != b.size() || a.size() == 0) throw InputError("l2 inner product: length mismatch");
    AlgebraElement acc = AlgebraElement::zero(a[0].shape());
    for (std::size_t n = 0; n < a.size(); ++n) acc += mul_star(a[n], b[n]);
    return acc;
}

inline double l2_norm(const AnalysisCoefficients& a) { return std::sqrt(l2_inner_product(a, a).norm()); }

/// coeffs[n] = <x, tau_n>.
inline AnalysisCoefficients analysis(const ModularFrame& frame, const ModuleVector& x) {
    frame.check_vector(x, "analysis");
    AnalysisCoefficients out;
    out.coeffs.reserve(frame.size());
    for (const auto& tau : frame.vectors()) out.coeffs.push_back(inner_product(x, tau));
    return out;
}

/// sum_n a_n tau_n.
inline ModuleVector synthesis(const ModularFrame& frame, const AnalysisCoefficients& a) {
    if (a.size() != frame.size()) {
        throw InputError("synthesis: " + std::to_string(a.size()) + " coefficients for a frame of " +
                         std::to_string(frame.size()) + " vectors");
    }
    ModuleVector acc = ModuleVector::zero(frame.shape(), frame.dim());
    for (std::size_t n = 0; n < frame.size(); ++n) {
        require_same_shape(a[n].shape(), frame.shape(), "synthesis");
        acc += a[n] * frame[n];
    }
    return acc;
}

/// S with S_ij = sum_n (tau_n)_i^* (tau_n)_j, so that x S = sum_n <x, tau_n> tau_n.
inline ModuleOperator frame_operator(const ModularFrame& frame) {
    const AlgebraShape& shape = frame.shape();
    std::vector<CMatrix> flat;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const auto m = static_cast<Eigen::Index>(frame.dim() * shape.block_dim(k));
        CMatrix s = CMatrix::Zero(m, m);
        for (const auto& tau : frame.vectors()) {
            const CMatrix t = tau.flat_block(k);
            s.noalias() += t.adjoint() * t;
        }
        flat.push_back(std::move(s));
    }
    return ModuleOperator(shape, frame.dim(), std::move(flat));
}

/// Distance of the frame operator from the identity.
inline double parseval_defect(const ModularFrame& frame) {
    return (frame_operator(frame) - ModuleOperator::identity(frame.shape(), frame.dim())).norm();
}

inline bool is_parseval(const ModularFrame& frame, double tol = kDefaultParsevalTol) {
    if (tol < 0) throw InputError("Parseval tolerance must be nonnegative");
    return parseval_defect(frame) <= tol;
}

/// Canonical Parseval frame {tau_n S^{-1/2}}.
inline ModularFrame parsevalize(const ModularFrame& frame) {
    ModuleOperator root = [&] {
        try {
            return op_inv_sqrt(frame_operator(frame), kDefaultInvSqrtTol);
        } catch (const SingularOperatorError& e) {
            throw NotAFrameError(std::string("parsevalize: family does not span the module; ") + e.what());
        }
    }();
    std::vector<ModuleVector> out;
    out.reserve(frame.size());
    for (const auto& tau : frame.vectors()) out.push_back(root.apply(tau));
    return ModularFrame(std::move(out));
}

/// max_{n,m} ||<tau_n, omega_m>||. The uncertainty bound is the inverse square of this.
inline double coherence(const ModularFrame& f, const ModularFrame& g) {
    require_same_shape(f.shape(), g.shape(), "coherence");
    if (f.dim() != g.dim()) throw InputError("coherence: frames live in modules of different rank");
    double best = 0.0;
    for (const auto& tau : f.vectors()) {
        for (const auto& omega : g.vectors()) best = std::max(best, inner_product(tau, omega).norm());
    }
    return best;
}

/// Indices whose coefficient norm exceeds rel_tol times the largest coefficient norm.
inline std::vector<std::size_t> support(const AnalysisCoefficients& a, double rel_tol = kDefaultSparsityTol) {
    if (rel_tol < 0) throw InputError("support tolerance must be nonnegative");
    std::vector<double> norms;
    norms.reserve(a.size());
    double top = 0.0;
    for (const auto& c : a.coeffs) {
        norms.push_back(c.norm());
        top = std::max(top, norms.back());
    }
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < norms.size(); ++n) {
        if (norms[n] > rel_tol * top) out.push_back(n);
    }
    return out;
}

inline std::size_t sparsity(const AnalysisCoefficients& a, double rel_tol = kDefaultSparsityTol) {
    return support(a, rel_tol).size();
}

inline ModularFrame standard_basis_frame(const AlgebraShape& shape, std::size_t d) {
    std::vector<ModuleVector> v;
    for (std::size_t i = 0; i < d; ++i) v.push_back(ModuleVector::basis(shape, d, i));
    return ModularFrame(std::move(v));
}

/// Frame whose analysis map is the unitary DFT: <x, omega_m> = d^{-1/2} sum_j x_j e^{-2 pi i j m / d}.
inline ModularFrame fourier_frame(const AlgebraShape& shape, std::size_t d) {
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<ModuleVector> v;
    for (std::size_t m = 0; m < d; ++m) {
        std::vector<AlgebraElement> entries;
        for (std::size_t j = 0; j < d; ++j) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * m) % d) / static_cast<double>(d);
            entries.push_back(AlgebraElement::scalar(shape, std::polar(norm, angle)));
        }
        v.emplace_back(shape, std::move(entries));
    }
    return ModularFrame(std::move(v));
}

/// Gaussian family of n vectors in A^d; not normalised.
template <class Rng>
ModularFrame random_frame(const AlgebraShape& shape, std::size_t d, std::size_t n, Rng& rng) {
    std::vector<ModuleVector> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) v.push_back(random_vector(shape, d, rng));
    return ModularFrame(std::move(v));
}

/// Gaussian family passed through parsevalize, redrawn when the frame operator is near-singular.
template <class Rng>
ModularFrame random_parseval_frame(const AlgebraShape& shape, std::size_t d, std::size_t n, Rng& rng,
                                   int max_attempts = 16) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        try {
            return parsevalize(random_frame(shape, d, n, rng));
        } catch (const NotAFrameError&) {
        }
    }
    throw EnvironmentError("random_parseval_frame: no invertible frame operator after " +
                           std::to_string(max_attempts) + " draws (n=" + std::to_string(n) +
                           ", d=" + std::to_string(d) + ")");
}

}  // namespace ncup
