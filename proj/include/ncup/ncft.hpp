#pragma once

// The unitary DFT acting coordinatewise on A^d, the scalar support-sum
// bound at prime lengths, and brute-force machinery to search for
// violating support pairs: DFT minors, exhaustive and sampled enumeration,
// and an audit of the algebra-valued analogue.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ncup/frames.hpp"
#include "ncup/parallel.hpp"
#include "ncup/seeding.hpp"
#include "ncup/uncertainty.hpp"

namespace ncup {

inline constexpr double kMinorTol = 1e-10;
inline constexpr std::size_t kExhaustiveMaxPrime = 7;
inline constexpr std::size_t kSampledMaxPrime = 13;
inline constexpr std::size_t kDefaultTaoSamples = 100000;
inline constexpr std::size_t kConjectureExhaustiveMaxPrime = 5;

inline bool is_prime(std::size_t n) {
    if (n < 2) return false;
    for (std::size_t k = 2; k * k <= n; ++k) {
        if (n % k == 0) return false;
    }
    return true;
}

class PrimeDim {
public:
    explicit PrimeDim(std::size_t p) : p_(p) {
        if (!is_prime(p)) throw InputError(std::to_string(p) + " is not prime");
    }
    std::size_t value() const noexcept { return p_; }
    operator std::size_t() const noexcept { return p_; }

private:
    std::size_t p_;
};

/// Unitary DFT matrix, entry (k, j) = d^{-1/2} e^{-2 pi i j k / d}.
inline CMatrix dft_matrix(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    CMatrix f(n, n);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = 0; j < d; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / static_cast<double>(d);
            f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::polar(scale, angle);
        }
    }
    return f;
}

namespace detail {

inline ModuleVector dft_apply(const ModuleVector& x, double sign) {
    const std::size_t d = x.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<AlgebraElement> out(d, AlgebraElement::zero(x.shape()));
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = 0; j < d; ++j) {
            const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / static_cast<double>(d);
            out[k] += std::polar(scale, angle) * x.entry(j);
        }
    }
    return ModuleVector(x.shape(), std::move(out));
}

}  // namespace detail

/// x^_k = d^{-1/2} sum_j e^{-2 pi i j k / d} x_j. Any length is accepted.
inline ModuleVector ncdft(const ModuleVector& x) { return detail::dft_apply(x, -1.0); }

inline ModuleVector inverse_ncdft(const ModuleVector& x) { return detail::dft_apply(x, 1.0); }

/// Entries of x as a coefficient sequence, for support counting.
inline AnalysisCoefficients as_coefficients(const ModuleVector& x) { return AnalysisCoefficients{x.entries()}; }

inline std::size_t support_sum(const ModuleVector& x, double rel_tol = kDefaultSparsityTol) {
    return sparsity(as_coefficients(x), rel_tol) + sparsity(as_coefficients(ncdft(x)), rel_tol);
}

namespace detail {

inline void check_indices(const std::vector<std::size_t>& idx, std::size_t d, const char* what) {
    for (std::size_t i : idx) {
        if (i >= d) throw InputError(std::string(what) + ": index " + std::to_string(i) + " out of range");
    }
}

inline CMatrix submatrix(const CMatrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    CMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                m(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
        }
    }
    return out;
}

/// Full column rank of m at the relative singular value threshold.
inline bool full_column_rank(const CMatrix& m) {
    if (m.cols() == 0) return true;
    if (m.rows() < m.cols()) return false;
    const Eigen::VectorXd sv = linalg::singular_values(m);
    return sv(sv.size() - 1) > kMinorTol * sv(0);
}

inline std::vector<std::size_t> mask_to_indices(std::uint32_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
        if (mask & 1u) out.push_back(i);
    }
    return out;
}

inline std::vector<std::size_t> complement(const std::vector<std::size_t>& idx, std::size_t d) {
    std::vector<bool> in(d, false);
    for (std::size_t i : idx) in[i] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < d; ++i) {
        if (!in[i]) out.push_back(i);
    }
    return out;
}

}  // namespace detail

/// Whether the square DFT minor on (rows, cols) is nonsingular at relative threshold 1e-10.
inline bool chebotarev_minor_nonsingular(PrimeDim p, const std::vector<std::size_t>& rows,
                                         const std::vector<std::size_t>& cols) {
    if (rows.size() != cols.size()) throw InputError("chebotarev minor must be square");
    if (rows.empty()) throw InputError("chebotarev minor must be at least 1x1");
    detail::check_indices(rows, p, "chebotarev minor rows");
    detail::check_indices(cols, p, "chebotarev minor cols");
    return detail::full_column_rank(detail::submatrix(dft_matrix(p), rows, cols));
}

/// Whether some nonzero h in C^d has supp(h) in `t` and supp(h^) in `omega`,
/// decided by the rank of the DFT minor on rows omega^c, columns t.
inline bool dft_support_pair_feasible(std::size_t d, const std::vector<std::size_t>& t,
                                      const std::vector<std::size_t>& omega) {
    detail::check_indices(t, d, "support pair (time)");
    detail::check_indices(omega, d, "support pair (frequency)");
    if (t.empty()) return false;
    return !detail::full_column_rank(detail::submatrix(dft_matrix(d), detail::complement(omega, d), t));
}

enum class TaoMode { Exhaustive, Sampled };

inline const char* to_string(TaoMode m) { return m == TaoMode::Exhaustive ? "exhaustive" : "sampled"; }

struct SupportPair {
    std::vector<std::size_t> time;
    std::vector<std::size_t> freq;
    std::size_t sum() const noexcept { return time.size() + freq.size(); }
};

struct TaoResult {
    std::size_t p = 0;
    TaoMode mode = TaoMode::Exhaustive;
    std::size_t pairs_checked = 0;
    std::size_t min_sum = 0;
    SupportPair witness;
    /// Feasible pairs with |T| + |W| <= p; empty whenever the bound holds.
    std::vector<SupportPair> violations;
    double threshold = kMinorTol;
};

struct TaoOptions {
    TaoMode mode = TaoMode::Exhaustive;
    std::size_t samples = kDefaultTaoSamples;
    std::uint64_t seed = 0;
    /// Permits exhaustive search beyond p = 7 (maximal pairs only).
    bool allow_long = false;
};

namespace detail {

inline SupportPair delta_witness(std::size_t p) {
    SupportPair w{{0}, {}};
    for (std::size_t k = 0; k < p; ++k) w.freq.push_back(k);
    return w;
}

inline void finish_tao(TaoResult& r) {
    r.min_sum = r.p + 1;
    r.witness = delta_witness(r.p);
    for (const auto& v : r.violations) {
        if (v.sum() < r.min_sum) {
            r.min_sum = v.sum();
            r.witness = v;
        }
    }
}

template <class R>
std::vector<std::size_t> random_subset(std::size_t d, std::size_t k, R& rng) {
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace detail

/// Smallest |supp h| + |supp h^| over nonzero h in C^d, by enumerating every
/// support pair with |T| + |W| <= d. Meaningful for any d; cost is about 4^d.
inline TaoResult min_support_sum_exhaustive(std::size_t d) {
    if (d == 0 || d > 16) throw InputError("exhaustive support search needs 1 <= d <= 16");
    TaoResult r;
    r.p = d;
    const CMatrix f = dft_matrix(d);
    const std::uint32_t full = (1u << d) - 1u;
    for (std::uint32_t tm = 1; tm <= full; ++tm) {
        const auto t = detail::mask_to_indices(tm);
        for (std::uint32_t wm = 1; wm <= full; ++wm) {
            const auto ws = static_cast<std::size_t>(std::popcount(wm));
            if (t.size() + ws > d) continue;
            const auto w = detail::mask_to_indices(wm);
            ++r.pairs_checked;
            if (!detail::full_column_rank(detail::submatrix(f, detail::complement(w, d), t))) {
                r.violations.push_back({t, w});
            }
        }
    }
    detail::finish_tao(r);
    return r;
}

/// Minimum of |supp h| + |supp h^| over nonzero h in C^p. Exhaustive mode
/// checks every support pair with |T| + |W| <= p (p <= 7), or with the long
/// flag only the maximal pairs |T| + |W| = p, which decides the same question
/// because feasibility is monotone. Sampled mode draws maximal pairs uniformly.
inline TaoResult tao_min_sum(PrimeDim prime, const TaoOptions& opt = {}) {
    const std::size_t p = prime;
    if (opt.mode == TaoMode::Exhaustive && p > kExhaustiveMaxPrime && !opt.allow_long) {
        throw InputError("exhaustive tao search is limited to p <= 7 without the long-running flag");
    }
    if (opt.mode == TaoMode::Exhaustive && p > kSampledMaxPrime) {
        throw InputError("exhaustive tao search is limited to p <= 13");
    }
    if (opt.mode == TaoMode::Sampled && p > kSampledMaxPrime) {
        throw InputError("sampled tao search is limited to p <= 13");
    }
    if (opt.mode == TaoMode::Sampled && opt.samples == 0) throw InputError("sampled tao search needs samples >= 1");

    if (opt.mode == TaoMode::Exhaustive && p <= kExhaustiveMaxPrime) {
        TaoResult r = min_support_sum_exhaustive(p);
        r.mode = TaoMode::Exhaustive;
        return r;
    }

    TaoResult r;
    r.p = p;
    r.mode = opt.mode;
    const CMatrix f = dft_matrix(p);

    if (opt.mode == TaoMode::Exhaustive) {
        // maximal pairs: |T| = k, |W| = p - k, minor rows W^c (size k), cols T
        const std::uint32_t full = (1u << p) - 1u;
        std::vector<std::uint32_t> masks(full);
        std::iota(masks.begin(), masks.end(), 1u);
        std::vector<std::vector<SupportPair>> found(masks.size());
        std::vector<std::size_t> counts(masks.size(), 0);
        parallel_for(masks.size(), [&](std::size_t i) {
            const auto t = detail::mask_to_indices(masks[i]);
            if (t.size() >= p) return;
            for (std::uint32_t rows = 1; rows <= full; ++rows) {
                if (static_cast<std::size_t>(std::popcount(rows)) != t.size()) continue;
                const auto row_idx = detail::mask_to_indices(rows);
                ++counts[i];
                if (!detail::full_column_rank(detail::submatrix(f, row_idx, t))) {
                    found[i].push_back({t, detail::complement(row_idx, p)});
                }
            }
        });
        for (std::size_t i = 0; i < masks.size(); ++i) {
            r.pairs_checked += counts[i];
            r.violations.insert(r.violations.end(), found[i].begin(), found[i].end());
        }
        detail::finish_tao(r);
        return r;
    }

    constexpr std::size_t kChunk = 1024;
    const std::size_t chunks = (opt.samples + kChunk - 1) / kChunk;
    std::vector<std::vector<SupportPair>> found(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        Rng rng = task_rng(opt.seed, c);
        std::uniform_int_distribution<std::size_t> size_class(1, p - 1);
        const std::size_t end = std::min(opt.samples, (c + 1) * kChunk);
        for (std::size_t s = c * kChunk; s < end; ++s) {
            const std::size_t k = size_class(rng);
            const auto t = detail::random_subset(p, k, rng);
            const auto w = detail::random_subset(p, p - k, rng);
            if (!detail::full_column_rank(detail::submatrix(f, detail::complement(w, p), t))) {
                found[c].push_back({t, w});
            }
        }
    });
    r.pairs_checked = opt.samples;
    for (auto& v : found) r.violations.insert(r.violations.end(), v.begin(), v.end());
    detail::finish_tao(r);
    return r;
}

struct ConjectureOptions {
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
    double rel_tol = kDefaultSparsityTol;
    /// Run the flattened support-pattern search (p <= 5).
    bool exhaustive = true;
};

struct ConjectureReport {
    AlgebraShape algebra;
    std::size_t p = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t random_checked = 0;
    std::size_t random_min_sum = 0;
    std::size_t random_violations = 0;
    /// First randomly drawn x with support sum <= p, if any.
    std::optional<ModuleVector> counterexample;
    /// Whether every scalar coordinate slice of the counterexample also violates the scalar bound.
    std::optional<bool> counterexample_slice_confirmed;

    bool exhaustive_ran = false;
    std::size_t pairs_checked = 0;
    std::size_t exhaustive_min_sum = 0;
    /// Pairs with |T| + |W| <= p found feasible by the flattened kernel search.
    std::vector<SupportPair> feasible_pairs;
    /// Pairs where the flattened kernel search and the coordinate-slice reduction disagree.
    std::size_t reduction_disagreements = 0;

    std::size_t delta_sum = 0;
    double threshold = kMinorTol;

    std::size_t violations() const noexcept { return random_violations + feasible_pairs.size(); }
};

namespace detail {

/// Scalar coordinate slices of x: for each block entry (k, a, b), the vector j -> x_j|k(a, b).
inline std::vector<ModuleVector> coordinate_slices(const ModuleVector& x) {
    const AlgebraShape scalars = AlgebraShape::scalars();
    std::vector<ModuleVector> out;
    for (std::size_t k = 0; k < x.shape().num_blocks(); ++k) {
        const auto n = static_cast<Eigen::Index>(x.shape().block_dim(k));
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = 0; b < n; ++b) {
                std::vector<AlgebraElement> entries;
                for (std::size_t j = 0; j < x.size(); ++j) {
                    entries.push_back(AlgebraElement::scalar(scalars, x.entry(j).block(k)(a, b)));
                }
                out.emplace_back(scalars, std::move(entries));
            }
        }
    }
    return out;
}

enum class ConjectureDraw { SparseTime, SparseFrequency, Dense };

template <class R>
ModuleVector conjecture_vector(ConjectureDraw kind, const AlgebraShape& shape, std::size_t p, R& rng) {
    if (kind == ConjectureDraw::Dense) return random_vector(shape, p, rng);
    std::uniform_int_distribution<std::size_t> size(1, p);
    const auto supp = random_subset(p, size(rng), rng);
    ModuleVector y = ModuleVector::zero(shape, p);
    for (std::size_t j : supp) y.entry(j) = random_element(shape, rng);
    return kind == ConjectureDraw::SparseTime ? y : inverse_ncdft(y);
}

}  // namespace detail

/// Searches for x in A^p with ||x||_0 + ||x^||_0 <= p: random vectors drawn
/// sparse in time, sparse in frequency or dense, then (p <= 5) every support
/// pair decided by a kernel search in the complex flattening of A^p and
/// cross-checked against the scalar minor criterion, which must agree
/// because the DFT acts on each scalar coordinate separately.
inline ConjectureReport conjecture_audit(const AlgebraShape& algebra, PrimeDim prime, const ConjectureOptions& opt = {}) {
    const std::size_t p = prime;
    if (p > kSampledMaxPrime) throw InputError("conjecture audit is limited to p <= 13");
    if (opt.exhaustive && p > kConjectureExhaustiveMaxPrime) {
        throw InputError("exhaustive conjecture search is limited to p <= 5");
    }
    ConjectureReport rep;
    rep.algebra = algebra;
    rep.p = p;
    rep.trials = opt.trials;
    rep.seed = opt.seed;

    std::vector<std::size_t> sums(opt.trials, 0);
    parallel_for(opt.trials, [&](std::size_t i) {
        Rng rng = task_rng(opt.seed, i);
        const auto kind = static_cast<detail::ConjectureDraw>(i % 3);
        ModuleVector x = detail::conjecture_vector(kind, algebra, p, rng);
        sums[i] = module_norm(x) > kZeroVectorTol ? support_sum(x, opt.rel_tol) : p + 1;
    });
    rep.random_checked = opt.trials;
    rep.random_min_sum = p + 1;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        rep.random_min_sum = std::min(rep.random_min_sum, sums[i]);
        if (sums[i] <= p) {
            ++rep.random_violations;
            if (!rep.counterexample) {
                Rng rng = task_rng(opt.seed, i);
                rep.counterexample = detail::conjecture_vector(static_cast<detail::ConjectureDraw>(i % 3), algebra, p, rng);
            }
        }
    }
    if (rep.counterexample) {
        // A genuine counterexample has a nonzero coordinate slice h with
        // supp h in supp x and supp h^ in supp x^, violating the scalar bound.
        bool confirmed = false;
        for (const auto& h : detail::coordinate_slices(*rep.counterexample)) {
            if (module_norm(h) > kZeroVectorTol && support_sum(h, opt.rel_tol) <= p) confirmed = true;
        }
        rep.counterexample_slice_confirmed = confirmed;
    }

    if (opt.exhaustive) {
        rep.exhaustive_ran = true;
        const ModularFrame time = standard_basis_frame(algebra, p);
        const ModularFrame freq = fourier_frame(algebra, p);
        const std::uint32_t full = (1u << p) - 1u;
        rep.exhaustive_min_sum = p + 1;
        for (std::uint32_t tm = 1; tm <= full; ++tm) {
            const auto t = detail::mask_to_indices(tm);
            for (std::uint32_t wm = 1; wm <= full; ++wm) {
                if (t.size() + static_cast<std::size_t>(std::popcount(wm)) > p) continue;
                const auto w = detail::mask_to_indices(wm);
                ++rep.pairs_checked;
                const bool flattened = support_pair_feasible(time, freq, t, w).feasible;
                const bool sliced = dft_support_pair_feasible(p, t, w);
                if (flattened != sliced) ++rep.reduction_disagreements;
                if (flattened) {
                    rep.feasible_pairs.push_back({t, w});
                    rep.exhaustive_min_sum = std::min(rep.exhaustive_min_sum, t.size() + w.size());
                }
            }
        }
    }

    std::vector<AlgebraElement> delta(p, AlgebraElement::zero(algebra));
    delta[0] = AlgebraElement::identity(algebra);
    rep.delta_sum = support_sum(ModuleVector(algebra, std::move(delta)), opt.rel_tol);
    return rep;
}

}  // namespace ncup
