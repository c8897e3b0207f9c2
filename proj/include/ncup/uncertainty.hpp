#pragma once

// Certification of the sparsity uncertainty bound for pairs of modular
// Parseval frames,
//
//     ||theta_tau x||_0 * ||theta_omega x||_0 >= 1 / mu^2,
//     mu = max_{n,m} ||<tau_n, omega_m>||,
//
// together with its squared-mean form, a step-by-step evaluation of the
// inequality chain that proves it, and a kernel-based oracle that decides
// which support pairs are realisable at all.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ncup/frames.hpp"
#include "ncup/parallel.hpp"
#include "ncup/seeding.hpp"

namespace ncup {

/// Slack applied to every inequality verdict.
inline constexpr double kVerdictSlack = 1e-9;
inline constexpr double kZeroVectorTol = 1e-12;
inline constexpr double kKernelTol = 1e-10;

struct UncertaintyCertificate {
    std::size_t s_tau = 0;
    std::size_t s_omega = 0;
    double mu = 0.0;
    std::size_t product_lhs = 0;
    double additive_lhs = 0.0;
    double rhs = 0.0;
    bool product_holds = false;
    bool additive_holds = false;
    double slack = 0.0;

    bool holds() const noexcept { return product_holds && additive_holds; }
};

namespace detail {

inline void require_certifiable(const ModularFrame& tau, const ModularFrame& omega, const ModuleVector& x) {
    tau.check_vector(x, "certify (frame tau)");
    omega.check_vector(x, "certify (frame omega)");
    if (const double defect = parseval_defect(tau); !(defect <= kDefaultParsevalTol)) {
        throw PreconditionError("frame tau is not Parseval: ||S - I|| = " + std::to_string(defect));
    }
    if (const double defect = parseval_defect(omega); !(defect <= kDefaultParsevalTol)) {
        throw PreconditionError("frame omega is not Parseval: ||S - I|| = " + std::to_string(defect));
    }
    if (module_norm(x) <= kZeroVectorTol) throw InputError("certify: x must be nonzero");
}

inline UncertaintyCertificate make_certificate(std::size_t s_tau, std::size_t s_omega, double mu) {
    UncertaintyCertificate c;
    c.s_tau = s_tau;
    c.s_omega = s_omega;
    c.mu = mu;
    c.product_lhs = s_tau * s_omega;
    const double mean = 0.5 * static_cast<double>(s_tau + s_omega);
    c.additive_lhs = mean * mean;
    c.rhs = mu > 0.0 ? 1.0 / (mu * mu) : std::numeric_limits<double>::infinity();
    c.product_holds = static_cast<double>(c.product_lhs) >= c.rhs - kVerdictSlack;
    c.additive_holds = c.additive_lhs >= c.rhs - kVerdictSlack;
    c.slack = static_cast<double>(c.product_lhs) - c.rhs;
    return c;
}

}  // namespace detail

/// Evaluates both forms of the bound for x against the Parseval frames tau and omega.
inline UncertaintyCertificate certify(const ModularFrame& tau, const ModularFrame& omega, const ModuleVector& x,
                                      double rel_tol = kDefaultSparsityTol) {
    detail::require_certifiable(tau, omega, x);
    return detail::make_certificate(sparsity(analysis(tau, x), rel_tol), sparsity(analysis(omega, x), rel_tol),
                                    coherence(tau, omega));
}

enum class Relation { Equal, LessEqual };

struct ProofStep {
    std::string name;
    Relation relation = Relation::LessEqual;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

inline bool step_holds(Relation rel, double lhs, double rhs) {
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (rel == Relation::Equal) return std::abs(lhs - rhs) <= kVerdictSlack * scale;
    return lhs <= rhs + kVerdictSlack * scale;
}

/// Evaluates both sides of every link in the chain
///   ||x||^2 = ||<x,x>|| = ||sum_{n in T} <x,tau_n><tau_n,x>||
///           = ||sum_{n in T} u_n u_n^*||,   u_n = sum_{m in W} <x,omega_m><tau_n,omega_m>^*
///          <= ||sum_{n in T} ||sum_{m in W} g_nm g_nm^*|| B||        (Cauchy-Schwarz)
///          <= ||sum_{n in T} sum_{m in W} ||g_nm g_nm^*|| B||
///          <= mu^2 ||sum_{n in T} sum_{m in W} B||
///           = mu^2 |T| |W| ||B||  = mu^2 |T| |W| ||<x,x>||
/// with T, W the supports, g_nm = <tau_n, omega_m> and B = sum_{k in W} <x,omega_k><omega_k,x>,
/// closing with 1/mu^2 <= |T| |W|.
inline std::vector<ProofStep> proof_chain_check(const ModularFrame& tau, const ModularFrame& omega,
                                                const ModuleVector& x, double rel_tol = kDefaultSparsityTol) {
    detail::require_certifiable(tau, omega, x);
    const AlgebraShape& shape = x.shape();
    const AnalysisCoefficients c = analysis(tau, x);
    const AnalysisCoefficients b = analysis(omega, x);
    const auto supp_tau = support(c, rel_tol);
    const auto supp_omega = support(b, rel_tol);
    const double mu = coherence(tau, omega);
    const double mu2 = mu * mu;
    const auto s_tau = static_cast<double>(supp_tau.size());
    const auto s_omega = static_cast<double>(supp_omega.size());

    std::vector<std::vector<AlgebraElement>> gram(tau.size());
    for (std::size_t n : supp_tau) {
        gram[n].resize(omega.size(), AlgebraElement::zero(shape));
        for (std::size_t m : supp_omega) gram[n][m] = inner_product(tau[n], omega[m]);
    }

    AlgebraElement restricted = AlgebraElement::zero(shape);
    for (std::size_t n : supp_tau) restricted += mul_star(c[n], c[n]);

    AlgebraElement expanded = AlgebraElement::zero(shape);
    for (std::size_t n : supp_tau) {
        AlgebraElement u = AlgebraElement::zero(shape);
        for (std::size_t m : supp_omega) u += mul_star(b[m], gram[n][m]);
        expanded += mul_star(u, u);
    }

    AlgebraElement omega_energy = AlgebraElement::zero(shape);
    for (std::size_t k : supp_omega) omega_energy += mul_star(b[k], b[k]);

    double cs_weight = 0.0;
    double entrywise_weight = 0.0;
    for (std::size_t n : supp_tau) {
        AlgebraElement row = AlgebraElement::zero(shape);
        for (std::size_t m : supp_omega) {
            const AlgebraElement gg = mul_star(gram[n][m], gram[n][m]);
            entrywise_weight += gg.norm();
            row += gg;
        }
        cs_weight += row.norm();
    }

    AlgebraElement counted = AlgebraElement::zero(shape);
    for (std::size_t n = 0; n < supp_tau.size(); ++n) {
        for (std::size_t m = 0; m < supp_omega.size(); ++m) counted += omega_energy;
    }

    const double x_norm_sq = std::pow(module_norm(x), 2);
    const double energy = inner_product(x, x).norm();
    const double b_norm = omega_energy.norm();

    std::vector<ProofStep> steps;
    auto push = [&](std::string name, Relation rel, double lhs, double rhs) {
        steps.push_back({std::move(name), rel, lhs, rhs, step_holds(rel, lhs, rhs)});
    };
    push("norm_identity", Relation::Equal, x_norm_sq, energy);
    push("support_restriction", Relation::Equal, energy, restricted.norm());
    push("omega_expansion", Relation::Equal, restricted.norm(), expanded.norm());
    push("cauchy_schwarz", Relation::LessEqual, expanded.norm(), (cs_weight * omega_energy).norm());
    push("entrywise_norm_bound", Relation::LessEqual, (cs_weight * omega_energy).norm(),
         (entrywise_weight * omega_energy).norm());
    push("coherence_sup", Relation::LessEqual, (entrywise_weight * omega_energy).norm(), mu2 * counted.norm());
    push("support_count", Relation::Equal, mu2 * counted.norm(), mu2 * s_tau * s_omega * b_norm);
    push("omega_parseval", Relation::Equal, mu2 * s_tau * s_omega * b_norm, mu2 * s_tau * s_omega * x_norm_sq);
    push("chain_endpoints", Relation::LessEqual, x_norm_sq, mu2 * s_tau * s_omega * x_norm_sq);
    // Dividing out ||x||^2 uses the absolute verdict slack of certify().
    const double rhs = mu > 0.0 ? 1.0 / mu2 : std::numeric_limits<double>::infinity();
    steps.push_back({"cancel_norm", Relation::LessEqual, rhs, s_tau * s_omega, rhs <= s_tau * s_omega + kVerdictSlack});
    return steps;
}

inline bool all_steps_hold(const std::vector<ProofStep>& steps) {
    return std::all_of(steps.begin(), steps.end(), [](const ProofStep& s) { return s.holds; });
}

struct Feasibility {
    bool feasible = false;
    std::optional<ModuleVector> witness;
    /// Nullity of the flattened constraint system.
    std::size_t kernel_dim = 0;
};

namespace detail {

inline std::set<std::size_t> checked_index_set(const std::vector<std::size_t>& idx, std::size_t bound,
                                               const char* what) {
    std::set<std::size_t> out;
    for (std::size_t i : idx) {
        if (i >= bound) {
            throw InputError(std::string(what) + ": index " + std::to_string(i) + " out of range [0, " +
                             std::to_string(bound) + ")");
        }
        out.insert(i);
    }
    return out;
}

/// Appends the rows of the complex-linear map vec(x) -> vec(<x, v>) to `rows`.
/// vec(x) lists, block by block, the entries of X_k = [x_1|k ... x_d|k] row-major.
inline void append_constraint_rows(const ModuleVector& v, std::vector<Eigen::RowVectorXcd>& rows, Eigen::Index cols) {
    const AlgebraShape& shape = v.shape();
    Eigen::Index offset = 0;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const auto n = static_cast<Eigen::Index>(shape.block_dim(k));
        const CMatrix vk = v.flat_block(k);
        const Eigen::Index width = vk.cols();
        // <x, v>|k (a, b) = sum_c X_k(a, c) conj(V_k(b, c))
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index bb = 0; bb < n; ++bb) {
                Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(cols);
                for (Eigen::Index c = 0; c < width; ++c) row(offset + a * width + c) = std::conj(vk(bb, c));
                rows.push_back(std::move(row));
            }
        }
        offset += n * width;
    }
}

}  // namespace detail

/// Decides whether some nonzero x has supp(theta_tau x) in `keep_tau` and
/// supp(theta_omega x) in `keep_omega`, by computing the kernel of the
/// flattened linear system <x, tau_n> = 0 (n not kept), <x, omega_m> = 0
/// (m not kept). A unit-norm witness is returned when one exists.
inline Feasibility support_pair_feasible(const ModularFrame& tau, const ModularFrame& omega,
                                         const std::vector<std::size_t>& keep_tau,
                                         const std::vector<std::size_t>& keep_omega) {
    require_same_shape(tau.shape(), omega.shape(), "support_pair_feasible");
    if (tau.dim() != omega.dim()) throw InputError("support_pair_feasible: frames live in modules of different rank");
    const auto t = detail::checked_index_set(keep_tau, tau.size(), "support_pair_feasible (tau)");
    const auto w = detail::checked_index_set(keep_omega, omega.size(), "support_pair_feasible (omega)");

    const AlgebraShape& shape = tau.shape();
    const std::size_t d = tau.dim();
    const auto cols = static_cast<Eigen::Index>(d * shape.dim());

    std::vector<Eigen::RowVectorXcd> rows;
    for (std::size_t n = 0; n < tau.size(); ++n) {
        if (!t.contains(n)) detail::append_constraint_rows(tau[n], rows, cols);
    }
    for (std::size_t m = 0; m < omega.size(); ++m) {
        if (!w.contains(m)) detail::append_constraint_rows(omega[m], rows, cols);
    }

    CVector kernel_vec;
    Feasibility out;
    if (rows.empty()) {
        out.kernel_dim = static_cast<std::size_t>(cols);
        kernel_vec = CVector::Unit(cols, 0);
    } else {
        CMatrix system(static_cast<Eigen::Index>(rows.size()), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) system.row(static_cast<Eigen::Index>(r)) = rows[r];
        Eigen::JacobiSVD<CMatrix> svd(system, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double top = sv.size() > 0 ? sv(0) : 0.0;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > kKernelTol * top) ++rank;
        }
        out.kernel_dim = static_cast<std::size_t>(cols - rank);
        if (out.kernel_dim > 0) kernel_vec = svd.matrixV().col(rank);
    }
    out.feasible = out.kernel_dim > 0;
    if (!out.feasible) return out;

    std::vector<CMatrix> flat;
    Eigen::Index offset = 0;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const auto n = static_cast<Eigen::Index>(shape.block_dim(k));
        const Eigen::Index width = n * static_cast<Eigen::Index>(d);
        CMatrix xk(n, width);
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index c = 0; c < width; ++c) xk(a, c) = kernel_vec(offset + a * width + c);
        }
        flat.push_back(std::move(xk));
        offset += n * width;
    }
    ModuleVector witness = ModuleVector::from_flat(shape, d, flat);
    witness *= 1.0 / module_norm(witness);
    out.witness = std::move(witness);
    return out;
}

enum class AuditVectorKind { Gaussian, SingleAtom, SparseSynthesis };

inline const char* to_string(AuditVectorKind k) {
    switch (k) {
        case AuditVectorKind::Gaussian: return "gaussian";
        case AuditVectorKind::SingleAtom: return "single_atom";
        case AuditVectorKind::SparseSynthesis: return "sparse_synthesis";
    }
    return "unknown";
}

struct AuditRecord {
    std::size_t trial = 0;
    AuditVectorKind kind = AuditVectorKind::Gaussian;
    UncertaintyCertificate certificate;
    bool chain_holds = false;
    std::vector<std::string> failed_steps;

    bool violation() const noexcept { return !certificate.holds() || !chain_holds; }
};

struct AuditConfig {
    AlgebraShape algebra;
    std::size_t d = 2;
    std::size_t n_tau = 2;
    std::size_t n_omega = 2;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    double rel_tol = kDefaultSparsityTol;
};

struct AuditReport {
    AuditConfig config;
    std::vector<AuditRecord> records;
    std::size_t violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    std::size_t tightest_trial = 0;
};

namespace detail {

/// x for audit trial `kind`: a Gaussian vector, a single frame atom a tau_n, or a
/// short synthesis sum over a random subset of tau.
template <class R>
ModuleVector audit_vector(AuditVectorKind kind, const ModularFrame& tau, R& rng) {
    const AlgebraShape& shape = tau.shape();
    for (int attempt = 0; attempt < 16; ++attempt) {
        ModuleVector x = ModuleVector::zero(shape, tau.dim());
        switch (kind) {
            case AuditVectorKind::Gaussian:
                x = random_vector(shape, tau.dim(), rng);
                break;
            case AuditVectorKind::SingleAtom: {
                std::uniform_int_distribution<std::size_t> pick(0, tau.size() - 1);
                const std::size_t n = pick(rng);
                x = random_element(shape, rng) * tau[n];
                break;
            }
            case AuditVectorKind::SparseSynthesis: {
                std::uniform_int_distribution<std::size_t> count(1, tau.size());
                std::vector<std::size_t> idx(tau.size());
                std::iota(idx.begin(), idx.end(), std::size_t{0});
                std::shuffle(idx.begin(), idx.end(), rng);
                idx.resize(count(rng));
                for (std::size_t n : idx) x += random_element(shape, rng) * tau[n];
                break;
            }
        }
        if (module_norm(x) > 1e-6) return x;
    }
    throw EnvironmentError("random_audit: could not draw a nonzero test vector");
}

}  // namespace detail

/// Runs `trials` independent certifications on random Parseval pairs. Trial i
/// uses its own generator derived from (seed, i), so the report depends only
/// on the configuration.
inline AuditReport random_audit(const AuditConfig& cfg) {
    if (cfg.trials == 0) throw InputError("random_audit: trials must be at least 1");
    if (cfg.d == 0) throw InputError("random_audit: d must be positive");
    if (cfg.n_tau < cfg.d || cfg.n_omega < cfg.d) {
        throw InputError("random_audit: frames need at least d vectors to span A^d");
    }
    AuditReport report;
    report.config = cfg;
    report.records.resize(cfg.trials);
    parallel_for(cfg.trials, [&](std::size_t i) {
        Rng rng = task_rng(cfg.seed, i);
        const ModularFrame tau = random_parseval_frame(cfg.algebra, cfg.d, cfg.n_tau, rng);
        const ModularFrame omega = random_parseval_frame(cfg.algebra, cfg.d, cfg.n_omega, rng);
        const auto kind = static_cast<AuditVectorKind>(i % 3);
        const ModuleVector x = detail::audit_vector(kind, tau, rng);

        AuditRecord rec;
        rec.trial = i;
        rec.kind = kind;
        rec.certificate = certify(tau, omega, x, cfg.rel_tol);
        const auto steps = proof_chain_check(tau, omega, x, cfg.rel_tol);
        for (const auto& s : steps) {
            if (!s.holds) rec.failed_steps.push_back(s.name);
        }
        rec.chain_holds = rec.failed_steps.empty();
        report.records[i] = std::move(rec);
    });
    for (const auto& rec : report.records) {
        if (rec.violation()) ++report.violations;
        if (rec.certificate.slack < report.min_slack) {
            report.min_slack = rec.certificate.slack;
            report.tightest_trial = rec.trial;
        }
    }
    return report;
}

}  // namespace ncup
