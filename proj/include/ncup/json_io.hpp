#pragma once

// JSON encodings:
//   AlgebraElement  {"shape":[n1,...],"blocks":[[[[re,im],...],...],...]}   (row-major per block)
//   ModuleVector    {"shape":[...],"entries":[AlgebraElement,...]}
//   frame file      {"algebra":[...],"d":d,"vectors":[ModuleVector,...],"parseval":bool}
// plus certificate and report records. Parse errors carry a JSON-pointer-like
// location such as "vectors[2].entries[0].blocks[1][0][1]".

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncup/frames.hpp"
#include "ncup/ncft.hpp"
#include "ncup/uncertainty.hpp"

namespace ncup {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void json_fail(const std::string& where, const std::string& what) {
    throw InputError(where + ": " + what);
}

inline const Json& require_field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) json_fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) json_fail(where, std::string("missing field \"") + key + "\"");
    return *it;
}

inline std::size_t require_size(const Json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) json_fail(where, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

}  // namespace detail

inline Json to_json(const AlgebraShape& s) {
    Json out = Json::array();
    for (std::size_t n : s.block_dims()) out.push_back(n);
    return out;
}

inline AlgebraShape shape_from_json(const Json& j, const std::string& where = "shape") {
    if (!j.is_array() || j.empty()) detail::json_fail(where, "expected a nonempty array of block sizes");
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::size_t n = detail::require_size(j[i], where + "[" + std::to_string(i) + "]");
        if (n == 0) detail::json_fail(where + "[" + std::to_string(i) + "]", "block size must be positive");
        dims.push_back(n);
    }
    return AlgebraShape(std::move(dims));
}

inline Json to_json(const AlgebraElement& a) {
    Json blocks = Json::array();
    for (const auto& b : a.blocks()) {
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index c = 0; c < b.cols(); ++c) row.push_back(Json::array({b(r, c).real(), b(r, c).imag()}));
            rows.push_back(std::move(row));
        }
        blocks.push_back(std::move(rows));
    }
    return Json{{"shape", to_json(a.shape())}, {"blocks", std::move(blocks)}};
}

inline AlgebraElement element_from_json(const Json& j, const std::string& where = "element") {
    const AlgebraShape shape = shape_from_json(detail::require_field(j, "shape", where), where + ".shape");
    const Json& blocks = detail::require_field(j, "blocks", where);
    if (!blocks.is_array() || blocks.size() != shape.num_blocks()) {
        detail::json_fail(where + ".blocks", "expected " + std::to_string(shape.num_blocks()) + " blocks");
    }
    std::vector<CMatrix> out;
    for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const std::string bw = where + ".blocks[" + std::to_string(k) + "]";
        const auto n = shape.block_dim(k);
        const Json& rows = blocks[k];
        if (!rows.is_array() || rows.size() != n) detail::json_fail(bw, "expected " + std::to_string(n) + " rows");
        CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) {
            const std::string rw = bw + "[" + std::to_string(r) + "]";
            if (!rows[r].is_array() || rows[r].size() != n) detail::json_fail(rw, "expected " + std::to_string(n) + " entries");
            for (std::size_t c = 0; c < n; ++c) {
                const Json& z = rows[r][c];
                if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
                    detail::json_fail(rw + "[" + std::to_string(c) + "]", "expected [re, im]");
                }
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(z[0].get<double>(), z[1].get<double>());
            }
        }
        out.push_back(std::move(m));
    }
    return AlgebraElement(shape, std::move(out));
}

inline Json to_json(const ModuleVector& x) {
    Json entries = Json::array();
    for (const auto& e : x.entries()) entries.push_back(to_json(e));
    return Json{{"shape", to_json(x.shape())}, {"entries", std::move(entries)}};
}

inline ModuleVector vector_from_json(const Json& j, const std::string& where = "vector") {
    const AlgebraShape shape = shape_from_json(detail::require_field(j, "shape", where), where + ".shape");
    const Json& entries = detail::require_field(j, "entries", where);
    if (!entries.is_array() || entries.empty()) detail::json_fail(where + ".entries", "expected a nonempty array");
    std::vector<AlgebraElement> out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string ew = where + ".entries[" + std::to_string(i) + "]";
        AlgebraElement e = element_from_json(entries[i], ew);
        if (e.shape() != shape) detail::json_fail(ew + ".shape", "does not match vector shape " + shape.to_string());
        out.push_back(std::move(e));
    }
    return ModuleVector(shape, std::move(out));
}

struct FrameFile {
    ModularFrame frame;
    /// The advisory flag as written in the file.
    bool parseval_flag = false;
    /// Result of re-checking the flag on load (tolerance 1e-8).
    bool parseval_verified = false;
};

inline Json frame_to_json(const ModularFrame& f, bool parseval) {
    Json vectors = Json::array();
    for (const auto& v : f.vectors()) vectors.push_back(to_json(v));
    return Json{{"algebra", to_json(f.shape())}, {"d", f.dim()}, {"vectors", std::move(vectors)}, {"parseval", parseval}};
}

inline FrameFile frame_from_json(const Json& j, const std::string& where = "frame") {
    const AlgebraShape shape = shape_from_json(detail::require_field(j, "algebra", where), where + ".algebra");
    const std::size_t d = detail::require_size(detail::require_field(j, "d", where), where + ".d");
    if (d == 0) detail::json_fail(where + ".d", "must be positive");
    const Json& vectors = detail::require_field(j, "vectors", where);
    if (!vectors.is_array() || vectors.empty()) detail::json_fail(where + ".vectors", "expected a nonempty array");
    std::vector<ModuleVector> out;
    for (std::size_t n = 0; n < vectors.size(); ++n) {
        const std::string vw = where + ".vectors[" + std::to_string(n) + "]";
        ModuleVector v = vector_from_json(vectors[n], vw);
        if (v.shape() != shape) detail::json_fail(vw + ".shape", "does not match frame algebra " + shape.to_string());
        if (v.size() != d) detail::json_fail(vw + ".entries", "expected " + std::to_string(d) + " entries");
        out.push_back(std::move(v));
    }
    bool flag = false;
    if (auto it = j.find("parseval"); it != j.end()) {
        if (!it->is_boolean()) detail::json_fail(where + ".parseval", "expected a boolean");
        flag = it->get<bool>();
    }
    ModularFrame frame(std::move(out));
    const bool verified = is_parseval(frame, kDefaultParsevalTol);
    return FrameFile{std::move(frame), flag, verified};
}

inline Json to_json(const UncertaintyCertificate& c) {
    return Json{{"s_tau", c.s_tau},
                {"s_omega", c.s_omega},
                {"mu", c.mu},
                {"product_lhs", c.product_lhs},
                {"additive_lhs", c.additive_lhs},
                {"rhs", c.rhs},
                {"product_holds", c.product_holds},
                {"additive_holds", c.additive_holds},
                {"slack", c.slack}};
}

inline UncertaintyCertificate certificate_from_json(const Json& j, const std::string& where = "certificate") {
    UncertaintyCertificate c;
    auto num = [&](const char* key) {
        const Json& v = detail::require_field(j, key, where);
        if (!v.is_number()) detail::json_fail(where + "." + key, "expected a number");
        return v.get<double>();
    };
    auto flag = [&](const char* key) {
        const Json& v = detail::require_field(j, key, where);
        if (!v.is_boolean()) detail::json_fail(where + "." + key, "expected a boolean");
        return v.get<bool>();
    };
    c.s_tau = detail::require_size(detail::require_field(j, "s_tau", where), where + ".s_tau");
    c.s_omega = detail::require_size(detail::require_field(j, "s_omega", where), where + ".s_omega");
    c.mu = num("mu");
    c.product_lhs = detail::require_size(detail::require_field(j, "product_lhs", where), where + ".product_lhs");
    c.additive_lhs = num("additive_lhs");
    c.rhs = num("rhs");
    c.product_holds = flag("product_holds");
    c.additive_holds = flag("additive_holds");
    c.slack = num("slack");
    return c;
}

inline Json to_json(const std::vector<ProofStep>& steps) {
    Json out = Json::array();
    for (const auto& s : steps) {
        out.push_back({{"step", s.name},
                       {"relation", s.relation == Relation::Equal ? "=" : "<="},
                       {"lhs", s.lhs},
                       {"rhs", s.rhs},
                       {"holds", s.holds}});
    }
    return out;
}

inline Json to_json(const std::vector<std::size_t>& idx) {
    Json out = Json::array();
    for (std::size_t i : idx) out.push_back(i);
    return out;
}

inline Json to_json(const SupportPair& s) { return Json{{"time", to_json(s.time)}, {"freq", to_json(s.freq)}}; }

inline Json to_json(const AuditRecord& r) {
    Json failed = Json::array();
    for (const auto& s : r.failed_steps) failed.push_back(s);
    return Json{{"type", "trial"},
                {"trial", r.trial},
                {"x_kind", to_string(r.kind)},
                {"certificate", to_json(r.certificate)},
                {"chain_holds", r.chain_holds},
                {"failed_steps", std::move(failed)},
                {"violation", r.violation()}};
}

inline Json audit_summary_json(const AuditReport& rep) {
    const auto& c = rep.config;
    return Json{{"type", "summary"},
                {"algebra", to_json(c.algebra)},
                {"d", c.d},
                {"n_tau", c.n_tau},
                {"n_omega", c.n_omega},
                {"trials", c.trials},
                {"seed", c.seed},
                {"rel_tol", c.rel_tol},
                {"violations", rep.violations},
                {"min_slack", rep.min_slack},
                {"tightest_trial", rep.tightest_trial}};
}

inline Json to_json(const TaoResult& r) {
    Json violations = Json::array();
    for (const auto& v : r.violations) violations.push_back(to_json(v));
    return Json{{"p", r.p},
                {"mode", to_string(r.mode)},
                {"pairs_checked", r.pairs_checked},
                {"min_sum", r.min_sum},
                {"witness", to_json(r.witness)},
                {"violations", std::move(violations)},
                {"threshold", r.threshold}};
}

inline Json to_json(const ConjectureReport& r) {
    Json feasible = Json::array();
    for (const auto& v : r.feasible_pairs) feasible.push_back(to_json(v));
    Json out{{"algebra", to_json(r.algebra)},
             {"p", r.p},
             {"trials", r.trials},
             {"seed", r.seed},
             {"random_checked", r.random_checked},
             {"random_min_sum", r.random_min_sum},
             {"random_violations", r.random_violations},
             {"exhaustive", r.exhaustive_ran},
             {"pairs_checked", r.pairs_checked},
             {"exhaustive_min_sum", r.exhaustive_min_sum},
             {"feasible_pairs", std::move(feasible)},
             {"reduction_disagreements", r.reduction_disagreements},
             {"delta_sum", r.delta_sum},
             {"violations", r.violations()},
             {"threshold", r.threshold}};
    out["counterexample"] = r.counterexample ? to_json(*r.counterexample) : Json(nullptr);
    out["counterexample_slice_confirmed"] =
        r.counterexample_slice_confirmed ? Json(*r.counterexample_slice_confirmed) : Json(nullptr);
    return out;
}

}  // namespace ncup
