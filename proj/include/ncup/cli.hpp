#pragma once

// Subcommand driver behind the `ncup` tool. Kept free of argument parsing so
// that tests can call run() directly.
//
// Exit codes: 0 all checks hold, 1 a mathematical check failed (the report
// says whether that indicates an implementation defect or a conjecture
// counterexample), 2 invalid input.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ncup/json_io.hpp"

namespace ncup::cli {

inline constexpr const char* kToolName = "ncup";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidInput = 2 };

enum class Command { Certify, Coherence, Parsevalize, Audit, Tao, Conjecture };

struct RunConfig {
    Command command = Command::Certify;
    std::string algebra = "[1]";
    std::string frame_tau;
    std::string frame_omega;
    std::string vector;
    std::uint64_t seed = 0;
    std::size_t trials = 1000;
    double rel_tol = kDefaultSparsityTol;
    std::string mode = "exhaustive";
    std::size_t p = 2;
    std::size_t d = 2;
    std::size_t n_tau = 0;
    std::size_t n_omega = 0;
    std::size_t samples = kDefaultTaoSamples;
    bool long_run = false;
    std::optional<bool> exhaustive;
};

inline const char* command_name(Command c) {
    switch (c) {
        case Command::Certify: return "certify";
        case Command::Coherence: return "coherence";
        case Command::Parsevalize: return "parsevalize";
        case Command::Audit: return "audit";
        case Command::Tao: return "tao";
        case Command::Conjecture: return "conjecture";
    }
    return "unknown";
}

namespace detail {

inline Json read_json_file(const std::string& path, const char* flag) {
    if (path.empty()) throw InputError(std::string("--") + flag + " is required");
    std::ifstream in(path);
    if (!in) throw InputError(std::string("--") + flag + ": cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("--") + flag + " (" + path + "): malformed JSON: " + e.what());
    }
}

/// A JSON array "[1,2]", a comma list "1,2", or a path to a JSON file holding
/// either an array or an object with an "algebra" field.
inline AlgebraShape parse_algebra(const std::string& text) {
    const std::string where = "--algebra";
    if (!text.empty() && text.front() == '[') {
        try {
            return shape_from_json(Json::parse(text), where);
        } catch (const Json::parse_error& e) {
            throw InputError(where + ": malformed JSON: " + e.what());
        }
    }
    if (std::filesystem::exists(text)) {
        const Json j = read_json_file(text, "algebra");
        if (j.is_object()) return shape_from_json(ncup::detail::require_field(j, "algebra", where), where + ".algebra");
        return shape_from_json(j, where);
    }
    std::vector<std::size_t> dims;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long v = std::stol(item, &used);
            if (used != item.size() || v <= 0) throw InputError("");
            dims.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw InputError(where + ": cannot parse \"" + text + "\" as a list of block sizes");
        }
    }
    if (dims.empty()) throw InputError(where + ": no block sizes given");
    return AlgebraShape(std::move(dims));
}

inline FrameFile load_frame(const std::string& path, const char* flag) {
    return frame_from_json(read_json_file(path, flag), std::string("--") + flag + " (" + path + ")");
}

inline Json header(const RunConfig& cfg) {
    return Json{{"tool", kToolName},
                {"version", kVersion},
                {"command", command_name(cfg.command)},
                {"tolerances",
                 {{"rel_tol", cfg.rel_tol},
                  {"verdict_slack", kVerdictSlack},
                  {"parseval_tol", kDefaultParsevalTol},
                  {"inv_sqrt_tol", kDefaultInvSqrtTol},
                  {"kernel_tol", kKernelTol},
                  {"minor_tol", kMinorTol}}}};
}

/// Copies the fields of `from` into `into`, keeping the order of first appearance.
inline void merge(Json& into, const Json& from) {
    for (const auto& [k, v] : from.items()) into[k] = v;
}

inline void mark(Json& report, bool ok, const char* failure_kind) {
    report["status"] = ok ? "ok" : "failed";
    report["failure_kind"] = ok ? Json(nullptr) : Json(failure_kind);
}

inline void require_parseval(const FrameFile& f, const char* flag, const std::string& path) {
    if (!f.parseval_verified) {
        throw PreconditionError(std::string("--") + flag + " (" + path + "): frame is not Parseval (||S - I|| = " +
                                std::to_string(parseval_defect(f.frame)) + ")");
    }
}

inline int run_certify(const RunConfig& cfg, std::ostream& out) {
    const FrameFile tau = load_frame(cfg.frame_tau, "frame-tau");
    const FrameFile omega = load_frame(cfg.frame_omega, "frame-omega");
    require_parseval(tau, "frame-tau", cfg.frame_tau);
    require_parseval(omega, "frame-omega", cfg.frame_omega);
    const ModuleVector x = vector_from_json(read_json_file(cfg.vector, "vector"), "--vector (" + cfg.vector + ")");
    const UncertaintyCertificate cert = certify(tau.frame, omega.frame, x, cfg.rel_tol);
    const auto steps = proof_chain_check(tau.frame, omega.frame, x, cfg.rel_tol);
    const bool ok = cert.holds() && all_steps_hold(steps);
    Json report = header(cfg);
    report["certificate"] = to_json(cert);
    report["proof_chain"] = to_json(steps);
    mark(report, ok, "implementation_defect");
    out << report.dump() << '\n';
    return ok ? kOk : kCheckFailed;
}

inline int run_coherence(const RunConfig& cfg, std::ostream& out) {
    const FrameFile tau = load_frame(cfg.frame_tau, "frame-tau");
    const FrameFile omega = load_frame(cfg.frame_omega, "frame-omega");
    const double mu = coherence(tau.frame, omega.frame);
    Json report = header(cfg);
    report["mu"] = mu;
    report["bound"] = 1.0 / (mu * mu);
    report["tau_parseval"] = tau.parseval_verified;
    report["omega_parseval"] = omega.parseval_verified;
    mark(report, true, nullptr);
    out << report.dump() << '\n';
    return kOk;
}

inline int run_parsevalize(const RunConfig& cfg, std::ostream& out) {
    const FrameFile in = load_frame(cfg.frame_tau, "frame-tau");
    const ModularFrame f = parsevalize(in.frame);
    const double defect = parseval_defect(f);
    const bool ok = defect <= kDefaultParsevalTol;
    // Frame fields come first so the output loads as a frame file.
    Json report = frame_to_json(f, ok);
    merge(report, header(cfg));
    report["parseval_defect"] = defect;
    mark(report, ok, "implementation_defect");
    out << report.dump() << '\n';
    return ok ? kOk : kCheckFailed;
}

inline int run_audit(const RunConfig& cfg, std::ostream& out) {
    AuditConfig ac;
    ac.algebra = parse_algebra(cfg.algebra);
    ac.d = cfg.d;
    ac.n_tau = cfg.n_tau ? cfg.n_tau : cfg.d + 1;
    ac.n_omega = cfg.n_omega ? cfg.n_omega : 2 * cfg.d;
    ac.trials = cfg.trials;
    ac.seed = cfg.seed;
    ac.rel_tol = cfg.rel_tol;
    const AuditReport rep = random_audit(ac);
    for (const auto& rec : rep.records) out << to_json(rec).dump() << '\n';
    Json summary = audit_summary_json(rep);
    merge(summary, header(cfg));
    mark(summary, rep.violations == 0, "implementation_defect");
    out << summary.dump() << '\n';
    return rep.violations == 0 ? kOk : kCheckFailed;
}

inline TaoMode parse_mode(const std::string& m) {
    if (m == "exhaustive") return TaoMode::Exhaustive;
    if (m == "sampled") return TaoMode::Sampled;
    throw InputError("--mode must be exhaustive or sampled, got \"" + m + "\"");
}

inline int run_tao(const RunConfig& cfg, std::ostream& out) {
    TaoOptions opt;
    opt.mode = parse_mode(cfg.mode);
    opt.samples = cfg.samples;
    opt.seed = cfg.seed;
    opt.allow_long = cfg.long_run;
    const TaoResult r = tao_min_sum(PrimeDim(cfg.p), opt);
    const bool ok = r.violations.empty() && r.min_sum == r.p + 1;
    Json report = header(cfg);
    merge(report, to_json(r));
    report["seed"] = cfg.seed;
    mark(report, ok, "implementation_defect");
    out << report.dump() << '\n';
    return ok ? kOk : kCheckFailed;
}

inline int run_conjecture(const RunConfig& cfg, std::ostream& out) {
    const AlgebraShape shape = parse_algebra(cfg.algebra);
    const PrimeDim p(cfg.p);
    ConjectureOptions opt;
    opt.trials = cfg.trials;
    opt.seed = cfg.seed;
    opt.rel_tol = cfg.rel_tol;
    opt.exhaustive = cfg.exhaustive.value_or(cfg.p <= kConjectureExhaustiveMaxPrime);
    const ConjectureReport rep = conjecture_audit(shape, p, opt);
    Json report = header(cfg);
    merge(report, to_json(rep));
    const bool defect = rep.reduction_disagreements > 0 || rep.delta_sum != cfg.p + 1 ||
                        (rep.counterexample_slice_confirmed && !*rep.counterexample_slice_confirmed);
    const bool ok = !defect && rep.violations() == 0;
    mark(report, ok, defect ? "implementation_defect" : "conjecture_counterexample");
    out << report.dump() << '\n';
    return ok ? kOk : kCheckFailed;
}

}  // namespace detail

/// Executes one subcommand, writing its report to `out` and diagnostics to `err`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) throw InputError("--rel-tol must lie in (0, 1)");
        switch (cfg.command) {
            case Command::Certify: return detail::run_certify(cfg, out);
            case Command::Coherence: return detail::run_coherence(cfg, out);
            case Command::Parsevalize: return detail::run_parsevalize(cfg, out);
            case Command::Audit: return detail::run_audit(cfg, out);
            case Command::Tao: return detail::run_tao(cfg, out);
            case Command::Conjecture: return detail::run_conjecture(cfg, out);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const SingularOperatorError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const EnvironmentError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kInvalidInput;
}

}  // namespace ncup::cli
