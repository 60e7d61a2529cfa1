// Command-line front end: compile gates to circuit files, verify them, print
// ancilla-count tables and decompositions, and reproduce the worked examples.
// Exit codes: 0 success, 2 input error, 3 planning/verification failure,
// 4 I/O error.
#pragma once

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "cvqc/circuit.hpp"
#include "cvqc/weyl.hpp"

namespace cvqc::cli {

using circuit::CircuitIR;
using strategies::GateSpec;
using strategies::Plan;
using weyl::WeylOp;

struct Options {
    std::string gate = "custom";
    std::string poly;
    int N = 0;
    std::string strategy = "1";
    std::string sign_mode = "assume-positive";
    std::string out;
    std::uint64_t seed = 0;
    int trials = 20;
    double tolerance = 1e-8;
};

inline GateSpec resolve_gate(const Options& opt) {
    if (opt.gate == "custom") {
        if (opt.poly.empty())
            throw std::invalid_argument("custom gates need --poly");
        Poly V = parse_poly(opt.poly);
        if (V.coeffs_depend_on_s())
            throw std::invalid_argument("gate polynomials must not contain outcome symbols");
        return GateSpec::custom(V);
    }
    if (opt.gate == "cphase" || opt.gate == "cnz") {
        if (opt.N < 3) throw std::invalid_argument("--N (>= 3) is required for this preset");
        return GateSpec::preset(opt.gate, opt.N);
    }
    return GateSpec::preset(opt.gate);
}

inline std::string report_header(const Options& opt) {
    std::ostringstream os;
    os << "verification: seed=" << opt.seed << " trials=" << opt.trials
       << " tolerance=" << opt.tolerance << "\n";
    return os.str();
}

inline int write_file(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot open '" << path << "' for writing\n";
        return 4;
    }
    f << text;
    if (!f.good()) {
        err << "error: write to '" << path << "' failed\n";
        return 4;
    }
    return 0;
}

inline circuit::json verification_json(const circuit::Report& rep) {
    circuit::json entries = circuit::json::array();
    for (auto& e : rep.entries)
        entries.push_back({{"name", e.name}, {"value", e.value}, {"tolerance", e.tolerance},
                           {"pass", e.pass}});
    return {{"entries", std::move(entries)}, {"all_pass", rep.all_pass()}};
}

inline int cmd_compile(const Options& opt, std::ostream& out, std::ostream& err) {
    GateSpec gate = resolve_gate(opt);
    Plan plan;
    if (gate.V.is_zero()) {
        // wrapper-only circuit
        plan.strategy = "modewise";
        plan.gate = gate;
        plan.gaussian_modes = gate.modes;
        plan.sign_mode = opt.sign_mode;
    } else {
        plan = strategies::with_sign_mode(strategies::plan(gate, opt.strategy), opt.sign_mode);
    }
    CircuitIR ir = circuit::build_circuit(plan, opt.seed);
    circuit::Report rep = circuit::verify_circuit(ir, opt.trials, opt.seed);

    out << report_header(opt);
    out << "gate " << gate.name << ": V = " << gate.V.str() << "\n";
    out << "strategy " << plan.strategy << ", sign mode " << plan.sign_mode << "\n";
    out << "ancilla modes: " << ir.non_gaussian_modes() << " non-Gaussian + "
        << ir.gaussian_modes << " Gaussian (squeezed)";
    if (plan.sign_mode == "duplicate")
        out << "; with sign duplication: " << plan.total_non_gaussian() << " non-Gaussian";
    out << "\n";
    for (auto& a : ir.ancillas) {
        out << "  step " << a.step << " (" << a.modes << " modes): f = " << a.f.str() << "\n";
        for (auto& nul : a.nullifiers) out << "    " << nul << "\n";
    }
    for (auto& e : rep.entries)
        out << "  check " << e.name << ": " << (e.pass ? "ok" : "FAIL") << " (" << e.value
            << " < " << e.tolerance << ")\n";

    if (!opt.out.empty()) {
        int rc = write_file(opt.out, circuit::serialize_text(ir), err);
        if (rc) return rc;
        circuit::json report;
        report["command"] = "compile";
        report["gate"] = gate.name;
        report["strategy"] = plan.strategy;
        report["sign_mode"] = plan.sign_mode;
        report["seed"] = opt.seed;
        report["trials"] = opt.trials;
        report["tolerance"] = opt.tolerance;
        report["counts"] = {{"non_gaussian", ir.non_gaussian_modes()},
                            {"gaussian", ir.gaussian_modes},
                            {"sign_mode_total", plan.total_non_gaussian()}};
        report["verification"] = verification_json(rep);
        rc = write_file(opt.out + ".report.json", report.dump(2) + "\n", err);
        if (rc) return rc;
        out << "wrote " << opt.out << " and " << opt.out << ".report.json\n";
    } else {
        out << circuit::render_text(ir);
    }
    return rep.all_pass() ? 0 : 3;
}

inline int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err) {
    (void)err;
    GateSpec gate = resolve_gate(opt);
    Plan plan = strategies::with_sign_mode(strategies::plan(gate, opt.strategy), opt.sign_mode);
    CircuitIR ir = circuit::build_circuit(plan, opt.seed);
    circuit::Report rep = circuit::verify_circuit(ir, opt.trials, opt.seed);
    out << report_header(opt);
    for (auto& e : rep.entries)
        out << "check " << e.name << ": " << (e.pass ? "ok" : "FAIL") << " (" << e.value << " < "
            << e.tolerance << ")\n";
    out << (rep.all_pass() ? "all checks passed\n" : "verification failed\n");
    return rep.all_pass() ? 0 : 3;
}

inline int cmd_count(const Options& opt, std::ostream& out, std::ostream& err) {
    (void)err;
    GateSpec gate = resolve_gate(opt);
    Plan plan = strategies::with_sign_mode(strategies::plan(gate, opt.strategy), opt.sign_mode);
    out << "gate " << gate.name << ", strategy " << plan.strategy << "\n";
    out << "non-Gaussian ancilla modes (constructed): " << plan.constructed_non_gaussian() << "\n";
    if (plan.sign_mode == "duplicate")
        out << "non-Gaussian ancilla modes (sign-duplicated): " << plan.total_non_gaussian()
            << "\n";
    out << "Gaussian (squeezed) ancilla modes: " << plan.gaussian_modes << "\n";
    if (plan.reference_count)
        out << "closed-form reference count: " << *plan.reference_count
            << (i64(plan.constructed_non_gaussian()) == *plan.reference_count
                    ? " (matches)"
                    : " (differs from construction; both reported)")
            << "\n";
    if (gate.modes == 1 && plan.sign_mode == "duplicate")
        out << "single-mode duplicate reference: "
            << strategies::duplicate_reference_single_mode(gate.order) << "\n";
    return 0;
}

inline int cmd_table(int nmin, int nmax, std::ostream& out) {
    auto rows = strategies::count_table(nmin, nmax);
    out << "multilinear-gate ancilla counts (computed vs reference values)\n";
    out << "  N | I(recursion) ref | I(constructed) ref(II) | II(computed) ref | III ref\n";
    bool note_mismatch = false;
    for (auto& r : rows) {
        auto flag = [](i64 a, i64 b) {
            return b < 0 ? std::string("") : (a == b ? std::string(" ok") : std::string(" !!"));
        };
        out << "  " << r.N << " | " << r.strategy1_recursion << " vs " << r.ref1
            << flag(r.strategy1_recursion, r.ref1) << " | " << r.strategy1_constructed << " vs "
            << r.ref2 << flag(r.strategy1_constructed, r.ref2) << " | " << r.strategy2_computed
            << " vs " << r.ref2 << flag(r.strategy2_computed, r.ref2) << " | " << r.strategy3
            << " vs " << r.ref3 << flag(r.strategy3, r.ref3) << "\n";
        if (r.strategy2_computed != r.ref2 && r.ref2 >= 0) note_mismatch = true;
    }
    if (note_mismatch) {
        out << "note: no counting procedure derived from the construction reproduces the\n"
               "      reference strategy-II column; the constructed strategy-I counts match\n"
               "      it exactly, which suggests the reference rows are transposed.\n";
    }
    return 0;
}

inline int cmd_decompose(const Options& opt, const std::string& kind, std::ostream& out) {
    GateSpec gate = resolve_gate(opt);
    if (kind == "waring") {
        decompose::WaringDecomp w;
        if (gate.name == "custom")
            w = decompose::waring_monomial(gate.V.terms().begin()->first);
        else if (gate.name.rfind("cnz", 0) == 0)
            w = decompose::waring_known("cnz", gate.order);
        else if (gate.name.rfind("cphase", 0) == 0)
            w = decompose::waring_known("cphase", gate.order);
        else
            w = decompose::waring_known(gate.name);
        out << gate.V.str() << " =";
        bool first = true;
        for (auto& t : w.terms) {
            Poly lin(w.n);
            for (int j = 0; j < w.n; ++j) {
                Mono m(w.n, 0);
                m[j] = 1;
                lin.add_term(std::move(m), t.form[j]);
            }
            out << (first ? " " : " + ") << "(" << t.coeff.str() << ")*(" << lin.str() << ")^"
                << w.order;
            first = false;
        }
        out << "\n";
        out << "terms: " << w.terms.size() << "\n";
        return 0;
    }
    if (kind != "chow") throw std::invalid_argument("--kind must be chow or waring");
    decompose::ChowDecomp d = decompose::chow_general(gate.V);
    out << gate.V.str() << " = " << d.str() << "\n";
    out << "terms: " << d.crank() << ", listed factors: " << d.brank() << "\n";
    return 0;
}

inline int cmd_decompose_hamiltonian(const std::string& optext, std::ostream& out) {
    WeylOp H = weyl::parse_weyl(optext);
    if (!H.is_hermitian())
        throw std::invalid_argument("the operator must be Hermitian "
                                    "(include both orderings of each term)");
    auto split = weyl::split_hamiltonian(H);
    out << "H = " << H.str() << "\n";
    int n = H.modes();
    for (auto& term : split) {
        if (term.kind != weyl::TermKind::AntiComm) continue;
        weyl::ExprTree tree = weyl::anticomm_decompose(term.xm, term.pm, CRat(term.weight));
        out << "(" << term.weight.str() << ")*{x^M, p^N} with M=(";
        for (std::size_t i = 0; i < term.xm.size(); ++i) out << (i ? "," : "") << term.xm[i];
        out << "), N=(";
        for (std::size_t i = 0; i < term.pm.size(); ++i) out << (i ? "," : "") << term.pm[i];
        out << "):\n  " << tree.str() << "\n";
        if (!weyl::verify_decomposition(term.xm, term.pm))
            throw std::runtime_error("internal: decomposition failed verification");
    }
    auto tokens = weyl::trotter_sequence(H, Rational(1), 1);
    out << "trotter tokens (single step, unit time): " << tokens.size() << "\n";
    WeylOp regrouped = weyl::seq_generator_wrapped(n, tokens);
    out << "generator regrouping: " << ((regrouped - H).is_zero() ? "exact" : "NONZERO") << "\n";
    return 0;
}

inline int cmd_examples(std::ostream& out) {
    struct Row {
        std::string gate, strategy;
        int ng, gauss;
    };
    std::vector<Row> rows{
        {"cubic-qnd", "modewise", 2, 2}, {"cubic-qnd", "3", 3, 2},
        {"toffoli", "modewise", 3, 3},   {"toffoli", "3", 4, 3},
        {"small-example", "1", 6, 2},    {"small-example", "2", 5, 2},
        {"small-example", "3", 6, 2},
    };
    bool all_ok = true;
    for (auto& r : rows) {
        GateSpec g = GateSpec::preset(r.gate);
        Plan p = strategies::plan(g, r.strategy);
        bool counts_ok = p.constructed_non_gaussian() == r.ng && p.gaussian_modes == r.gauss;
        double res = p.reduction_residual();
        bool ok = counts_ok && res < 1e-8;
        all_ok = all_ok && ok;
        out << (ok ? "ok   " : "FAIL ") << r.gate << " strategy " << r.strategy << ": "
            << p.constructed_non_gaussian() << "+" << p.gaussian_modes
            << " modes, reduction residual " << res << "\n";
    }
    for (int N = 4; N <= 6; ++N) {
        Plan p = strategies::plan(GateSpec::preset("cphase", N), "1");
        bool ok = p.constructed_non_gaussian() == 2 * (N - 2);
        all_ok = all_ok && ok;
        out << (ok ? "ok   " : "FAIL ") << "cphase(" << N << ") strategy 1: "
            << p.constructed_non_gaussian() << " non-Gaussian modes\n";
    }
    out << (all_ok ? "all examples reproduced\n" : "example reproduction FAILED\n");
    return all_ok ? 0 : 3;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"compiler for measurement-based continuous-variable gate implementations"};
    app.require_subcommand(1);

    Options opt;
    auto add_gate_flags = [&opt](CLI::App* cmd) {
        cmd->add_option("--gate", opt.gate,
                        "gate preset (cubic-qnd, toffoli, small-example, cphase, cnz) or custom");
        cmd->add_option("--poly", opt.poly, "gate polynomial for --gate custom");
        cmd->add_option("--N", opt.N, "order for the cphase/cnz presets");
        cmd->add_option("--strategy", opt.strategy, "ancilla strategy: modewise, 1, 2 or 3");
        cmd->add_option("--sign-mode", opt.sign_mode, "assume-positive or duplicate");
        cmd->add_option("--seed", opt.seed, "seed for sampled verification");
        cmd->add_option("--trials", opt.trials, "sample count for verification");
        cmd->add_option("--tolerance", opt.tolerance, "verification tolerance");
    };

    auto* compile = app.add_subcommand("compile", "compile a gate to a circuit file");
    add_gate_flags(compile);
    compile->add_option("--out", opt.out, "circuit file path");

    auto* verify = app.add_subcommand("verify", "re-run the verification report for a gate plan");
    add_gate_flags(verify);

    auto* count = app.add_subcommand("count", "print ancilla-mode counts for a plan");
    add_gate_flags(count);

    int nmin = 3, nmax = 8;
    auto* table = app.add_subcommand("table", "multilinear-gate ancilla count table");
    table->add_option("--nmin", nmin, "lowest order");
    table->add_option("--nmax", nmax, "highest order");

    std::string kind = "chow";
    auto* decomp = app.add_subcommand("decompose", "print a Chow or Waring decomposition");
    add_gate_flags(decomp);
    decomp->add_option("--kind", kind, "chow or waring");

    std::string optext;
    auto* dh = app.add_subcommand("decompose-hamiltonian",
                                  "decompose a Hermitian x/p operator into quadrature-gate "
                                  "commutators");
    dh->add_option("--op", optext, "operator text, e.g. \"x1*p1 + p1*x1\"")->required();

    auto* examples = app.add_subcommand("examples", "reproduce the worked examples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (compile->parsed()) return cmd_compile(opt, out, err);
        if (verify->parsed()) return cmd_verify(opt, out, err);
        if (count->parsed()) return cmd_count(opt, out, err);
        if (table->parsed()) return cmd_table(nmin, nmax, out);
        if (decomp->parsed()) return cmd_decompose(opt, kind, out);
        if (dh->parsed()) return cmd_decompose_hamiltonian(optext, out);
        if (examples->parsed()) return cmd_examples(out);
    } catch (const strategies::PlanError& e) {
        err << "plan error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace cvqc::cli
