#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "loopforms/derham.hpp"
#include "loopforms/errors.hpp"
#include "loopforms/hochschild.hpp"
#include "loopforms/rees.hpp"
#include "loopforms/report.hpp"
#include "loopforms/util.hpp"

using namespace loopforms;

namespace {

struct Options {
    std::string subcommand;
    std::string input;
    std::string algebra_name;
    std::string module_name;
    int max_weight = 4;
    int min_degree = -4;
    int max_degree = 0;
    int n = -1;
    int truncation = 8;
    long seed = 0;
    int count = 20;
    std::string compare;
    std::string parallel = "off";
    std::string format = "text";
    bool timing = false;

    bool parallel_on() const { return parallel == "on"; }
    cli::Format fmt() const { return format == "json" ? cli::Format::Json : cli::Format::Text; }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Error::Kind::Operational, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

alg::ParsedFile load(const Options& opt)
{
    return alg::parse_file(slurp(opt.input));
}

const alg::GCAlgebra& pick_algebra(const alg::ParsedFile& f, const Options& opt)
{
    if (f.algebras.empty())
        throw Error(Error::Kind::Operational, "no algebra in " + opt.input);
    if (opt.algebra_name.empty())
        return f.algebras.front();
    for (const auto& a : f.algebras)
        if (a.name == opt.algebra_name)
            return a;
    throw Error(Error::Kind::Operational, "no algebra named " + opt.algebra_name);
}

dr::Connection pick_module(const alg::ParsedFile& f, const Options& opt)
{
    if (f.modules.empty())
        throw Error(Error::Kind::Operational, "no module in " + opt.input);
    const alg::ConnectionDecl* decl = nullptr;
    if (opt.module_name.empty())
        decl = &f.modules.front();
    else
        for (const auto& m : f.modules)
            if (m.name == opt.module_name)
                decl = &m;
    if (!decl)
        throw Error(Error::Kind::Operational, "no module named " + opt.module_name);
    for (const auto& a : f.algebras)
        if (a.name == decl->base)
            return dr::connection_from_decl(*decl, a);
    throw Error(Error::Kind::Operational, "module base algebra missing");
}

nlohmann::ordered_json echo_request(const Options& opt)
{
    nlohmann::ordered_json r;
    r["subcommand"] = opt.subcommand;
    if (!opt.input.empty())
        r["input"] = opt.input;
    if (!opt.algebra_name.empty())
        r["algebra"] = opt.algebra_name;
    if (!opt.module_name.empty())
        r["module"] = opt.module_name;
    r["max_weight"] = opt.max_weight;
    r["min_degree"] = opt.min_degree;
    r["max_degree"] = opt.max_degree;
    if (opt.n >= 0)
        r["n"] = opt.n;
    if (opt.subcommand == "ext-exterior")
        r["truncation"] = opt.truncation;
    if (opt.subcommand == "rees-check" || opt.subcommand == "shear")
        r["seed"] = opt.seed;
    if (opt.subcommand == "shear")
        r["count"] = opt.count;
    if (!opt.compare.empty())
        r["compare"] = opt.compare;
    r["parallel"] = opt.parallel;
    r["format"] = opt.format;
    return r;
}

void validate_window(const Options& opt)
{
    if (opt.max_weight < 0)
        throw Error(Error::Kind::Operational, "--max-weight must be >= 0");
    if (opt.min_degree > opt.max_degree)
        throw Error(Error::Kind::Operational, "empty degree window");
}

/* ---- subcommand bodies; each fills tables/verdicts and returns ok ---- */

bool run_tables(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    const alg::GCAlgebra& a = pick_algebra(f, opt);
    if (opt.subcommand == "hh") {
        doc.tables = hoch::hh_table(a, opt.max_weight, opt.min_degree, opt.max_degree, true,
                                    opt.parallel_on());
        if (a.is_polynomial())
            doc.verdicts.push_back({"backend_agreement", {true, "bar and Koszul dims agree"}});
    } else if (opt.subcommand == "hc") {
        doc.tables = hoch::hc_table(a, opt.max_weight, opt.min_degree, opt.max_degree, opt.parallel_on());
    } else if (opt.subcommand == "hcneg") {
        doc.tables =
            hoch::hc_negative_table(a, opt.max_weight, opt.min_degree, opt.max_degree, opt.parallel_on());
    } else {
        doc.tables = hoch::hp_table(a, opt.max_weight, opt.min_degree, opt.max_degree, opt.parallel_on());
    }
    return true;
}

bool run_derham(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    dr::OmegaAlgebra o = dr::kaehler(pick_algebra(f, opt));
    for (int p = 0; p <= o.nvars; ++p) {
        dr::DerhamResult res = dr::derham_cohomology(o, p, opt.max_weight);
        for (const auto& r : res.rows)
            doc.tables.push_back({r.p, r.weight, r.dim});
        if (!res.sliced && p == 0)
            doc.verdicts.push_back(
                {"weight_filtration", {true, "base not weight-graded; aggregate dims at weight -1"}});
    }
    return true;
}

bool run_hkr_check(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    const alg::GCAlgebra& a = pick_algebra(f, opt);
    bool all_ok = true;
    int n_lo = opt.n >= 0 ? opt.n : 0;
    int n_hi = opt.n >= 0 ? opt.n : std::min(a.n_even(), opt.max_weight);
    for (int n = n_lo; n <= n_hi; ++n) {
        bool ok = hoch::hkr_is_quasi_iso(a, n, opt.max_weight);
        doc.verdicts.push_back({"hkr_quasi_iso_n" + std::to_string(n),
                                {ok, ok ? "slotwise bijection on homology" : "rank defect"}});
        all_ok = all_ok && ok;
    }
    return all_ok;
}

bool run_b_check(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    const alg::GCAlgebra& a = pick_algebra(f, opt);
    int n = opt.n >= 0 ? opt.n : 0;
    hoch::BScalar s = hoch::verify_B_is_deRham(a, n, opt.max_weight);
    doc.verdicts.push_back({"b_is_derham", {s.verified, "scalar=" + s.scalar.str()}});
    return s.verified;
}

bool run_omega_d(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    dr::OmegaAlgebra o = dr::kaehler(pick_algebra(f, opt));
    dr::OmegaD od = dr::build_omega_d(o);
    bool ok = od.confluence_check(opt.max_weight);
    doc.verdicts.push_back(
        {"confluence", {ok, ok ? "delta^2 = 0 and [delta,-] = d on all basis monomials" : "failed"}});
    return ok;
}

bool run_curvature(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    dr::Connection c = pick_module(f, opt);
    auto R = dr::curvature(c);
    bool flat = true;
    for (const auto& row : R)
        for (const auto& e : row)
            if (!e.is_zero())
                flat = false;
    doc.verdicts.push_back({"flat", {flat, ""}});
    try {
        dr::CurvatureCharacter ch = dr::central_character(c);
        doc.verdicts.push_back({"central", {true, ""}});
        doc.verdicts.push_back({"omega", {true, c.omega.omega.element_str(ch.omega2)}});
        doc.verdicts.push_back({"closed", {dr::form_d(c.omega, ch.omega2).is_zero(), ""}});
    } catch (const NotCentral& e) {
        doc.verdicts.push_back({"central", {false, e.what()}});
    }
    return true;  // curvature reports facts; it has no failure mode of its own
}

bool run_flat(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    dr::Connection c = pick_module(f, opt);
    dr::FlatDescent fd = dr::flat_descend(c);
    std::string witness;
    if (!fd.flat)
        for (int i = 0; i < c.rank; ++i)
            for (int j = 0; j < c.rank; ++j)
                if (!fd.obstruction[i][j].is_zero() && witness.empty())
                    witness = "R[" + std::to_string(i) + "][" + std::to_string(j) +
                              "] = " + c.omega.omega.element_str(fd.obstruction[i][j]);
    doc.verdicts.push_back({"flat", {fd.flat, witness}});
    return fd.flat;
}

bool run_character(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    dr::Connection c = pick_module(f, opt);
    bool ok = true;
    try {
        dr::CurvatureCharacter ch = dr::central_character(c);
        doc.verdicts.push_back({"central", {true, c.omega.omega.element_str(ch.omega2)}});
        doc.verdicts.push_back({"closed", {dr::form_d(c.omega, ch.omega2).is_zero(), ""}});
        if (!opt.compare.empty()) {
            alg::AlgebraElement other = alg::parse_element(c.omega.omega, opt.compare);
            auto alpha = dr::character_equivalent(c.omega, ch.omega2, other, opt.max_weight);
            if (alpha)
                doc.verdicts.push_back(
                    {"equivalent", {true, "alpha = " + c.omega.omega.element_str(*alpha)}});
            else {
                doc.verdicts.push_back({"equivalent", {false, "no primitive within the weight cap"}});
                ok = false;
            }
        }
    } catch (const NotCentral& e) {
        doc.verdicts.push_back({"central", {false, e.what()}});
        ok = false;
    }
    return ok;
}

bool run_rees_check(const Options& opt, cli::ResultDocument& doc)
{
    using namespace loopforms::rees;
    bool ok = true;

    ReesElement tdx = rees_normal_form(1, {{1, 0}, {0, 0}});
    bool sym_ok = symbol_str(symbol(tdx)) == "x*xi";
    doc.verdicts.push_back({"symbol_tDx", {sym_ok, symbol_str(symbol(tdx))}});
    ok = ok && sym_ok;

    bool loc_ok = localize_t(tdx) == weyl_normal_form(1, {{true, 0}, {false, 0}});
    doc.verdicts.push_back({"localize_tDx", {loc_ok, weyl_str(localize_t(tdx))}});
    ok = ok && loc_ok;

    SplitMix64 rng(uint64_t(opt.seed));
    bool hom_ok = true, weight_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        int n = int(rng.range(1, 2));
        auto mk = [&]() {
            std::vector<int> x(n), td(n);
            for (int i = 0; i < n; ++i) {
                x[i] = int(rng.range(0, 3));
                td[i] = int(rng.range(0, 3));
            }
            return rees_term(n, x, td, int(rng.range(0, 1)), Rational(rng.range(-3, 3)));
        };
        ReesElement a = mk(), b = mk();
        if (!(symbol(rees_mul(a, b)) == symbol_mul(symbol(a), symbol(b))))
            hom_ok = false;
        if (!(localize_t(rees_mul(a, b)) == weyl_mul(localize_t(a), localize_t(b))))
            hom_ok = false;
        ReesElement abm = rees_mul(a, b);
        if (!a.is_zero() && !b.is_zero() && !abm.is_zero() &&
            abm.weight() != a.weight() + b.weight())
            weight_ok = false;
    }
    doc.verdicts.push_back({"homomorphisms_seeded", {hom_ok, "50 pairs, order <= 3, n <= 2"}});
    doc.verdicts.push_back({"weight_additive", {weight_ok, ""}});
    return ok && hom_ok && weight_ok;
}

bool run_ext_exterior(const Options& opt, cli::ResultDocument& doc)
{
    auto dims = rees::ext_over_exterior(opt.truncation);
    for (int d = 0; d < int(dims.size()); ++d)
        doc.tables.push_back({d, d / 2, dims[d]});
    return true;
}

bool run_koszul_dmod(const Options& opt, cli::ResultDocument& doc)
{
    alg::ParsedFile f = load(opt);
    dr::Connection c = pick_module(f, opt);
    rees::DModuleAction act = rees::koszul_dual_dmodule(c, opt.max_weight + 2);
    bool weyl_ok = act.verify_weyl_relations(std::min(5, opt.max_weight + 1));
    doc.verdicts.push_back({"weyl_relations", {weyl_ok, "[D_i, x_j] = delta_ij on monomials"}});
    auto g = act.recovered_gamma();
    bool rt_ok = true;
    for (int i = 0; i < c.rank; ++i)
        for (int j = 0; j < c.rank; ++j)
            if (!alg::e_sub(g[i][j], c.gamma[i][j]).is_zero())
                rt_ok = false;
    doc.verdicts.push_back({"round_trip", {rt_ok, "recovered connection matrix"}});
    return weyl_ok && rt_ok;
}

bool run_shear(const Options& opt, cli::ResultDocument& doc)
{
    SplitMix64 rng(uint64_t(opt.seed));
    bool ok = true;
    for (int trial = 0; trial < opt.count; ++trial) {
        /* small direct sum of intervals and lone slots */
        cx::BigradedComplex c;
        {
            std::map<cx::Slot, int> dims;
            std::vector<std::pair<cx::Slot, std::pair<int, int>>> arrows;
            for (int k = 0; k < 5; ++k) {
                int d = int(rng.range(-3, 2)), w = int(rng.range(0, 2));
                if (rng.range(0, 2) == 0)
                    dims[{d, w}]++;
                else {
                    int i = dims[{d, w}]++;
                    int j = dims[{d + 1, w}]++;
                    arrows.push_back({{d, w}, {i, j}});
                }
            }
            for (auto& [s, n] : dims) {
                std::vector<std::string> labels;
                for (int i = 0; i < n; ++i)
                    labels.push_back("v" + std::to_string(i));
                c.set_slot(s, labels);
            }
            std::map<cx::Slot, std::vector<lin::Entry>> ts;
            for (auto& [s, ij] : arrows)
                ts[s].push_back({ij.second, ij.first, Rational(1 + rng.range(0, 2))});
            for (auto& [s, es] : ts)
                c.set_diff(s, lin::SparseMatrix::from_triplets(c.dim({s.deg + 1, s.weight}),
                                                               c.dim(s), es));
            c.validate();
        }
        for (int n : {-2, 2}) {
            cx::BigradedComplex sc = cx::shear(c, n);
            if (!(cx::shear(sc, -n) == c))
                ok = false;
            for (const auto& [slot, labels] : c.basis)
                if (cx::homology(sc, {slot.deg - n * slot.weight, slot.weight}).dim !=
                    cx::homology(c, slot).dim)
                    ok = false;
        }
    }
    doc.verdicts.push_back(
        {"shear_invariance", {ok, std::to_string(opt.count) + " seeded complexes, n in {-2, 2}"}});
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    Options opt;
    CLI::App app{"loopforms: exact Hochschild/cyclic/de Rham/Rees computations over Q"};
    app.set_version_flag("--version", cli::kVersion);
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool needs_file) {
        if (needs_file)
            sub->add_option("input", opt.input, "path to a .ring file")->required();
        sub->add_option("--max-weight", opt.max_weight, "poly-weight truncation (default 4)");
        sub->add_option("--min-degree", opt.min_degree, "lowest reported degree (default -4)");
        sub->add_option("--max-degree", opt.max_degree, "highest reported degree (default 0)");
        sub->add_option("--algebra", opt.algebra_name, "algebra name (default: first in file)");
        sub->add_option("--module", opt.module_name, "module name (default: first in file)");
        sub->add_option("--format", opt.format, "text|json (default text)")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--parallel", opt.parallel, "on|off (default off)")
            ->check(CLI::IsMember({"on", "off"}));
        sub->add_option("--seed", opt.seed, "seed for randomized property subcommands");
        sub->add_flag("--timing", opt.timing, "include timing in the output");
    };

    for (const char* name : {"hh", "hc", "hcneg", "hp", "derham", "omega-d", "curvature", "flat"})
        add_common(app.add_subcommand(name), true);
    {
        CLI::App* sub = app.add_subcommand("hkr-check");
        add_common(sub, true);
        sub->add_option("--n", opt.n, "form degree (default: all up to the variable count)");
    }
    {
        CLI::App* sub = app.add_subcommand("b-check");
        add_common(sub, true);
        sub->add_option("--n", opt.n, "form degree (default 0)");
    }
    {
        CLI::App* sub = app.add_subcommand("character");
        add_common(sub, true);
        sub->add_option("--compare", opt.compare, "2-form expression to test for equivalence");
    }
    add_common(app.add_subcommand("rees-check"), false);
    {
        CLI::App* sub = app.add_subcommand("ext-exterior");
        add_common(sub, false);
        sub->add_option("--truncation", opt.truncation, "top Ext degree (default 8)");
    }
    add_common(app.add_subcommand("koszul-dmod"), true);
    {
        CLI::App* sub = app.add_subcommand("shear");
        add_common(sub, false);
        sub->add_option("--count", opt.count, "number of seeded complexes (default 20)");
    }

    CLI11_PARSE(app, argc, argv);
    opt.subcommand = app.get_subcommands().front()->get_name();

    cli::ResultDocument doc;
    doc.request = echo_request(opt);
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        validate_window(opt);
        if (opt.subcommand == "hh" || opt.subcommand == "hc" || opt.subcommand == "hcneg" ||
            opt.subcommand == "hp")
            ok = run_tables(opt, doc);
        else if (opt.subcommand == "derham")
            ok = run_derham(opt, doc);
        else if (opt.subcommand == "hkr-check")
            ok = run_hkr_check(opt, doc);
        else if (opt.subcommand == "b-check")
            ok = run_b_check(opt, doc);
        else if (opt.subcommand == "omega-d")
            ok = run_omega_d(opt, doc);
        else if (opt.subcommand == "curvature")
            ok = run_curvature(opt, doc);
        else if (opt.subcommand == "flat")
            ok = run_flat(opt, doc);
        else if (opt.subcommand == "character")
            ok = run_character(opt, doc);
        else if (opt.subcommand == "rees-check")
            ok = run_rees_check(opt, doc);
        else if (opt.subcommand == "ext-exterior")
            ok = run_ext_exterior(opt, doc);
        else if (opt.subcommand == "koszul-dmod")
            ok = run_koszul_dmod(opt, doc);
        else if (opt.subcommand == "shear")
            ok = run_shear(opt, doc);
    } catch (const Error& e) {
        if (opt.fmt() == cli::Format::Json) {
            nlohmann::ordered_json j;
            j["error"] = {{"kind", e.kind == Error::Kind::Verification ? "verification" : "operational"},
                          {"message", e.what()}};
            j["version"] = cli::kVersion;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return e.kind == Error::Kind::Verification ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    auto t1 = std::chrono::steady_clock::now();
    if (opt.timing)
        doc.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

    std::cout << cli::emit(doc, opt.fmt());
    return ok ? 0 : 3;
}
