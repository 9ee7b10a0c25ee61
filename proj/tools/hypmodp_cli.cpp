// Command-line front end: structure analysis, relation construction,
// verification, Lucas checking, and prime scans with machine-readable
// output.
//
// Exit codes: 0 pass, 1 verification failure, 2 bad input,
// 3 hypothesis violation (including p | d).

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <hypmodp/hypmodp.hpp>

namespace {

using namespace hypmodp;

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_bad_input = 2;
constexpr int exit_hypothesis = 3;

struct BadInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HypothesisFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t max_order_cap()
{
    if (const char* env = std::getenv("HYPMODP_MAX_ORDER")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
    }
    return 200000;
}

std::vector<Rational> parse_rational_list(const std::string& text)
{
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(Rational::parse(item));
    if (out.empty())
        throw BadInput("empty parameter list");
    return out;
}

ParamSystem parse_system(const std::string& alpha, const std::string& beta)
{
    try {
        return ParamSystem::create(parse_rational_list(alpha), parse_rational_list(beta));
    } catch (const std::invalid_argument& e) {
        throw BadInput(e.what());
    }
}

PrimeContext make_context(const ParamSystem& sys, std::uint64_t p)
{
    if (!is_prime(p) || p >= max_modulus)
        throw BadInput("prime out of range or not prime: " + std::to_string(p));
    if (sys.d % p == 0)
        throw HypothesisFailure("p divides d = " + std::to_string(sys.d));
    return PrimeContext(sys, p);
}

std::string render_params(const ParamSystem& sys)
{
    std::string s = "alpha = (";
    for (std::size_t i = 0; i < sys.alpha.size(); ++i)
        s += (i ? ", " : "") + sys.alpha[i].str();
    s += "), beta = (";
    for (std::size_t i = 0; i < sys.beta.size(); ++i)
        s += (i ? ", " : "") + sys.beta[i].str();
    return s + ")";
}

json analyze_json(const PrimeContext& ctx, bool extend_p4)
{
    StructureSets sets = admissible_set(ctx);
    PPropertyReport prop = check_p_property(ctx, extend_p4);
    json j = structure_report_json(ctx, sets, prop);
    j["phi_d"] = ctx.sys.phi_d;
    json orbits = json::array();
    auto orbit_of = [&](const Rational& g) {
        json entry;
        entry["start"] = g.str();
        json chain = json::array();
        if (vp(g, ctx.p) == 0 && g > Rational(0) && g <= Rational(1)) {
            DworkOrbit orb = dwork_orbit(g, ctx.p);
            for (auto& x : orb.orbit)
                chain.push_back(x.str());
            entry["period"] = orb.period;
        }
        entry["orbit"] = chain;
        return entry;
    };
    for (auto& g : ctx.sys.alpha)
        orbits.push_back(orbit_of(g));
    for (auto& g : ctx.sys.beta)
        orbits.push_back(orbit_of(g));
    j["dwork_orbits"] = orbits;
    return j;
}

void print_analysis(std::ostream& os, const PrimeContext& ctx, const json& j)
{
    os << render_params(ctx.sys) << "\n";
    os << "p = " << ctx.p << ", d = " << j["d"] << ", phi(d) = " << j["phi_d"]
       << ", l = " << j["l"] << "\n";
    os << "E = " << j["E"].dump() << "\n";
    os << "S = " << j["S"].dump() << "\n";
    const json& prop = j["p_property"];
    os << "P property: ";
    for (auto key : {"P1", "P2", "P3", "P4", "P5", "unit_params"})
        os << key << "=" << (prop[key].get<bool>() ? "ok" : "FAIL") << " ";
    os << "\n";
    for (auto& v : prop["violations"])
        os << "  violation: " << v.get<std::string>() << "\n";
    os << "Dwork orbits:\n";
    for (auto& entry : j["dwork_orbits"]) {
        os << "  " << entry["start"].get<std::string>() << " -> [";
        bool first = true;
        for (auto& x : entry["orbit"]) {
            os << (first ? "" : ", ") << x.get<std::string>();
            first = false;
        }
        os << "]\n";
    }
}

Annihilator construct_annihilator(const PrimeContext& ctx, bool force, std::size_t check_order)
{
    PPropertyReport prop = check_p_property(ctx);
    if (!prop.all() && !force) {
        std::string what = "P property fails";
        if (!prop.violations.empty())
            what += ": " + prop.violations.front();
        throw HypothesisFailure(what);
    }
    BuildOptions opt;
    opt.check_order = check_order;
    opt.strict_bounds = !force;
    try {
        RelationSystem system = build_system(ctx, opt);
        return eliminate(system, opt);
    } catch (const std::domain_error& e) {
        throw HypothesisFailure(e.what());
    }
}

void print_annihilator(std::ostream& os, const Annihilator& ann)
{
    os << "relation: f = ";
    for (std::size_t k = 0; k < ann.terms.size(); ++k) {
        if (k)
            os << " + ";
        os << "R" << k + 1 << "(z) * f^(p^" << ann.terms[k].frob_exp << ")";
    }
    os << "  (mod " << ann.p << ")\n";
    for (std::size_t k = 0; k < ann.terms.size(); ++k) {
        const FpRatFn& r = ann.terms[k].ratfn;
        os << "R" << k + 1 << ": height " << r.height() << ", z_shift " << r.z_shift()
           << "\n  num = " << r.num().str() << "\n  den = " << r.den().str() << "\n";
    }
    for (auto& e : ann.provenance.events)
        os << "note: " << e << "\n";
}

int cmd_analyze(const std::string& alpha, const std::string& beta, std::uint64_t p,
                bool extend_p4, bool as_json)
{
    PrimeContext ctx = make_context(parse_system(alpha, beta), p);
    json j = analyze_json(ctx, extend_p4);
    if (as_json)
        std::cout << j.dump(2) << "\n";
    else
        print_analysis(std::cout, ctx, j);
    return exit_ok;
}

int cmd_construct(const std::string& alpha, const std::string& beta, std::uint64_t p, bool force,
                  std::size_t check_order, const std::string& out_path, bool as_json)
{
    PrimeContext ctx = make_context(parse_system(alpha, beta), p);
    Annihilator ann = construct_annihilator(ctx, force, check_order);
    BoundAudit audit = bound_audit(ann, ctx);
    json j = annihilator_to_json(ann);
    j["bound_audit"] = bound_audit_json(audit);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out)
            throw BadInput("cannot write " + out_path);
        out << j.dump(2) << "\n";
    }
    if (as_json)
        std::cout << j.dump(2) << "\n";
    else {
        print_annihilator(std::cout, ann);
        std::cout << "degree bound " << (audit.degree_ok ? "ok" : "VIOLATED") << ", height bound "
                  << (audit.height_ok ? "ok" : "VIOLATED") << "\n";
        if (!out_path.empty())
            std::cout << "wrote " << out_path << "\n";
    }
    return exit_ok;
}

int cmd_verify(const std::string& alpha, const std::string& beta, std::uint64_t p,
               const std::string& relation_path, std::size_t order, bool as_json)
{
    PrimeContext ctx = make_context(parse_system(alpha, beta), p);
    std::ifstream in(relation_path);
    if (!in)
        throw BadInput("cannot read " + relation_path);
    Annihilator ann;
    try {
        json j = json::parse(in);
        ann = annihilator_from_json(j);
    } catch (const std::exception& e) {
        throw BadInput(std::string("bad relation file: ") + e.what());
    }
    if (order == 0)
        order = default_verify_order(ann, max_order_cap());
    order = std::min(order, max_order_cap());
    VerificationReport rep = verify_relation(ctx, ann, order);
    if (as_json)
        std::cout << verification_report_json(rep).dump(2) << "\n";
    else
        std::cout << (rep.pass ? "PASS" : "FAIL") << ": " << rep.detail
                  << " (cleared denominator degree " << rep.cleared_denominator_degree << ")\n";
    return rep.pass ? exit_ok : exit_verify_failed;
}

int cmd_lucas(const std::string& alpha, const std::string& beta, std::uint64_t p,
              std::size_t order, bool as_json)
{
    PrimeContext ctx = make_context(parse_system(alpha, beta), p);
    order = std::min(order ? order : 20000, max_order_cap());
    VerificationReport rep = lucas_check(ctx, order);
    if (as_json)
        std::cout << verification_report_json(rep).dump(2) << "\n";
    else
        std::cout << (rep.pass ? "PASS" : "FAIL") << ": " << rep.detail << "\n";
    return rep.pass ? exit_ok : exit_verify_failed;
}

int cmd_scan(const std::string& alpha, const std::string& beta, std::uint64_t pmin,
             std::uint64_t pmax, bool with_construct, bool with_verify, std::size_t order,
             bool parallel, bool as_json)
{
    ParamSystem sys = parse_system(alpha, beta);
    std::vector<std::uint64_t> primes = primes_in_range(pmin, pmax);

    auto run_one = [&](std::uint64_t p) -> json {
        json row;
        row["p"] = p;
        if (sys.d % p == 0) {
            row["status"] = "p divides d";
            return row;
        }
        try {
            PrimeContext ctx(sys, p);
            row["l"] = ctx.l;
            CheckReport integral =
                integrality_scan(ctx, std::min<std::size_t>(2000, max_order_cap()));
            row["integral_scan_ok"] = integral.pass;
            if (!integral.pass) {
                row["status"] = "not p-integral";
                return row;
            }
            StructureSets sets = admissible_set(ctx);
            PPropertyReport prop = check_p_property(ctx);
            row["E"] = sets.E;
            row["S"] = sets.S;
            row["p_property_ok"] = prop.all();
            if (!prop.violations.empty())
                row["violations"] = prop.violations;
            bool constructible = prop.all();
            row["status"] = constructible ? "constructible" : "hypothesis fails";
            if (constructible && with_construct) {
                Annihilator ann = construct_annihilator(ctx, false, 0);
                row["terms"] = ann.terms.size();
                row["max_height"] = ann.max_height();
                row["max_frob_exp"] = ann.max_frob_exp();
                if (with_verify) {
                    std::size_t n = order ? order : default_verify_order(ann, max_order_cap());
                    n = std::min(n, max_order_cap());
                    VerificationReport rep = verify_relation(ctx, ann, n);
                    row["verified"] = rep.pass;
                    row["verify_order"] = rep.checked_order;
                }
            }
        } catch (const std::exception& e) {
            row["status"] = std::string("error: ") + e.what();
        }
        return row;
    };

    std::vector<json> rows(primes.size());
    if (parallel) {
        std::vector<std::future<json>> futures;
        futures.reserve(primes.size());
        for (auto p : primes)
            futures.push_back(std::async(std::launch::async, run_one, p));
        for (std::size_t i = 0; i < futures.size(); ++i)
            rows[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < primes.size(); ++i)
            rows[i] = run_one(primes[i]);
    }

    if (as_json) {
        json out = json::array();
        for (auto& r : rows)
            out.push_back(r);
        std::cout << out.dump(2) << "\n";
    } else {
        for (auto& r : rows) {
            std::cout << "p=" << r["p"].get<std::uint64_t>() << "  "
                      << r["status"].get<std::string>();
            if (r.contains("S"))
                std::cout << "  S=" << r["S"].dump() << "  l=" << r["l"];
            if (r.contains("terms"))
                std::cout << "  terms=" << r["terms"] << "  height=" << r["max_height"];
            if (r.contains("verified"))
                std::cout << "  verified=" << (r["verified"].get<bool>() ? "yes" : "NO");
            std::cout << "\n";
        }
    }
    bool any_verify_failed = false;
    for (auto& r : rows)
        if (r.contains("verified") && !r["verified"].get<bool>())
            any_verify_failed = true;
    return any_verify_failed ? exit_verify_failed : exit_ok;
}

int cmd_selftest()
{
    bool all_ok = true;
    auto run = [&](const std::string& name, auto&& fn) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            std::cout << name << ": exception: " << e.what() << "\n";
        }
        all_ok = all_ok && ok;
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    };

    ParamSystem lucas =
        ParamSystem::create({Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(1)});
    run("dwork orbit of 1/9 at p=17 has period 2",
        [&] { return dwork_orbit(Rational(1, 9), 17).period == 2; });
    run("contiguity recurrence, 2F1(1/2,1/2;1)",
        [&] { return recurrence_check(lucas, 60).pass; });
    run("construct+verify 2F1(1/2,1/2;1) at p=3", [&] {
        PrimeContext ctx(lucas, 3);
        Annihilator ann = eliminate(build_system(ctx));
        return verify_relation(ctx, ann, 2000).pass;
    });
    run("construct+verify 2F1(1/2,1/2;1) at p=5", [&] {
        PrimeContext ctx(lucas, 5);
        Annihilator ann = eliminate(build_system(ctx));
        return verify_relation(ctx, ann, 2000).pass && lucas_check(ctx, 2000, &ann).pass;
    });
    return all_ok ? exit_ok : exit_verify_failed;
}

} // namespace

namespace {

int run(int argc, char** argv)
{
    CLI::App app{"algebraic relations of hypergeometric series modulo p"};
    app.require_subcommand(1);

    std::string alpha, beta, relation_path, out_path;
    std::uint64_t prime = 0, prime_min = 0, prime_max = 0;
    std::size_t order = 0, check_order = 0;
    bool as_json = false, force = false, parallel = false, extend_p4 = false;
    bool with_construct = false, with_verify = false;

    auto add_params = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "comma-separated numerator parameters, e.g. \"1/3,1/2\"")
            ->required();
        cmd->add_option("--beta", beta,
                        "comma-separated denominator parameters; the trailing 1 may be omitted")
            ->required();
        cmd->add_flag("--json", as_json, "machine-readable output");
    };

    CLI::App* analyze =
        app.add_subcommand("analyze", "structure sets, orbits, P-property verdicts");
    add_params(analyze);
    analyze->add_option("--prime", prime, "prime p")->required();
    analyze->add_flag("--p4-extended", extend_p4, "also evaluate (P4) at k = l+1");

    CLI::App* construct = app.add_subcommand("construct", "build the annihilating relation");
    add_params(construct);
    construct->add_option("--prime", prime, "prime p")->required();
    construct->add_option("--out", out_path, "write the relation as JSON to this file");
    construct->add_option("--check-order", check_order,
                          "truncation order for build-time identity checks (default 4p^l)");
    construct->add_flag("--force", force, "attempt construction even if the hypotheses fail");

    CLI::App* verify = app.add_subcommand("verify", "check a relation file against the series");
    add_params(verify);
    verify->add_option("--prime", prime, "prime p")->required();
    verify->add_option("--relation", relation_path, "relation JSON file")->required();
    verify->add_option("--order", order, "truncation order (default: derived from the relation)");

    CLI::App* lucas = app.add_subcommand("lucas", "test the p^l-Lucas property");
    add_params(lucas);
    lucas->add_option("--prime", prime, "prime p")->required();
    lucas->add_option("--order", order, "number of coefficients to check (default 20000)");

    CLI::App* scan = app.add_subcommand("scan", "iterate primes in a range");
    add_params(scan);
    scan->add_option("--prime-min", prime_min, "lower end of the prime range")->required();
    scan->add_option("--prime-max", prime_max, "upper end of the prime range")->required();
    scan->add_flag("--construct", with_construct, "construct a relation for constructible primes");
    scan->add_flag("--verify", with_verify, "verify each constructed relation");
    scan->add_option("--order", order, "verification order");
    scan->add_flag("--parallel", parallel, "run primes concurrently");

    app.add_subcommand("selftest", "run a built-in smoke test");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_bad_input;
    }

    try {
        if (analyze->parsed())
            return cmd_analyze(alpha, beta, prime, extend_p4, as_json);
        if (construct->parsed())
            return cmd_construct(alpha, beta, prime, force, check_order, out_path, as_json);
        if (verify->parsed())
            return cmd_verify(alpha, beta, prime, relation_path, order, as_json);
        if (lucas->parsed())
            return cmd_lucas(alpha, beta, prime, order, as_json);
        if (scan->parsed())
            return cmd_scan(alpha, beta, prime_min, prime_max, with_construct, with_verify, order,
                            parallel, as_json);
        return cmd_selftest();
    } catch (const HypothesisFailure& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return exit_hypothesis;
    } catch (const BadInput& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return exit_bad_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return exit_bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_verify_failed;
    }
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (...) {
        std::cerr << "fatal error\n";
        return exit_verify_failed;
    }
}
