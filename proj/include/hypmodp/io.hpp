#pragma once

#include <string>

#include <json.hpp>

#include "structure.hpp"
#include "verification.hpp"

namespace hypmodp {

using json = nlohmann::json;

// FpPoly: {"p": int, "terms": [[exp, coeff], ...]}, exponents ascending.
inline json poly_to_json(const FpPoly& f)
{
    json terms = json::array();
    for (auto& [e, c] : f.terms())
        terms.push_back(json::array({e, c}));
    return json{{"p", f.prime()}, {"terms", terms}};
}

inline FpPoly poly_from_json(const json& j)
{
    FpPoly f(j.at("p").get<std::uint64_t>());
    for (auto& t : j.at("terms"))
        f.set(t.at(0).get<std::uint64_t>(), t.at(1).get<std::uint64_t>());
    return f;
}

// FpRatFn: {"num": poly, "den": poly, "z_shift": int}.
inline json ratfn_to_json(const FpRatFn& r)
{
    return json{{"num", poly_to_json(r.num())},
                {"den", poly_to_json(r.den())},
                {"z_shift", r.z_shift()}};
}

inline FpRatFn ratfn_from_json(const json& j)
{
    return FpRatFn(poly_from_json(j.at("num")), poly_from_json(j.at("den")),
                   j.at("z_shift").get<std::int64_t>());
}

inline json annihilator_to_json(const Annihilator& ann)
{
    json terms = json::array();
    for (auto& t : ann.terms)
        terms.push_back(json{{"frob_exp", t.frob_exp}, {"ratfn", ratfn_to_json(t.ratfn)}});
    json prov{{"events", ann.provenance.events},
              {"stage_heights", ann.provenance.stage_heights},
              {"bounds_ok", ann.provenance.bounds_ok}};
    return json{{"p", ann.p}, {"l", ann.l}, {"terms", terms}, {"provenance", prov}};
}

inline Annihilator annihilator_from_json(const json& j)
{
    Annihilator ann;
    ann.p = j.at("p").get<std::uint64_t>();
    ann.l = j.at("l").get<std::uint64_t>();
    for (auto& t : j.at("terms"))
        ann.terms.push_back(
            {t.at("frob_exp").get<std::uint64_t>(), ratfn_from_json(t.at("ratfn"))});
    if (j.contains("provenance")) {
        const json& prov = j.at("provenance");
        if (prov.contains("events"))
            ann.provenance.events = prov.at("events").get<std::vector<std::string>>();
        if (prov.contains("stage_heights"))
            ann.provenance.stage_heights =
                prov.at("stage_heights").get<std::vector<std::uint64_t>>();
        if (prov.contains("bounds_ok"))
            ann.provenance.bounds_ok = prov.at("bounds_ok").get<bool>();
    }
    return ann;
}

inline json p_property_to_json(const PPropertyReport& rep)
{
    return json{{"P1", rep.p1},       {"P2", rep.p2},
                {"P3", rep.p3},       {"P4", rep.p4},
                {"P5", rep.p5},       {"unit_params", rep.unit_params},
                {"violations", rep.violations}};
}

// Structure report: {"E": [...], "S": [...], "p_property": {...}, "l": .., "d": ..}.
inline json structure_report_json(const PrimeContext& ctx, const StructureSets& sets,
                                  const PPropertyReport& prop)
{
    return json{{"E", sets.E},
                {"S", sets.S},
                {"p_property", p_property_to_json(prop)},
                {"l", ctx.l},
                {"d", ctx.sys.d}};
}

inline json verification_report_json(const VerificationReport& rep)
{
    json j{{"pass", rep.pass},
           {"checked_order", rep.checked_order},
           {"cleared_denominator_degree", rep.cleared_denominator_degree},
           {"measured_heights", rep.measured_heights},
           {"detail", rep.detail}};
    if (rep.first_failure_index)
        j["first_failure_index"] = *rep.first_failure_index;
    return j;
}

inline json bound_audit_json(const BoundAudit& audit)
{
    return json{{"degree_ok", audit.degree_ok},
                {"height_ok", audit.height_ok},
                {"measured_degree", audit.measured_degree},
                {"degree_bound", audit.degree_bound},
                {"measured_height", audit.measured_height},
                {"case_height_bound", audit.case_height_bound},
                {"global_height_bound", audit.global_height_bound}};
}

} // namespace hypmodp
