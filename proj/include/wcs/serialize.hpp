#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wcs/matrix.hpp"
#include "wcs/scheduler.hpp"
#include "wcs/service.hpp"

namespace wcs {

using Json = nlohmann::json;

// --- extended naturals: number or "inf" -----------------------------------

inline Json save(ExtNat v) {
    if (v.is_inf()) return "inf";
    return v.get();
}

inline ExtNat load_extnat(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return ExtNat::inf();
        throw domain_error("expected a number or \"inf\"");
    }
    return ExtNat(j.get<std::uint64_t>());
}

// --- cumulative vectors: {"prefix":[...], "tail_inc":n|"inf"} ---------------

inline Json save(const CumVec& x) {
    Json pre = Json::array();
    for (const ExtNat& v : x.prefix()) pre.push_back(save(v));
    return Json{{"prefix", pre}, {"tail_inc", save(x.tail_inc())}};
}

inline CumVec load_cumvec(const Json& j) {
    std::vector<ExtNat> pre;
    for (const Json& v : j.at("prefix")) pre.push_back(load_extnat(v));
    return CumVec(std::move(pre), load_extnat(j.at("tail_inc")));
}

// --- matrices: {"g":n, "rows":[[...]], "b":n, "form":...} --------------------

inline Json save_matrix(const ExtMatrix& m, std::uint64_t b, const std::string& form) {
    Json rows = Json::array();
    for (std::size_t i = 0; i <= m.g(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j <= m.g(); ++j) row.push_back(save(m(i, j)));
        rows.push_back(row);
    }
    return Json{{"g", m.g()}, {"rows", rows}, {"b", b}, {"form", form}};
}

inline Json save(const CumulativeMatrix& m, std::uint64_t b) {
    return save_matrix(m.m, b, "cumulative");
}
inline Json save(const SpectralMatrix& s) { return save_matrix(s.s, s.b, "spectral"); }

// Either form loads into a cumulative matrix (spectral matrices are
// cumulative); spectral inputs are additionally validated against b.
inline CumulativeMatrix load_matrix(const Json& j, std::uint64_t* b_out = nullptr) {
    const std::size_t g = j.at("g").get<std::size_t>();
    ExtMatrix m(g);
    const Json& rows = j.at("rows");
    if (rows.size() != g + 1) throw domain_error("matrix: row count != g+1");
    for (std::size_t i = 0; i <= g; ++i) {
        if (rows[i].size() != g + 1) throw domain_error("matrix: column count != g+1");
        for (std::size_t jj = 0; jj <= g; ++jj) m(i, jj) = load_extnat(rows[i][jj]);
    }
    const std::uint64_t b = j.value("b", std::uint64_t(0));
    if (b_out) *b_out = b;
    if (j.value("form", std::string("cumulative")) == "spectral" && !is_spectral_matrix(m, b))
        throw representation_error("matrix: spectral form violates its invariants");
    return CumulativeMatrix(std::move(m));
}

// --- services -----------------------------------------------------------------

inline Json save(const ServiceState& s) {
    Json j;
    j["b"] = s.b;
    if (const auto* ub = std::get_if<UniformBacklog>(&s.kind)) {
        j["kind"] = "uniform_backlog";
        j["bbar"] = ub->bbar;
    } else if (const auto* ud = std::get_if<UniformDelay>(&s.kind)) {
        j["kind"] = "uniform_delay";
        j["theta"] = ud->theta;
        j["r"] = save(ud->r);
    } else if (const auto* t = std::get_if<TableService>(&s.kind)) {
        j["kind"] = "table";
        j["horizon"] = t->H;
        j["max_arrival"] = t->A;
        Json entries = Json::array();
        for (const auto& [key, psi] : t->entries)
            entries.push_back(Json{{"q_prefix", key}, {"psi", save(psi)}});
        j["entries"] = entries;
    } else if (const auto* m = std::get_if<CumulativeMatrix>(&s.kind)) {
        j["kind"] = "min_plus";
        j["matrix"] = save(*m, s.b);
    } else {
        const auto& dc = std::get<DualCurve>(s.kind);
        j["kind"] = "dual_curve";
        j["u"] = save(dc.u);
        j["v"] = save(dc.v);
    }
    return j;
}

inline ServiceState load_service(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const std::uint64_t b = j.value("b", std::uint64_t(0));
    if (kind == "uniform_backlog")
        return make_uniform_backlog(j.at("bbar").get<std::uint64_t>(), b);
    if (kind == "uniform_delay")
        return make_uniform_delay(j.at("theta").get<std::uint64_t>(), load_cumvec(j.at("r")), b);
    if (kind == "table") {
        TableService t;
        std::size_t hlen = 0;
        for (const Json& e : j.at("entries")) {
            std::vector<std::uint64_t> key; // q_prefix holds (q_1 .. q_H)
            for (const Json& v : e.at("q_prefix")) key.push_back(v.get<std::uint64_t>());
            hlen = key.size();
            t.entries.emplace(std::move(key), load_cumvec(e.at("psi")));
        }
        t.H = j.value("horizon", hlen);
        std::uint64_t amax = 0;
        for (const auto& [key, psi] : t.entries) {
            std::uint64_t prev = b;
            for (std::uint64_t v : key) {
                amax = std::max(amax, v - prev);
                prev = v;
            }
        }
        t.A = j.value("max_arrival", amax);
        return make_table(std::move(t), b);
    }
    if (kind == "min_plus") return make_min_plus(load_matrix(j.at("matrix")), b);
    if (kind == "dual_curve")
        return make_dual_curve(DualCurve{load_cumvec(j.at("u")), load_cumvec(j.at("v"))}, b);
    throw domain_error("unknown service kind: " + kind);
}

// --- systems ---------------------------------------------------------------------

inline Json save(const System& sys) {
    Json flows = Json::array();
    for (const SystemFlow& f : sys.flows)
        flows.push_back(Json{{"id", f.id}, {"service", save(f.service)}});
    return Json{{"capacity", sys.capacity}, {"horizon", sys.horizon}, {"flows", flows}};
}

inline System load_system(const Json& j) {
    System sys;
    sys.capacity = j.at("capacity").get<std::uint64_t>();
    sys.horizon = j.value("horizon", std::size_t(256));
    for (const Json& f : j.at("flows"))
        sys.flows.push_back({f.at("id").get<std::string>(), load_service(f.at("service"))});
    return sys;
}

// --- rationals, for reports ---------------------------------------------------------

inline std::string to_string(const Rat& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline std::string to_string(const ExtRat& r) { return r.inf ? "inf" : to_string(r.value); }

} // namespace wcs
