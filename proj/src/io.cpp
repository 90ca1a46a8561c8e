#include "mqc/io.hpp"

#include <fstream>
#include <sstream>

namespace mqc {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

void expect_kind(const Json& j, const char* kind) {
    const Json& k = field(j, "kind");
    if (!k.is_string() || k.get<std::string>() != kind) throw ParseError(std::string("expected kind '") + kind + "'");
}

double number(const Json& j) {
    if (!j.is_number()) throw ParseError("expected a number");
    return j.get<double>();
}

std::vector<std::size_t> counts(const Json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<std::size_t> out;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<long long>() <= 0) throw ParseError(std::string(what) + " entries must be positive integers");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

std::string digits_key(const std::vector<std::size_t>& d) {
    std::string s;
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s;
}

template <class F>
auto parse_guard(F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

}  // namespace

Json to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const RMatrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix cmatrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix must be a non-empty array of rows");
    const std::size_t r = j.size();
    if (!j[0].is_array()) throw ParseError("matrix rows must be arrays");
    const std::size_t c = j[0].size();
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (!j[i].is_array() || j[i].size() != c) throw ParseError("ragged matrix");
        for (std::size_t k = 0; k < c; ++k) {
            const Json& e = j[i][k];
            if (e.is_number()) m(i, k) = cplx(e.get<double>());
            else if (e.is_array() && e.size() == 2) m(i, k) = cplx(number(e[0]), number(e[1]));
            else throw ParseError("matrix entries must be numbers or [re, im] pairs");
        }
    }
    return m;
}

RMatrix rmatrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix must be a non-empty array of rows");
    const std::size_t r = j.size();
    if (!j[0].is_array()) throw ParseError("matrix rows must be arrays");
    const std::size_t c = j[0].size();
    RMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (!j[i].is_array() || j[i].size() != c) throw ParseError("ragged matrix");
        for (std::size_t k = 0; k < c; ++k) m(i, k) = number(j[i][k]);
    }
    return m;
}

Json to_json(const DensityState& s) { return {{"kind", "density"}, {"dims", s.dims()}, {"matrix", to_json(s.matrix())}}; }

Json to_json(const GaussianState& g) {
    return {{"kind", "gaussian"}, {"modes_per_party", g.modes_per_party()}, {"cov", to_json(g.cov())}, {"mean", g.mean()}};
}

Json to_json(const MeasurementAssemblage& ma) {
    Json parties = Json::array();
    for (const auto& p : ma.parties) {
        Json settings = Json::array();
        for (const auto& povm : p.settings) {
            Json s = Json::array();
            for (const auto& m : povm) s.push_back(to_json(m));
            settings.push_back(std::move(s));
        }
        parties.push_back({{"dim", p.dim}, {"settings", std::move(settings)}});
    }
    return {{"kind", "measurements"}, {"parties", std::move(parties)}};
}

Json to_json(const StateAssemblage& sa) {
    Json elements = Json::object();
    for (std::size_t x = 0; x < sa.joint_settings(); ++x)
        for (std::size_t a = 0; a < sa.joint_outcomes(); ++a)
            elements[digits_key(decode_mixed(a, sa.outcomes)) + ";" + digits_key(decode_mixed(x, sa.settings))] = to_json(sa.at(a, x));
    return {{"kind", "assemblage"}, {"trusted_dims", sa.trusted_dims}, {"settings", sa.settings}, {"outcomes", sa.outcomes}, {"elements", elements}};
}

DensityState density_from_json(const Json& j) {
    return parse_guard([&] {
        expect_kind(j, "density");
        return DensityState(counts(field(j, "dims"), "dims"), cmatrix_from_json(field(j, "matrix")));
    });
}

GaussianState gaussian_from_json(const Json& j) {
    return parse_guard([&] {
        expect_kind(j, "gaussian");
        std::vector<double> mean;
        const Json& mj = field(j, "mean");
        if (!mj.is_array()) throw ParseError("mean must be an array");
        for (const auto& v : mj) mean.push_back(number(v));
        return GaussianState(counts(field(j, "modes_per_party"), "modes_per_party"), rmatrix_from_json(field(j, "cov")), std::move(mean));
    });
}

MeasurementAssemblage measurements_from_json(const Json& j) {
    return parse_guard([&] {
        expect_kind(j, "measurements");
        MeasurementAssemblage ma;
        const Json& parties = field(j, "parties");
        if (!parties.is_array()) throw ParseError("parties must be an array");
        for (const auto& pj : parties) {
            PartyMeasurements pm;
            const Json& d = field(pj, "dim");
            if (!d.is_number_integer() || d.get<long long>() <= 0) throw ParseError("dim must be a positive integer");
            pm.dim = d.get<std::size_t>();
            const Json& settings = field(pj, "settings");
            if (!settings.is_array()) throw ParseError("settings must be an array");
            for (const auto& sj : settings) {
                if (!sj.is_array()) throw ParseError("each setting must be an array of POVM elements");
                std::vector<CMatrix> povm;
                for (const auto& mj : sj) povm.push_back(cmatrix_from_json(mj));
                pm.settings.push_back(std::move(povm));
            }
            ma.parties.push_back(std::move(pm));
        }
        ma.validate();
        return ma;
    });
}

StateAssemblage assemblage_from_json(const Json& j) {
    return parse_guard([&] {
        expect_kind(j, "assemblage");
        StateAssemblage sa;
        sa.trusted_dims = counts(field(j, "trusted_dims"), "trusted_dims");
        sa.settings = counts(field(j, "settings"), "settings");
        sa.outcomes = counts(field(j, "outcomes"), "outcomes");
        if (sa.settings.size() != sa.outcomes.size()) throw ParseError("settings and outcomes must have the same length");
        const Json& el = field(j, "elements");
        if (!el.is_object()) throw ParseError("elements must be an object keyed by \"a;x\"");
        const std::size_t d = sa.trusted_dim();
        sa.elements.assign(sa.joint_settings() * sa.joint_outcomes(), CMatrix());
        std::size_t filled = 0;
        for (auto it = el.begin(); it != el.end(); ++it) {
            const std::string& key = it.key();
            const auto semi = key.find(';');
            if (semi == std::string::npos) throw ParseError("element key '" + key + "' lacks ';'");
            auto parse_digits = [&](const std::string& text, const std::vector<std::size_t>& radix) {
                std::vector<std::size_t> out;
                std::stringstream ss(text);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    std::size_t used = 0;
                    unsigned long v = 0;
                    try {
                        v = std::stoul(tok, &used);
                    } catch (const std::exception&) {
                        throw ParseError("element key '" + key + "' is not numeric");
                    }
                    if (used != tok.size()) throw ParseError("element key '" + key + "' is not numeric");
                    out.push_back(v);
                }
                if (out.size() != radix.size()) throw ParseError("element key '" + key + "' has the wrong number of parties");
                for (std::size_t i = 0; i < out.size(); ++i)
                    if (out[i] >= radix[i]) throw ParseError("element key '" + key + "' is out of range");
                return encode_mixed(out, radix);
            };
            const std::size_t a = parse_digits(key.substr(0, semi), sa.outcomes);
            const std::size_t x = parse_digits(key.substr(semi + 1), sa.settings);
            CMatrix m = cmatrix_from_json(it.value());
            if (m.rows() != d || m.cols() != d) throw ParseError("element '" + key + "' does not match trusted_dims");
            if (sa.at(a, x).rows() == 0) ++filled;
            sa.at(a, x) = std::move(m);
        }
        if (filled != sa.elements.size()) throw ParseError("assemblage is missing elements");
        sa.validate();
        return sa;
    });
}

AnyState state_from_json(const Json& j) {
    const Json& k = field(j, "kind");
    if (k == "density") return density_from_json(j);
    if (k == "gaussian") return gaussian_from_json(j);
    throw ParseError("state kind must be 'density' or 'gaussian'");
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
}

}  // namespace mqc
