#include <fstream>
#include <set>
#include <sstream>

#include "blochobs/error.hpp"
#include "blochobs/model.hpp"

namespace blochobs {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::ParseError, where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) parse_fail(where, std::string("missing \"") + key + "\"");
    return obj.at(key);
}

Eigen::MatrixXd real_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                            const std::string& where) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
        parse_fail(where, "expected " + std::to_string(rows) + " rows");
    }
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            parse_fail(where + "[" + std::to_string(r) + "]",
                       "expected " + std::to_string(cols) + " columns");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!row[c].is_number()) {
                parse_fail(where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                           "not a number");
            }
            out(r, c) = row[c].get<double>();
        }
    }
    return out;
}

CMatrix complex_matrix(const json& obj, Eigen::Index rows, Eigen::Index cols,
                       const std::string& where) {
    const Eigen::MatrixXd re = real_matrix(require(obj, "re", where), rows, cols, where + ".re");
    const Eigen::MatrixXd im = real_matrix(require(obj, "im", where), rows, cols, where + ".im");
    CMatrix out(rows, cols);
    out.real() = re;
    out.imag() = im;
    return out;
}

json real_rows(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

int require_int(const json& obj, const char* key) {
    const json& v = require(obj, key, "model");
    if (!v.is_number_integer()) parse_fail(std::string("model.") + key, "not an integer");
    return v.get<int>();
}

}  // namespace

json complex_to_json(const CMatrix& m) {
    return json{{"re", real_rows(m.real())}, {"im", real_rows(m.imag())}};
}

CMatrix complex_from_json(const json& obj, Eigen::Index rows, Eigen::Index cols,
                          const std::string& where) {
    return complex_matrix(obj, rows, cols, where);
}

BlochModel model_from_json(const json& doc, bool strict) {
    if (!doc.is_object()) parse_fail("model", "top level must be an object");
    const int n = require_int(doc, "n");
    const int m = require_int(doc, "m");
    if (n <= 0 || m <= 0 || m >= n) parse_fail("model", "need 0 < m < n");

    Eigen::Matrix2d lattice = Eigen::Matrix2d::Identity();
    if (doc.contains("lattice")) lattice = real_matrix(doc["lattice"], 2, 2, "lattice");

    const json& hops = require(doc, "hoppings", "model");
    if (!hops.is_array()) parse_fail("hoppings", "must be a list");
    if (hops.empty()) parse_fail("hoppings", "empty hopping list");
    std::vector<Hopping> hoppings;
    std::set<std::pair<int, int>> seen;
    for (std::size_t idx = 0; idx < hops.size(); ++idx) {
        const std::string where = "hoppings[" + std::to_string(idx) + "]";
        const json& r = require(hops[idx], "R", where);
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
            parse_fail(where + ".R", "expected two integers");
        }
        LatticeVector lv{r[0].get<int>(), r[1].get<int>()};
        if (!seen.insert({lv.l1, lv.l2}).second) parse_fail(where + ".R", "duplicate lattice vector");
        hoppings.push_back({lv, complex_matrix(hops[idx], n, n, where)});
    }

    std::optional<std::array<CMatrix, 2>> tau;
    if (doc.contains("tau")) {
        const json& t = doc["tau"];
        if (!t.is_array() || t.size() != 2) parse_fail("tau", "expected two matrices");
        tau = std::array<CMatrix, 2>{complex_matrix(t[0], n, n, "tau[0]"),
                                     complex_matrix(t[1], n, n, "tau[1]")};
    }

    std::optional<TimeReversal> trs;
    if (doc.contains("trs")) {
        const json& t = doc["trs"];
        trs = TimeReversal{complex_matrix(require(t, "u_theta", "trs"), n, n, "trs.u_theta"),
                           complex_matrix(require(t, "epsilon", "trs"), m, m, "trs.epsilon")};
    }

    BlochModel model(n, m, std::move(hoppings), lattice, std::move(tau), std::move(trs));
    model.validate(strict);
    return model;
}

json model_to_json(const BlochModel& model) {
    json doc;
    doc["n"] = model.bands();
    doc["m"] = model.occupied();
    doc["lattice"] = real_rows(model.lattice());
    json hops = json::array();
    for (const auto& h : model.hoppings()) {
        json entry = complex_to_json(h.h);
        entry["R"] = {h.r.l1, h.r.l2};
        hops.push_back(std::move(entry));
    }
    doc["hoppings"] = std::move(hops);
    if (!model.periodic_gauge()) {
        doc["tau"] = {complex_to_json(model.tau_generator(0)), complex_to_json(model.tau_generator(1))};
    }
    if (model.trs()) {
        doc["trs"] = {{"u_theta", complex_to_json(model.trs()->u_theta)},
                      {"epsilon", complex_to_json(model.trs()->epsilon)}};
    }
    return doc;
}

BlochModel load_model(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
    }
    return model_from_json(doc, strict);
}

}  // namespace blochobs
