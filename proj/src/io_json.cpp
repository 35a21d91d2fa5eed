#include "subquad/io_json.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace subquad::io {

namespace {

using nlohmann::json;

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector vector_from_json(const json& a) {
    Vector v(static_cast<Index>(a.size()));
    Index i = 0;
    for (const auto& x : a) v(i++) = x.get<double>();
    return v;
}

json matrix_block(const OperatorPtr& A) {
    json m;
    if (const Vector* d = A->diagonal_entries()) {
        m["diag"] = vector_to_json(*d);
    } else if (const Matrix* dm = A->dense_matrix()) {
        json rows = json::array();
        for (Index i = 0; i < dm->rows(); ++i) rows.push_back(vector_to_json(dm->row(i)));
        m["dense"] = rows;
    } else {
        throw std::invalid_argument("to_json: cannot serialize a matrix-free operator");
    }
    return m;
}

json meta_block(const std::optional<InstanceInfo>& info) {
    json m = json::object();
    if (!info) return m;
    if (info->kappa) m["kappa"] = *info->kappa;
    if (info->lambda_tr) m["lambda_tr"] = *info->lambda_tr;
    if (info->gap) m["gap"] = *info->gap;
    if (info->tau) m["tau"] = *info->tau;
    if (info->seed) m["seed"] = *info->seed;
    if (info->solution) m["solution"] = vector_to_json(*info->solution);
    if (info->f_star) m["f_star"] = *info->f_star;
    return m;
}

std::optional<InstanceInfo> meta_from_json(const json& j) {
    if (!j.contains("meta") || j["meta"].empty()) return std::nullopt;
    const json& m = j["meta"];
    InstanceInfo info;
    if (m.contains("kappa")) info.kappa = m["kappa"].get<double>();
    if (m.contains("lambda_tr")) info.lambda_tr = m["lambda_tr"].get<double>();
    if (m.contains("gap")) info.gap = m["gap"].get<double>();
    if (m.contains("tau")) info.tau = m["tau"].get<double>();
    if (m.contains("seed")) info.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("solution")) info.solution = vector_from_json(m["solution"]);
    if (m.contains("f_star")) info.f_star = m["f_star"].get<double>();
    return info;
}

template <typename Problem>
json problem_to_json(const Problem& p, const char* kind) {
    json j;
    j["kind"] = kind;
    j["matrix"] = matrix_block(p.A);
    j["b"] = vector_to_json(p.b);
    const json meta = meta_block(p.info);
    if (!meta.empty()) j["meta"] = meta;
    return j;
}

}  // namespace

std::string to_json(const CubicProblem& p) {
    json j = problem_to_json(p, "cubic");
    j["rho"] = p.rho;
    return j.dump(2);
}

std::string to_json(const TrustRegionProblem& p) {
    json j = problem_to_json(p, "tr");
    j["radius"] = p.radius;
    return j.dump(2);
}

Instance from_json(const std::string& text) {
    const json j = json::parse(text);  // throws parse_error with byte location
    const std::string kind = j.at("kind").get<std::string>();
    Vector b = vector_from_json(j.at("b"));

    const json& m = j.at("matrix");
    const bool is_diag = m.contains("diag");
    Vector diag;
    Matrix dense;
    if (is_diag) {
        diag = vector_from_json(m["diag"]);
    } else if (m.contains("dense")) {
        const json& rows = m["dense"];
        const Index n = static_cast<Index>(rows.size());
        dense.resize(n, n);
        Index i = 0;
        for (const auto& row : rows) {
            if (static_cast<Index>(row.size()) != n)
                throw std::invalid_argument("from_json: dense matrix not square");
            dense.row(i++) = vector_from_json(row).transpose();
        }
    } else {
        throw std::invalid_argument("from_json: matrix must have 'diag' or 'dense'");
    }

    auto info = meta_from_json(j);
    if (kind == "cubic") {
        const double rho = j.at("rho").get<double>();
        CubicProblem p = is_diag ? make_cubic_diagonal(std::move(diag), std::move(b), rho)
                                 : make_cubic_dense(std::move(dense), std::move(b), rho);
        p.info = std::move(info);
        return p;
    }
    if (kind == "tr") {
        const double radius = j.at("radius").get<double>();
        TrustRegionProblem p =
            is_diag ? make_tr_diagonal(std::move(diag), std::move(b), radius)
                    : make_tr_dense(std::move(dense), std::move(b), radius);
        p.info = std::move(info);
        return p;
    }
    throw std::invalid_argument("from_json: unknown kind '" + kind + "'");
}

void save_instance(const std::string& path, const CubicProblem& p) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << to_json(p) << "\n";
}

void save_instance(const std::string& path, const TrustRegionProblem& p) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    os << to_json(p) << "\n";
}

Instance load_instance(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open instance file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_json(ss.str());
}

}  // namespace subquad::io
