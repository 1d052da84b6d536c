#include "laxkit/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "laxkit/errors.hpp"

namespace laxkit {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what)
{
    fail(ErrorKind::ParseError, (path.empty() ? std::string("<root>") : path) + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path)
{
    if (!j.is_object()) {
        parse_fail(path, "expected an object");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        parse_fail(path.empty() ? key : path + "." + key, "missing field");
    }
    return *it;
}

std::string join(const std::string& path, const char* key)
{
    return path.empty() ? std::string(key) : path + "." + key;
}

std::string index(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

const Json& array(const Json& j, const std::string& path)
{
    if (!j.is_array()) {
        parse_fail(path, "expected an array");
    }
    return j;
}

Json vector_to_json(const CVector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(complex_to_json(v(i)));
    }
    return out;
}

CVector vector_from_json(const Json& j, const std::string& path)
{
    array(j, path);
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], index(path, i));
    }
    return v;
}

Json matrix_to_json(const CMatrix& M)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        out.push_back(vector_to_json(M.row(r).transpose()));
    }
    return out;
}

CMatrix matrix_from_json(const Json& j, const std::string& path)
{
    array(j, path);
    if (j.empty()) {
        parse_fail(path, "empty matrix");
    }
    const std::size_t cols = array(j[0], index(path, 0)).size();
    CMatrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const std::string rp = index(path, r);
        if (array(j[r], rp).size() != cols) {
            parse_fail(rp, "ragged matrix row");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c], index(rp, c));
        }
    }
    return M;
}

Json quad_to_json(const std::array<cd, 4>& s)
{
    Json out = Json::array();
    for (const cd v : s) {
        out.push_back(complex_to_json(v));
    }
    return out;
}

std::array<cd, 4> quad_from_json(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 4) {
        parse_fail(path, "expected 4 complex entries");
    }
    std::array<cd, 4> s;
    for (std::size_t k = 0; k < 4; ++k) {
        s[k] = complex_from_json(j[k], index(path, k));
    }
    return s;
}

LatticeParams lattice_from_json(const Json& j)
{
    const cd tau = complex_from_json(field(j, "tau", ""), "tau");
    if (!(tau.imag() >= LatticeParams::kMinImTau)) {
        fail(ErrorKind::InvariantViolation, "tau: imaginary part must be at least 0.05");
    }
    return LatticeParams(tau);
}

Json to_json(const RationalAdditive& m)
{
    Json j;
    j["type"] = "rational_additive";
    j["L0"] = matrix_to_json(m.L0);
    Json poles = Json::array();
    for (const RationalPole& p : m.poles) {
        Json e;
        e["z"] = complex_to_json(p.z);
        e["a"] = vector_to_json(p.a);
        e["b"] = vector_to_json(p.b);
        poles.push_back(std::move(e));
    }
    j["poles"] = std::move(poles);
    return j;
}

Json to_json(const RationalMultiplicative& m)
{
    Json j;
    j["type"] = "rational_multiplicative";
    j["L0"] = matrix_to_json(m.L0);
    Json factors = Json::array();
    for (const RationalFactor& f : m.factors) {
        Json e;
        e["z"] = complex_to_json(f.z);
        e["p"] = vector_to_json(f.p);
        e["q"] = vector_to_json(f.q);
        factors.push_back(std::move(e));
    }
    j["factors"] = std::move(factors);
    return j;
}

Json to_json(const SklyaninCoords& c)
{
    Json j;
    j["type"] = "sklyanin";
    j["tau"] = complex_to_json(c.L.tau());
    j["u"] = complex_to_json(c.u);
    j["s"] = quad_to_json(c.s);
    return j;
}

Json to_json(const MultiPoleSklyanin& mp)
{
    Json j;
    j["type"] = "multipole_sklyanin";
    j["tau"] = complex_to_json(mp.L.tau());
    j["s0"] = complex_to_json(mp.s0);
    Json poles = Json::array();
    for (const MultiPole& p : mp.poles) {
        Json e;
        e["z"] = complex_to_json(p.z);
        e["s"] = quad_to_json(p.s);
        poles.push_back(std::move(e));
    }
    j["poles"] = std::move(poles);
    return j;
}

Json to_json(const SklyaninChain& ch)
{
    Json j;
    j["type"] = "sklyanin_chain";
    j["tau"] = complex_to_json(ch.L.tau());
    Json u = Json::array();
    for (const cd v : ch.u) {
        u.push_back(complex_to_json(v));
    }
    j["u"] = std::move(u);
    Json factors = Json::array();
    for (const ChainFactor& f : ch.factors) {
        Json e;
        e["z"] = complex_to_json(f.z);
        e["s_hat"] = quad_to_json(f.s_hat);
        factors.push_back(std::move(e));
    }
    j["factors"] = std::move(factors);
    return j;
}

RationalAdditive additive_from_json(const Json& j)
{
    RationalAdditive m{matrix_from_json(field(j, "L0", ""), "L0"), {}};
    const Json& poles = array(field(j, "poles", ""), "poles");
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const std::string p = index("poles", i);
        m.poles.push_back({complex_from_json(field(poles[i], "z", p), join(p, "z")),
                           vector_from_json(field(poles[i], "a", p), join(p, "a")),
                           vector_from_json(field(poles[i], "b", p), join(p, "b"))});
    }
    m.validate();
    return m;
}

RationalMultiplicative multiplicative_from_json(const Json& j)
{
    RationalMultiplicative m{matrix_from_json(field(j, "L0", ""), "L0"), {}};
    const Json& factors = array(field(j, "factors", ""), "factors");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const std::string p = index("factors", i);
        m.factors.push_back({complex_from_json(field(factors[i], "z", p), join(p, "z")),
                             vector_from_json(field(factors[i], "p", p), join(p, "p")),
                             vector_from_json(field(factors[i], "q", p), join(p, "q"))});
    }
    m.validate();
    return m;
}

SklyaninCoords sklyanin_from_json(const Json& j)
{
    return SklyaninCoords{complex_from_json(field(j, "u", ""), "u"), quad_from_json(field(j, "s", ""), "s"),
                          lattice_from_json(j)};
}

MultiPoleSklyanin multipole_from_json(const Json& j)
{
    MultiPoleSklyanin mp{complex_from_json(field(j, "s0", ""), "s0"), {}, lattice_from_json(j)};
    const Json& poles = array(field(j, "poles", ""), "poles");
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const std::string p = index("poles", i);
        mp.poles.push_back({complex_from_json(field(poles[i], "z", p), join(p, "z")),
                            quad_from_json(field(poles[i], "s", p), join(p, "s"))});
    }
    mp.validate();
    return mp;
}

SklyaninChain chain_from_json(const Json& j)
{
    SklyaninChain ch{{}, {}, lattice_from_json(j)};
    const Json& u = array(field(j, "u", ""), "u");
    for (std::size_t i = 0; i < u.size(); ++i) {
        ch.u.push_back(complex_from_json(u[i], index("u", i)));
    }
    const Json& factors = array(field(j, "factors", ""), "factors");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const std::string p = index("factors", i);
        ch.factors.push_back({quad_from_json(field(factors[i], "s_hat", p), join(p, "s_hat")),
                              complex_from_json(field(factors[i], "z", p), join(p, "z"))});
    }
    ch.validate();
    return ch;
}

} // namespace

Json complex_to_json(cd z)
{
    return Json::array({z.real(), z.imag()});
}

cd complex_from_json(const Json& j, const std::string& path)
{
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        parse_fail(path, "expected a complex number [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Json model_to_json(const Model& m)
{
    return std::visit([](const auto& v) { return to_json(v); }, m);
}

Model model_from_json(const Json& j)
{
    const Json& tag = field(j, "type", "");
    if (!tag.is_string()) {
        parse_fail("type", "expected a string");
    }
    const std::string type = tag.get<std::string>();
    if (type == "rational_additive") {
        return additive_from_json(j);
    }
    if (type == "rational_multiplicative") {
        return multiplicative_from_json(j);
    }
    if (type == "sklyanin") {
        return sklyanin_from_json(j);
    }
    if (type == "multipole_sklyanin") {
        return multipole_from_json(j);
    }
    if (type == "sklyanin_chain") {
        return chain_from_json(j);
    }
    parse_fail("type", "unknown model type '" + type + "'");
}

Model load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::ParseError, path + ": cannot open file");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, path + ": " + e.what());
    }
    return model_from_json(j);
}

void save_json(const std::string& path, const Json& j)
{
    std::ofstream out(path);
    if (!out) {
        fail(ErrorKind::ParseError, path + ": cannot open file for writing");
    }
    out << j.dump(2) << '\n';
}

std::string model_type(const Model& m)
{
    return model_to_json(m)["type"].get<std::string>();
}

cd parse_complex(const std::string& text)
{
    const auto comma = text.find(',');
    auto number = [&](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size()) {
            fail(ErrorKind::ParseError, "'" + text + "' is not a complex number RE,IM");
        }
        return v;
    };
    if (comma == std::string::npos) {
        return {number(text), 0.0};
    }
    return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
}

} // namespace laxkit
