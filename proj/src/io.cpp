#include "prony/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "prony/error.hpp"
#include "prony/harmonics.hpp"

namespace prony {

namespace {

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

double number(const Json& j, const char* what)
{
    if (!j.is_number()) throw Error(std::string("expected a number for ") + what);
    return j.get<double>();
}

int integer(const Json& j, const char* what)
{
    if (!j.is_number_integer()) throw Error(std::string("expected an integer for ") + what);
    return j.get<int>();
}

cplx complex_from(const Json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2) throw Error(std::string("expected [re, im] for ") + what);
    return {number(j[0], what), number(j[1], what)};
}

const Json& field(const Json& doc, const char* name)
{
    auto it = doc.find(name);
    if (it == doc.end()) throw Error(std::string("missing field '") + name + "'");
    return *it;
}

const Json& array_field(const Json& doc, const char* name)
{
    const Json& a = field(doc, name);
    if (!a.is_array()) throw Error(std::string("field '") + name + "' must be an array");
    return a;
}

Json header(const char* kind, const char* domain)
{
    return Json{{"format_version", kFormatVersion}, {"kind", kind}, {"domain", domain}};
}

std::string domain_of(const Json& doc)
{
    const Json& d = field(doc, "domain");
    if (!d.is_string()) throw Error("field 'domain' must be a string");
    std::string s = d.get<std::string>();
    if (s != "torus" && s != "sphere") throw Error("unknown domain '" + s + "'");
    return s;
}

}  // namespace

Json to_json(const TorusEnsemble& ensemble)
{
    Json doc = header("ensemble", "torus");
    doc["dimension"] = ensemble.dimension();
    Json pts = Json::array();
    for (const auto& t : ensemble.points()) pts.push_back(std::vector<double>(t.data(), t.data() + t.size()));
    Json cs = Json::array();
    for (cplx c : ensemble.coefficients()) cs.push_back(complex_json(c));
    doc["points"] = std::move(pts);
    doc["coefficients"] = std::move(cs);
    return doc;
}

Json to_json(const SphereEnsemble& ensemble)
{
    Json doc = header("ensemble", "sphere");
    Json pts = Json::array();
    for (const auto& x : ensemble.points()) pts.push_back({x.x(), x.y(), x.z()});
    doc["points"] = std::move(pts);
    doc["coefficients"] = ensemble.coefficients();
    return doc;
}

Json to_json(const TorusMoments& moments)
{
    Json doc = header("moments", "torus");
    doc["dimension"] = moments.dimension();
    doc["order"] = moments.order();
    Json entries = Json::array();
    const auto& idx = moments.indices();
    for (std::size_t i = 0; i < idx.size(); ++i)
        entries.push_back({{"index", idx[i].entries}, {"value", complex_json(moments.values()[i])}});
    doc["entries"] = std::move(entries);
    return doc;
}

Json to_json(const SphereMoments& moments)
{
    Json doc = header("moments", "sphere");
    doc["degree"] = moments.degree();
    Json entries = Json::array();
    for (std::size_t i = 0; i < moments.values().size(); ++i) {
        const HarmonicIndex h = harmonic_index_at(i);
        entries.push_back({{"k", h.degree}, {"l", h.order}, {"value", moments.values()[i]}});
    }
    doc["entries"] = std::move(entries);
    return doc;
}

Json to_json(const Ensemble& ensemble)
{
    return std::visit([](const auto& e) { return to_json(e); }, ensemble);
}

Json to_json(const Moments& moments)
{
    return std::visit([](const auto& m) { return to_json(m); }, moments);
}

void require_document(const Json& doc, const std::string& kind)
{
    if (!doc.is_object()) throw Error("document must be a JSON object");
    const Json& v = field(doc, "format_version");
    if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
        throw Error("unsupported format_version " + v.dump() + " (expected " + std::to_string(kFormatVersion) + ")");
    const Json& k = field(doc, "kind");
    if (!k.is_string() || k.get<std::string>() != kind)
        throw Error("expected a '" + kind + "' document, found " + k.dump());
}

Ensemble ensemble_from_json(const Json& doc)
{
    require_document(doc, "ensemble");
    const Json& pts = array_field(doc, "points");
    const Json& cs = array_field(doc, "coefficients");
    if (domain_of(doc) == "torus") {
        const int d = integer(field(doc, "dimension"), "dimension");
        std::vector<Eigen::VectorXd> points;
        for (const Json& p : pts) {
            if (!p.is_array() || static_cast<int>(p.size()) != d) throw Error("torus point has wrong dimension");
            Eigen::VectorXd t(d);
            for (int a = 0; a < d; ++a) t[a] = number(p[a], "point coordinate");
            points.push_back(std::move(t));
        }
        std::vector<cplx> coeffs;
        for (const Json& c : cs) coeffs.push_back(complex_from(c, "coefficient"));
        return TorusEnsemble(d, std::move(points), std::move(coeffs));
    }
    std::vector<Eigen::Vector3d> points;
    for (const Json& p : pts) {
        if (!p.is_array() || p.size() != 3) throw Error("sphere point must have 3 coordinates");
        points.emplace_back(number(p[0], "x"), number(p[1], "y"), number(p[2], "z"));
    }
    std::vector<double> coeffs;
    for (const Json& c : cs) coeffs.push_back(number(c, "coefficient"));
    return SphereEnsemble(std::move(points), std::move(coeffs));
}

Moments moments_from_json(const Json& doc)
{
    require_document(doc, "moments");
    const Json& entries = array_field(doc, "entries");
    if (domain_of(doc) == "torus") {
        const int d = integer(field(doc, "dimension"), "dimension");
        const int n = integer(field(doc, "order"), "order");
        std::map<MultiIndex, cplx> table;
        for (const Json& e : entries) {
            const Json& ix = array_field(e, "index");
            if (static_cast<int>(ix.size()) != d) throw Error("moment index has wrong dimension");
            MultiIndex k;
            for (const Json& v : ix) k.entries.push_back(integer(v, "moment index"));
            if (!table.emplace(k, complex_from(field(e, "value"), "moment")).second)
                throw Error("repeated moment index " + to_string(k));
        }
        return TorusMoments::from_entries(d, n, table);
    }
    const int degree = integer(field(doc, "degree"), "degree");
    std::map<std::pair<int, int>, double> table;
    for (const Json& e : entries) {
        const int k = integer(field(e, "k"), "k");
        const int l = integer(field(e, "l"), "l");
        if (!table.emplace(std::pair{k, l}, number(field(e, "value"), "moment")).second)
            throw Error("repeated moment index (" + std::to_string(k) + "," + std::to_string(l) + ")");
    }
    return SphereMoments::from_entries(degree, table);
}

void write_file_atomic(const std::filesystem::path& file, const std::string& contents)
{
    std::filesystem::path tmp = file;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move output into place at " + file.string());
    }
}

void write_json(const std::filesystem::path& file, const Json& doc) { write_file_atomic(file, doc.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(file.string() + ": " + e.what());
    }
}

std::string format_double(double value)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error("cannot format number");
    return std::string(buf, end);
}

std::string scalar_fields_csv(std::span<const Eigen::Vector3d> points, std::span<const ScalarField> fields)
{
    for (const auto& [name, values] : fields)
        if (values.size() != points.size()) throw Error("field '" + name + "' has the wrong number of values");
    std::ostringstream os;
    os << "x,y,z";
    for (const auto& f : fields) os << ',' << f.first;
    os << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        os << format_double(points[i].x()) << ',' << format_double(points[i].y()) << ',' << format_double(points[i].z());
        for (const auto& f : fields) os << ',' << format_double(f.second[i]);
        os << '\n';
    }
    return os.str();
}

}  // namespace prony
