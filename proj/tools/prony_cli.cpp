// prony: simulate, reconstruct, certify and validate sparse Dirac ensembles.
//
// Exit codes: 0 success, 2 not identifiable at the chosen order (or a
// degenerate instance), 1 any other error. Errors are also printed to stderr
// as {"error": {"kind": ..., "message": ...}}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prony/certificate.hpp"
#include "prony/ensemble.hpp"
#include "prony/error.hpp"
#include "prony/gaunt.hpp"
#include "prony/harmonics.hpp"
#include "prony/io.hpp"
#include "prony/moments.hpp"
#include "prony/random.hpp"
#include "prony/sphere.hpp"
#include "prony/torus.hpp"
#include "prony/variety.hpp"

namespace fs = std::filesystem;
using namespace prony;

namespace {

constexpr int kMaxAutoSphereOrder = 64;
constexpr double kMaxAutoTorusSize = 20000;
constexpr double kCoefficientResidualLimit = 1e-6;

struct RunConfig {
    std::string domain = "sphere";
    std::string order = "auto";
    int sparsity = 0;
    double separation = 0.0;
    std::uint64_t seed = 0;
    double rank_tolerance = kDefaultRankTolerance;
    int grid_resolution = 0;
    std::string input;
    std::string output;
    std::string ensemble;
    std::string cache_dir;
    bool minimal_moments = false;
};

Domain parse_domain(const std::string& text)
{
    if (text == "sphere") return SphereDomain{};
    if (text == "torus") return TorusDomain{1};
    if (text.rfind("torus:", 0) == 0) {
        const std::string rest = text.substr(6);
        std::size_t used = 0;
        int d = 0;
        try {
            d = std::stoi(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != rest.size() || d < 1) throw Error("bad torus dimension in --domain " + text);
        return TorusDomain{d};
    }
    throw Error("--domain must be 'sphere' or 'torus:d'");
}

std::optional<int> explicit_order(const std::string& text)
{
    if (text == "auto") return std::nullopt;
    std::size_t used = 0;
    int n = -1;
    try {
        n = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || n < 0) throw Error("--order must be a non-negative integer or 'auto'");
    return n;
}

fs::path cache_dir(const RunConfig& cfg) { return cfg.cache_dir.empty() ? default_cache_dir() : fs::path(cfg.cache_dir); }

Json point_json(const Eigen::VectorXd& t) { return std::vector<double>(t.data(), t.data() + t.size()); }
Json point_json(const Eigen::Vector3d& x) { return Json::array({x.x(), x.y(), x.z()}); }
Json coefficient_json(cplx c) { return Json::array({c.real(), c.imag()}); }
Json coefficient_json(double c) { return c; }

Json meta_of(const Json& doc)
{
    auto it = doc.find("meta");
    return it != doc.end() && it->is_object() ? *it : Json::object();
}

// ---------------------------------------------------------------- simulate

int auto_order(const Domain& domain, std::size_t sparsity, double separation)
{
    if (sparsity < 2) return 1;
    const int n = required_order(separation, domain).identification;
    if (std::holds_alternative<SphereDomain>(domain)) {
        if (n > kMaxAutoSphereOrder)
            throw Error("automatic order " + std::to_string(n) + " is too large for the sphere; pass --order");
    } else {
        const int d = std::get<TorusDomain>(domain).dimension;
        if (std::pow(n + 1.0, d) > kMaxAutoTorusSize)
            throw Error("automatic order " + std::to_string(n) + " gives an oversized moment matrix; pass --order");
    }
    return n;
}

int cmd_simulate(const RunConfig& cfg)
{
    if (cfg.sparsity < 1) throw Error("--sparsity must be >= 1");
    if (cfg.output.empty()) throw Error("--out directory is required");
    const Domain domain = parse_domain(cfg.domain);
    CounterRng rng(cfg.seed);

    Json ensemble_doc, moments_doc, meta{{"seed", cfg.seed}, {"requested_separation", cfg.separation}};
    std::size_t count = 0;
    double achieved = std::numeric_limits<double>::quiet_NaN();
    std::optional<TorusEnsemble> torus;
    std::optional<SphereEnsemble> sphere;
    if (const auto* t = std::get_if<TorusDomain>(&domain)) {
        torus.emplace(simulate_torus(rng, t->dimension, cfg.sparsity, cfg.separation));
        count = torus->size();
        if (count > 1) achieved = torus_separation(torus->points());
    } else {
        sphere.emplace(simulate_sphere(rng, cfg.sparsity, cfg.separation));
        count = sphere->size();
        if (count > 1) achieved = sphere_separation(sphere->points());
    }

    const auto fixed = explicit_order(cfg.order);
    const int n = fixed ? *fixed : auto_order(domain, count, achieved);
    meta["order"] = n;
    if (count > 1) {
        const OrderBound bound = required_order(achieved, domain);
        meta["separation"] = achieved;
        meta["identification_bound"] = bound.identification;
        meta["full_rank_bound"] = bound.full_rank;
    } else {
        meta["separation"] = nullptr;
    }

    if (torus) {
        ensemble_doc = to_json(*torus);
        const int order = cfg.minimal_moments ? n : n + 1;
        moments_doc = to_json(torus_moments(*torus, order));
    } else {
        ensemble_doc = to_json(*sphere);
        const int degree = cfg.minimal_moments ? 2 * n : 2 * n + 2;
        moments_doc = to_json(sphere_moments(*sphere, degree));
    }
    ensemble_doc["meta"] = meta;
    moments_doc["meta"] = meta;

    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    write_json(dir / "ensemble.json", ensemble_doc);
    write_json(dir / "moments.json", moments_doc);

    Json summary = meta;
    summary["sparsity"] = count;
    std::cout << summary.dump() << "\n";
    return 0;
}

// ------------------------------------------------------------- reconstruct

template <typename Point, typename Coef, typename Distance>
Json match_truth(const std::vector<Point>& truth, const std::vector<Coef>& truth_coeffs, const std::vector<Point>& found,
                 const std::vector<Coef>& found_coeffs, Distance distance)
{
    double point_error = 0.0, coefficient_error = 0.0;
    std::vector<bool> used(found.size(), false);
    bool complete = truth.size() == found.size();
    for (std::size_t j = 0; j < truth.size(); ++j) {
        std::size_t best = found.size();
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < found.size(); ++i)
            if (!used[i] && distance(truth[j], found[i]) < dist) {
                dist = distance(truth[j], found[i]);
                best = i;
            }
        if (best == found.size()) {
            complete = false;
            continue;
        }
        used[best] = true;
        point_error = std::max(point_error, dist);
        if (best < found_coeffs.size())
            coefficient_error = std::max(coefficient_error, std::abs(truth_coeffs[j] - found_coeffs[best]));
    }
    return {{"count_match", complete}, {"point_error", point_error}, {"coefficient_error", coefficient_error}};
}

Json sparsity_json(const SparsityEstimate& s)
{
    return {{"sparsity", s.sparsity}, {"next_rank", s.next_rank}, {"flat", s.flat}};
}

template <typename Point>
void add_support(Json& report, const RecoveredSupport<Point>& rs)
{
    Json pts = Json::array(), unresolved = Json::array();
    for (const auto& p : rs.points) pts.push_back(point_json(p));
    for (std::size_t i = 0; i < rs.unresolved.size(); ++i)
        unresolved.push_back({{"point", point_json(rs.unresolved[i])}, {"residual", rs.unresolved_residuals[i]}});
    report["points"] = std::move(pts);
    report["residuals"] = rs.residuals;
    report["unresolved"] = std::move(unresolved);
    report["seed_count"] = rs.seed_count;
}

template <typename Scalar>
void add_kernel(Json& report, const KernelBasis<Scalar>& kb)
{
    report["matrix_size"] = kb.ambient;
    report["rank"] = kb.rank;
    report["kernel_dimension"] = kb.kernel_dimension();
    const Eigen::Index shown = std::min<Eigen::Index>(kb.singular_values.size(), kb.rank + 5);
    report["singular_values"] = std::vector<double>(kb.singular_values.data(), kb.singular_values.data() + shown);
}

int finish_report(Json& report, std::vector<std::string> reasons, const RunConfig& cfg)
{
    report["status"] = reasons.empty() ? "identified" : "non_identifiable";
    report["reasons"] = reasons;
    if (!cfg.output.empty()) write_json(cfg.output, report);
    else std::cout << report.dump(2) << "\n";
    return reasons.empty() ? 0 : 2;
}

int reconstruct_torus(const TorusMoments& m, const Json& meta, const RunConfig& cfg)
{
    const auto fixed = explicit_order(cfg.order);
    int n = fixed ? *fixed : (meta.contains("order") ? meta["order"].get<int>() : std::max(1, m.order() - 1));
    if (n > m.order())
        throw Error("moment table of order " + std::to_string(m.order()) + " is incomplete for order " + std::to_string(n));

    Json report{{"format_version", kFormatVersion}, {"kind", "reconstruction"}, {"domain", "torus"},
                {"dimension", m.dimension()}, {"order", n}, {"rank_tolerance", cfg.rank_tolerance}};
    std::vector<std::string> reasons;

    const auto T = assemble_toeplitz(m, n);
    const auto kb = T.kernel(cfg.rank_tolerance);
    add_kernel(report, kb);
    if (m.order() > n) {
        const auto est = estimate_sparsity(m, n, cfg.rank_tolerance);
        report["sparsity_estimate"] = sparsity_json(est);
        if (!est.flat) reasons.push_back("rank not flat between orders n and n+1");
    } else {
        report["sparsity_estimate"] = nullptr;
    }

    ExtractionSettings settings;
    settings.grid_resolution = cfg.grid_resolution;
    const auto rs = extract_support(TorusZeroLocator{m.dimension(), n, kb, settings});
    add_support(report, rs);
    if (!rs.unresolved.empty()) reasons.push_back("unresolved regions in the zero locus");
    if (static_cast<Eigen::Index>(rs.points.size()) != kb.rank) reasons.push_back("point count differs from the rank");

    std::vector<cplx> coeffs;
    if (!rs.points.empty()) {
        try {
            const auto fit = recover_coefficients(rs.points, m, n);
            coeffs = fit.coefficients;
            report["coefficient_residual"] = fit.relative_residual;
            if (!(fit.relative_residual <= kCoefficientResidualLimit)) reasons.push_back("moments not reproduced by the recovered support");
        } catch (const NotIdentifiable& e) {
            reasons.push_back(e.what());
        }
    }
    Json cs = Json::array();
    for (cplx c : coeffs) cs.push_back(coefficient_json(c));
    report["coefficients"] = std::move(cs);
    report["estimated_sparsity"] = kb.rank;

    if (!cfg.ensemble.empty()) {
        const auto truth = std::get<TorusEnsemble>(ensemble_from_json(read_json(cfg.ensemble)));
        report["matching"] = match_truth(truth.points(), truth.coefficients(), rs.points, coeffs,
                                         [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return torus_distance(a, b); });
    }
    return finish_report(report, std::move(reasons), cfg);
}

int default_sphere_order(const SphereMoments& m, const Json& meta)
{
    if (meta.contains("order")) return meta["order"].get<int>();
    return m.degree() >= 4 ? (m.degree() - 2) / 2 : m.degree() / 2;
}

int reconstruct_sphere(const SphereMoments& m, const Json& meta, const RunConfig& cfg)
{
    const auto fixed = explicit_order(cfg.order);
    const int n = fixed ? *fixed : default_sphere_order(m, meta);
    if (m.degree() < 2 * n)
        throw Error("moment table of degree " + std::to_string(m.degree()) + " is incomplete for order " + std::to_string(n) +
                    " (needs degree " + std::to_string(2 * n) + ")");
    const bool check_flat = m.degree() >= 2 * n + 2;
    const GauntTable gaunt = cached_gaunt_table(check_flat ? n + 1 : n, cache_dir(cfg));

    Json report{{"format_version", kFormatVersion}, {"kind", "reconstruction"}, {"domain", "sphere"},
                {"order", n}, {"rank_tolerance", cfg.rank_tolerance}};
    std::vector<std::string> reasons;

    const auto H = assemble_spherical_moment_matrix(m, n, gaunt);
    const auto kb = H.kernel(cfg.rank_tolerance);
    add_kernel(report, kb);
    if (check_flat) {
        const auto est = estimate_sparsity(m, n, gaunt, cfg.rank_tolerance);
        report["sparsity_estimate"] = sparsity_json(est);
        if (!est.flat) reasons.push_back("rank not flat between orders n and n+1");
    } else {
        report["sparsity_estimate"] = nullptr;
    }

    ExtractionSettings settings;
    settings.grid_resolution = cfg.grid_resolution;
    const auto rs = extract_support(SphereZeroLocator{n, kb, settings});
    add_support(report, rs);
    if (!rs.unresolved.empty()) reasons.push_back("unresolved regions in the zero locus");
    if (static_cast<Eigen::Index>(rs.points.size()) != kb.rank) reasons.push_back("point count differs from the rank");

    std::vector<double> coeffs;
    if (!rs.points.empty()) {
        try {
            const auto fit = recover_sphere_coefficients(rs.points, m);
            coeffs = fit.coefficients;
            report["coefficient_residual"] = fit.relative_residual;
            if (!(fit.relative_residual <= kCoefficientResidualLimit)) reasons.push_back("moments not reproduced by the recovered support");
        } catch (const NotIdentifiable& e) {
            reasons.push_back(e.what());
        }
    }
    report["coefficients"] = coeffs;
    report["estimated_sparsity"] = kb.rank;

    if (!cfg.ensemble.empty()) {
        const auto truth = std::get<SphereEnsemble>(ensemble_from_json(read_json(cfg.ensemble)));
        report["matching"] = match_truth(truth.points(), truth.coefficients(), rs.points, coeffs,
                                         [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return sphere_distance(a, b); });
    }
    return finish_report(report, std::move(reasons), cfg);
}

int cmd_reconstruct(const RunConfig& cfg)
{
    if (cfg.input.empty()) throw Error("--in moment file is required");
    const Json doc = read_json(cfg.input);
    const Moments moments = moments_from_json(doc);
    if (const auto* t = std::get_if<TorusMoments>(&moments)) return reconstruct_torus(*t, meta_of(doc), cfg);
    return reconstruct_sphere(std::get<SphereMoments>(moments), meta_of(doc), cfg);
}

// ----------------------------------------------------------------- certify

int cmd_certify(const RunConfig& cfg)
{
    if (cfg.output.empty()) throw Error("--out directory is required");
    if (cfg.input.empty() && cfg.ensemble.empty()) throw Error("certify needs --in moments or --ensemble points");
    const auto fixed = explicit_order(cfg.order);

    int n = 0;
    SphereCertificate cert;
    KernelBasis<double> kernel;
    std::vector<Eigen::Vector3d> points;
    Json source;
    if (!cfg.input.empty()) {
        const Json doc = read_json(cfg.input);
        const Moments moments = moments_from_json(doc);
        const auto* m = std::get_if<SphereMoments>(&moments);
        if (m == nullptr) throw Error("certificates are only available on the sphere");
        n = fixed ? *fixed : (meta_of(doc).contains("order") ? meta_of(doc)["order"].get<int>() : m->degree() / 2);
        if (m->degree() < 2 * n) throw Error("moment table incomplete for order " + std::to_string(n));
        const auto H = assemble_spherical_moment_matrix(*m, n, cached_gaunt_table(n, cache_dir(cfg)));
        kernel = H.kernel(cfg.rank_tolerance);
        cert = build_certificate(H, cfg.rank_tolerance);
        ExtractionSettings settings;
        settings.grid_resolution = cfg.grid_resolution;
        const auto rs = extract_support(SphereZeroLocator{n, kernel, settings});
        if (!rs.unresolved.empty() || static_cast<Eigen::Index>(rs.points.size()) != kernel.rank)
            throw NotIdentifiable("support could not be recovered from the kernel");
        points = rs.points;
        source = "moments";
    } else {
        const Json doc = read_json(cfg.ensemble);
        const Ensemble ensemble = ensemble_from_json(doc);
        const auto* e = std::get_if<SphereEnsemble>(&ensemble);
        if (e == nullptr) throw Error("certificates are only available on the sphere");
        points = e->points();
        n = fixed ? *fixed : (meta_of(doc).contains("order") ? meta_of(doc)["order"].get<int>() : 0);
        if (!fixed && !meta_of(doc).contains("order")) throw Error("--order is required for an ensemble without metadata");
        kernel = numerical_kernel<double>(assemble_spherical_fourier(points, n).values, cfg.rank_tolerance);
        cert = build_certificate(points, n, cfg.rank_tolerance);
        source = "ensemble";
    }
    if (kernel.kernel_dimension() == 0) throw NotIdentifiable("no kernel: order too small or M = matrix size");

    const std::size_t nodes =
        cfg.grid_resolution > 0 ? static_cast<std::size_t>(cfg.grid_resolution) : 20 * harmonic_count(n);
    const auto grid = fibonacci_sphere(nodes);
    const auto report = validate_certificate(cert, points, grid);
    const std::vector<ScalarField> fields{{"kernel_surface", kernel_surface(kernel, grid)}, {"dual_surface", dual_surface(cert, grid)}};
    const std::string csv = scalar_fields_csv(grid, fields);

    Json pts = Json::array();
    for (const auto& x : points) pts.push_back(point_json(x));
    Json out{{"format_version", kFormatVersion},
             {"kind", "certificate"},
             {"domain", "sphere"},
             {"source", source},
             {"order", n},
             {"rank", cert.signal.cols()},
             {"scale", cert.scale()},
             {"points", std::move(pts)},
             {"grid_size", grid.size()},
             {"grid_min", report.grid_min},
             {"grid_max", report.grid_max},
             {"point_values", report.point_values},
             {"exclusion_radius", report.exclusion_radius},
             {"margin", report.margin},
             {"upper_bound_ok", report.upper_bound_ok},
             {"lower_bound_ok", report.lower_bound_ok},
             {"interpolates", report.interpolates},
             {"positive_margin", report.positive_margin},
             {"passed", report.passed()}};

    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    write_file_atomic(dir / "surface.csv", csv);
    try {
        write_json(dir / "certificate.json", out);
    } catch (...) {
        std::error_code ec;
        fs::remove(dir / "surface.csv", ec);
        throw;
    }
    std::cout << Json{{"passed", report.passed()}, {"margin", report.margin}, {"grid_max", report.grid_max}}.dump() << "\n";
    return report.passed() ? 0 : 2;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const RunConfig& cfg)
{
    if (cfg.input.empty()) throw Error("--in file is required");
    const Json doc = read_json(cfg.input);
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) throw Error("not a prony document");
    const std::string kind = doc["kind"].get<std::string>();
    const auto fixed = explicit_order(cfg.order);
    Json summary{{"kind", kind}, {"valid", true}};

    if (kind == "ensemble") {
        const Ensemble e = ensemble_from_json(doc);
        std::visit(
            [&](const auto& ens) {
                summary["sparsity"] = ens.size();
                if (ens.size() < 2) return;
                double q;
                Domain domain;
                if constexpr (std::is_same_v<std::decay_t<decltype(ens)>, TorusEnsemble>) {
                    q = torus_separation(ens.points());
                    domain = TorusDomain{ens.dimension()};
                } else {
                    q = sphere_separation(ens.points());
                    domain = SphereDomain{};
                }
                const auto b = required_order(q, domain);
                summary["separation"] = q;
                summary["identification_bound"] = b.identification;
                summary["full_rank_bound"] = b.full_rank;
            },
            e);
    } else if (kind == "moments") {
        const Moments m = moments_from_json(doc);
        if (const auto* t = std::get_if<TorusMoments>(&m)) {
            summary["order"] = t->order();
            summary["conjugate_symmetric"] = t->is_conjugate_symmetric(1e-12);
            if (fixed && *fixed > t->order())
                throw Error("moment table of order " + std::to_string(t->order()) + " is incomplete for order " + std::to_string(*fixed));
        } else {
            const auto& s = std::get<SphereMoments>(m);
            summary["degree"] = s.degree();
            if (fixed && 2 * *fixed > s.degree())
                throw Error("moment table of degree " + std::to_string(s.degree()) + " is incomplete for order " + std::to_string(*fixed));
        }
    } else if (kind == "reconstruction" || kind == "certificate") {
        require_document(doc, kind);
        for (const char* f : {"domain", "order", "points"})
            if (!doc.contains(f)) throw Error(std::string("missing field '") + f + "'");
    } else {
        throw Error("unknown document kind '" + kind + "'");
    }
    std::cout << summary.dump() << "\n";
    return 0;
}

void report_error(const char* kind, const std::string& message)
{
    std::cerr << Json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse Dirac ensemble reconstruction from trigonometric and spherical harmonic moments"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--order", cfg.order, "order n, or 'auto'")->capture_default_str();
        sub->add_option("--rank-tol", cfg.rank_tolerance, "relative rank tolerance")->capture_default_str();
        sub->add_option("--grid-res", cfg.grid_resolution, "search grid resolution (0 = default)")->capture_default_str();
        sub->add_option("--cache-dir", cfg.cache_dir, "Gaunt table cache directory");
    };

    auto* sim = app.add_subcommand("simulate", "draw a random ensemble and write its moments");
    sim->add_option("--domain", cfg.domain, "torus:d or sphere")->capture_default_str();
    sim->add_option("--sparsity", cfg.sparsity, "number of points M")->required();
    sim->add_option("--separation", cfg.separation, "separation target q")->capture_default_str();
    sim->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    sim->add_option("--out", cfg.output, "output directory")->required();
    sim->add_flag("--minimal-moments", cfg.minimal_moments, "write only the moments needed at order n");
    sim->add_option("--order", cfg.order, "order n, or 'auto'")->capture_default_str();

    auto* rec = app.add_subcommand("reconstruct", "recover points and coefficients from moments");
    rec->add_option("--in", cfg.input, "moment file")->required();
    rec->add_option("--ensemble", cfg.ensemble, "ground-truth ensemble for error reporting");
    rec->add_option("--out", cfg.output, "report file (stdout if omitted)");
    common(rec);

    auto* cer = app.add_subcommand("certify", "build and check the dual certificate on the sphere");
    cer->add_option("--in", cfg.input, "sphere moment file");
    cer->add_option("--ensemble", cfg.ensemble, "sphere ensemble file (used when --in is absent)");
    cer->add_option("--out", cfg.output, "output directory")->required();
    common(cer);

    auto* val = app.add_subcommand("validate", "check a document's schema and completeness");
    val->add_option("--in", cfg.input, "file to check")->required();
    val->add_option("--order", cfg.order, "require moments sufficient for this order")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        require_rank_tolerance(cfg.rank_tolerance);
        if (cfg.grid_resolution < 0) throw Error("--grid-res must be >= 0");
        if (sim->parsed()) return cmd_simulate(cfg);
        if (rec->parsed()) return cmd_reconstruct(cfg);
        if (cer->parsed()) return cmd_certify(cfg);
        return cmd_validate(cfg);
    } catch (const NotIdentifiable& e) {
        report_error("not_identifiable", e.what());
        return 2;
    } catch (const SeparationUnreachable& e) {
        report_error("separation_unreachable", e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error("error", e.what());
        return 1;
    }
}
