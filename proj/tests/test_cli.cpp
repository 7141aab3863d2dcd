#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "prony/ensemble.hpp"
#include "prony/io.hpp"

using namespace prony;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::path(TEST_SCRATCH) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args, const fs::path& log)
{
    const std::string cmd = std::string("\"") + PRONY_CLI + "\" " + args + " > \"" + log.string() + "\" 2> \"" +
                            log.string() + ".err\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("simulate is deterministic")
{
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    const std::string args = "simulate --domain torus:2 --sparsity 5 --separation 0.1 --seed 42 --out ";
    REQUIRE(run(args + q(a), a / "log") == 0);
    REQUIRE(run(args + q(b), b / "log") == 0);
    REQUIRE(run("simulate --domain torus:2 --sparsity 5 --separation 0.1 --seed 43 --out " + q(c), c / "log") == 0);
    CHECK(slurp(a / "ensemble.json") == slurp(b / "ensemble.json"));
    CHECK(slurp(a / "moments.json") == slurp(b / "moments.json"));
    CHECK(slurp(a / "ensemble.json") != slurp(c / "ensemble.json"));
}

TEST_CASE("simulate writes complete, re-readable files")
{
    SUBCASE("large sphere ensemble")
    {
        const auto dir = scratch("sphere50");
        REQUIRE(run("simulate --domain sphere --sparsity 50 --seed 1 --order 30 --out " + q(dir), dir / "log") == 0);
        const auto e = std::get<SphereEnsemble>(ensemble_from_json(read_json(dir / "ensemble.json")));
        CHECK(e.size() == 50);
        for (const auto& x : e.points()) CHECK(std::abs(x.norm() - 1.0) < 1e-12);
        const auto m = std::get<SphereMoments>(moments_from_json(read_json(dir / "moments.json")));
        CHECK(m.degree() >= 60);
        const auto doc = read_json(dir / "moments.json");
        CHECK(doc["meta"]["order"] == 30);
        CHECK(doc["meta"]["separation"].get<double>() == doctest::Approx(sphere_separation(e.points())));
    }
    SUBCASE("single point on the circle")
    {
        const auto dir = scratch("torus1");
        REQUIRE(run("simulate --domain torus:1 --sparsity 1 --seed 3 --out " + q(dir), dir / "log") == 0);
        const auto e = std::get<TorusEnsemble>(ensemble_from_json(read_json(dir / "ensemble.json")));
        CHECK(e.size() == 1);
        const auto m = std::get<TorusMoments>(moments_from_json(read_json(dir / "moments.json")));
        const double modulus = std::abs(e.coefficients()[0]);
        for (cplx v : m.values()) CHECK(std::abs(std::abs(v) - modulus) < 1e-12);
    }
    SUBCASE("separated points on the 2-torus")
    {
        const auto dir = scratch("torus2");
        REQUIRE(run("simulate --domain torus:2 --sparsity 7 --separation 0.1 --seed 8 --out " + q(dir), dir / "log") == 0);
        const auto e = std::get<TorusEnsemble>(ensemble_from_json(read_json(dir / "ensemble.json")));
        CHECK(e.size() == 7);
        CHECK(torus_separation(e.points()) > 0.1);
    }
    SUBCASE("JSON output re-parses to the same document")
    {
        const auto dir = scratch("schema");
        REQUIRE(run("simulate --domain sphere --sparsity 4 --separation 0.3 --seed 2 --out " + q(dir), dir / "log") == 0);
        const Json doc = read_json(dir / "ensemble.json");
        Json again = to_json(ensemble_from_json(doc));
        again["meta"] = doc["meta"];
        CHECK(again == doc);
        const Json mdoc = read_json(dir / "moments.json");
        Json magain = to_json(moments_from_json(mdoc));
        magain["meta"] = mdoc["meta"];
        CHECK(magain == mdoc);
    }
}

TEST_CASE("reconstruct round trips")
{
    SUBCASE("torus")
    {
        const auto dir = scratch("round_torus");
        REQUIRE(run("simulate --domain torus:2 --sparsity 5 --separation 0.2 --seed 5 --out " + q(dir), dir / "log") == 0);
        CHECK(run("reconstruct --in " + q(dir / "moments.json") + " --ensemble " + q(dir / "ensemble.json") + " --out " +
                      q(dir / "report.json"),
                  dir / "log") == 0);
        const Json r = read_json(dir / "report.json");
        CHECK(r["status"] == "identified");
        CHECK(r["estimated_sparsity"] == 5);
        CHECK(r["sparsity_estimate"]["flat"] == true);
        CHECK(r["matching"]["count_match"] == true);
        CHECK(r["matching"]["point_error"].get<double>() < 1e-6);
        CHECK(r["matching"]["coefficient_error"].get<double>() < 1e-6);
    }
    SUBCASE("sphere at order two")
    {
        const auto dir = scratch("round_sphere");
        const SphereEnsemble e({Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0)}, {1.0, -0.7, 1.3});
        Json m = to_json(sphere_moments(e, 6));
        m["meta"] = Json{{"order", 2}};
        write_json(dir / "moments.json", m);
        write_json(dir / "ensemble.json", to_json(e));
        CHECK(run("reconstruct --in " + q(dir / "moments.json") + " --ensemble " + q(dir / "ensemble.json") + " --out " +
                      q(dir / "report.json"),
                  dir / "log") == 0);
        const Json r = read_json(dir / "report.json");
        CHECK(r["rank"] == 3);
        CHECK(r["kernel_dimension"] == 6);
        CHECK(r["matching"]["point_error"].get<double>() < 1e-6);
    }
    SUBCASE("too low an order is reported as non-identifiable")
    {
        const auto dir = scratch("round_low");
        REQUIRE(run("simulate --domain torus:1 --sparsity 6 --separation 0.1 --seed 9 --out " + q(dir), dir / "log") == 0);
        // six points, five unknowns per kernel vector: no kernel at all
        CHECK(run("reconstruct --in " + q(dir / "moments.json") + " --order 4 --out " + q(dir / "report.json"), dir / "log") ==
              2);
        CHECK(slurp(dir / "log.err").find("no kernel") != std::string::npos);
        CHECK(!fs::exists(dir / "report.json"));
    }
    SUBCASE("nearly coincident points are not passed off as a solution")
    {
        const auto dir = scratch("round_close");
        const TorusEnsemble e(1, {Eigen::VectorXd::Constant(1, 0.2), Eigen::VectorXd::Constant(1, 0.2005),
                                  Eigen::VectorXd::Constant(1, 0.7)},
                              {cplx(1), cplx(1), cplx(1)});
        write_json(dir / "moments.json", to_json(torus_moments(e, 5)));
        CHECK(run("reconstruct --in " + q(dir / "moments.json") + " --order 4 --out " + q(dir / "report.json"), dir / "log") ==
              2);
        const Json r = read_json(dir / "report.json");
        CHECK(r["status"] == "non_identifiable");
        CHECK(!r["reasons"].empty());
    }
}

TEST_CASE("certify")
{
    SUBCASE("surface fields for three points at order two")
    {
        const auto dir = scratch("certify3");
        const std::vector<Eigen::Vector3d> pts{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
        Json m = to_json(sphere_moments(SphereEnsemble(pts, {1.0, 1.0, 1.0}), 4));
        m["meta"] = Json{{"order", 2}};
        write_json(dir / "moments.json", m);
        CHECK(run("certify --in " + q(dir / "moments.json") + " --out " + q(dir / "out"), dir / "log") == 0);
        const Json c = read_json(dir / "out" / "certificate.json");
        CHECK(c["passed"] == true);
        CHECK(c["rank"] == 3);
        REQUIRE(c["points"].size() == 3);
        for (const auto& x : pts) {
            double best = 10.0;
            for (const auto& p : c["points"])
                best = std::min(best, sphere_distance(x, Eigen::Vector3d(p[0].get<double>(), p[1].get<double>(), p[2].get<double>())));
            CHECK(best < 1e-8);
        }
        std::istringstream csv(slurp(dir / "out" / "surface.csv"));
        std::string line;
        std::getline(csv, line);
        CHECK(line == "x,y,z,kernel_surface,dual_surface");
        std::size_t rows = 0;
        while (std::getline(csv, line)) {
            std::istringstream row(line);
            double v[5];
            char comma;
            row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4];
            CHECK(v[3] >= 1.0);
            CHECK(v[4] >= 1.0 - 1e-9);
            CHECK(v[4] <= 1.5 + 1e-9);
            ++rows;
        }
        CHECK(rows == 180);
    }
    SUBCASE("empty kernel leaves no files")
    {
        const auto dir = scratch("certify_empty");
        const std::vector<Eigen::Vector3d> pts{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, Eigen::Vector3d(1, 1, 1).normalized()};
        write_json(dir / "ensemble.json", to_json(SphereEnsemble(pts, {1.0, 1.0, 1.0, 1.0})));
        CHECK(run("certify --ensemble " + q(dir / "ensemble.json") + " --order 1 --out " + q(dir / "out"), dir / "log") == 2);
        CHECK(!fs::exists(dir / "out" / "surface.csv"));
        CHECK(!fs::exists(dir / "out" / "certificate.json"));
        CHECK(slurp(dir / "log.err").find("\"error\"") != std::string::npos);
    }
    SUBCASE("torus input is rejected")
    {
        const auto dir = scratch("certify_torus");
        REQUIRE(run("simulate --domain torus:1 --sparsity 2 --seed 1 --out " + q(dir), dir / "log") == 0);
        CHECK(run("certify --in " + q(dir / "moments.json") + " --out " + q(dir / "out"), dir / "log") == 1);
    }
}

TEST_CASE("validate and exit codes")
{
    const auto dir = scratch("validate");
    REQUIRE(run("simulate --domain sphere --sparsity 3 --separation 0.5 --seed 4 --order 3 --minimal-moments --out " + q(dir),
                dir / "log") == 0);
    CHECK(run("validate --in " + q(dir / "moments.json"), dir / "log") == 0);
    CHECK(run("validate --in " + q(dir / "ensemble.json"), dir / "log") == 0);
    CHECK(run("validate --in " + q(dir / "moments.json") + " --order 3", dir / "log") == 0);
    CHECK(run("validate --in " + q(dir / "moments.json") + " --order 4", dir / "log") == 1);

    Json m = read_json(dir / "moments.json");
    m["entries"].erase(2);
    write_json(dir / "holey.json", m);
    CHECK(run("validate --in " + q(dir / "holey.json"), dir / "log") == 1);
    CHECK(slurp(dir / "log.err").find("missing index") != std::string::npos);
    CHECK(run("reconstruct --in " + q(dir / "holey.json"), dir / "log") == 1);

    CHECK(run("validate --in " + q(dir / "nope.json"), dir / "log") == 1);
    CHECK(run("frobnicate", dir / "log") == 1);
    CHECK(run("simulate --domain torus:1 --sparsity 10 --separation 0.1 --seed 1 --out " + q(dir / "x"), dir / "log") == 1);
    CHECK(slurp(dir / "log.err").find("largest achieved separation") != std::string::npos);
}
