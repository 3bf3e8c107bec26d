#include "hhoplast/io/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace hhoplast {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed)
{
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail("unknown key '" + where + it.key() + "'");
}

double as_number(const json& j, const std::string& key)
{
    if (!j.is_number())
        fail("'" + key + "' must be a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& key)
{
    if (!j.is_number_integer())
        fail("'" + key + "' must be an integer");
    return j.get<int>();
}

bool as_bool(const json& j, const std::string& key)
{
    if (!j.is_boolean())
        fail("'" + key + "' must be a boolean");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& key)
{
    if (!j.is_string())
        fail("'" + key + "' must be a string");
    return j.get<std::string>();
}

Vec3 as_vec3(const json& j, const std::string& key)
{
    if (!j.is_array() || j.size() > 3)
        fail("'" + key + "' must be an array of at most 3 numbers");
    Vec3 v = Vec3::Zero();
    for (std::size_t i = 0; i < j.size(); i++)
        v[static_cast<int>(i)] = as_number(j[i], key);
    return v;
}

// accepts "name" in MPa or "name_GPa"; at most one of the two
double modulus_mpa(const json& j, const std::string& block, const std::string& name,
                   bool required, double fallback)
{
    const std::string alt = name + "_GPa";
    const bool has_mpa = j.contains(name), has_gpa = j.contains(alt);
    if (has_mpa && has_gpa)
        fail("'" + block + name + "' and '" + block + alt + "' are mutually exclusive");
    if (has_mpa)
        return as_number(j.at(name), block + name);
    if (has_gpa)
        return 1e3 * as_number(j.at(alt), block + alt);
    if (required)
        fail("missing key '" + block + name + "'");
    return fallback;
}

MaterialParams parse_material(const json& j)
{
    check_keys(j, "material.",
               { "young", "young_GPa", "poisson", "hardening", "hardening_GPa", "sigma_y0",
                 "sigma_y0_GPa", "sigma_yinf", "sigma_yinf_GPa", "saturation" });
    MaterialParams mp;
    mp.young = modulus_mpa(j, "material.", "young", true, 0.0);
    if (!j.contains("poisson"))
        fail("missing key 'material.poisson'");
    mp.poisson = as_number(j.at("poisson"), "material.poisson");
    mp.hardening = modulus_mpa(j, "material.", "hardening", false, 0.0);
    mp.sigma_y0 = modulus_mpa(j, "material.", "sigma_y0", false, 0.0);
    mp.sigma_yinf = modulus_mpa(j, "material.", "sigma_yinf", false, mp.sigma_y0);
    if (j.contains("saturation"))
        mp.saturation = as_number(j.at("saturation"), "material.saturation");
    return mp;
}

void parse_mesh(const json& j, ProblemConfig& cfg)
{
    check_keys(j, "mesh.", { "file", "cell", "divisions", "merge_fraction", "merge_seed" });
    if (j.contains("file")) {
        cfg.mesh_from_file = true;
        cfg.mesh_path = as_string(j.at("file"), "mesh.file");
    }
    if (j.contains("cell")) {
        cfg.cell_kind = as_string(j.at("cell"), "mesh.cell");
        static const std::set<std::string> kinds { "quad", "triangle", "hex", "tet" };
        if (!kinds.count(cfg.cell_kind))
            fail("'mesh.cell' must be one of quad, triangle, hex, tet");
    }
    if (j.contains("divisions")) {
        const json& d = j.at("divisions");
        if (!d.is_array() || d.empty() || d.size() > 3)
            fail("'mesh.divisions' must be an array of 1 to 3 integers");
        for (std::size_t i = 0; i < d.size(); i++) {
            cfg.divisions[i] = as_int(d[i], "mesh.divisions");
            if (cfg.divisions[i] < 1)
                fail("'mesh.divisions' entries must be positive");
        }
        for (std::size_t i = d.size(); i < 3; i++)
            cfg.divisions[i] = cfg.divisions[0];
    }
    if (j.contains("merge_fraction")) {
        cfg.merge_fraction = as_number(j.at("merge_fraction"), "mesh.merge_fraction");
        if (cfg.merge_fraction < 0.0 || cfg.merge_fraction >= 1.0)
            fail("'mesh.merge_fraction' must lie in [0, 1)");
    }
    if (j.contains("merge_seed")) {
        if (!j.at("merge_seed").is_number_unsigned())
            fail("'mesh.merge_seed' must be a non-negative integer");
        cfg.merge_seed = j.at("merge_seed").get<std::uint64_t>();
    }
}

void parse_solver(const json& j, SolverOptions& s)
{
    check_keys(j, "solver.",
               { "beta0", "rtol", "equil_rtol", "abs_floor", "max_iterations", "max_halvings",
                 "max_total_steps", "parallel", "verbose" });
    if (j.contains("beta0")) {
        s.beta0 = as_number(j.at("beta0"), "solver.beta0");
        if (s.beta0 <= 0.0)
            fail("'solver.beta0' must be positive");
    }
    if (j.contains("rtol")) {
        s.newton.rtol = as_number(j.at("rtol"), "solver.rtol");
        if (s.newton.rtol <= 0.0)
            fail("'solver.rtol' must be positive");
    }
    if (j.contains("equil_rtol"))
        s.newton.equil_rtol = as_number(j.at("equil_rtol"), "solver.equil_rtol");
    if (j.contains("abs_floor"))
        s.newton.abs_floor = as_number(j.at("abs_floor"), "solver.abs_floor");
    if (j.contains("max_iterations")) {
        s.newton.max_iterations = as_int(j.at("max_iterations"), "solver.max_iterations");
        if (s.newton.max_iterations < 1)
            fail("'solver.max_iterations' must be positive");
    }
    if (j.contains("max_halvings")) {
        s.max_halvings = as_int(j.at("max_halvings"), "solver.max_halvings");
        if (s.max_halvings < 0)
            fail("'solver.max_halvings' must be non-negative");
    }
    if (j.contains("max_total_steps")) {
        s.max_total_steps = as_int(j.at("max_total_steps"), "solver.max_total_steps");
        if (s.max_total_steps < 1)
            fail("'solver.max_total_steps' must be positive");
    }
    if (j.contains("parallel"))
        s.parallel = as_bool(j.at("parallel"), "solver.parallel");
    if (j.contains("verbose"))
        s.verbose = as_bool(j.at("verbose"), "solver.verbose");
}

void parse_custom_bcs(const json& j, ProblemConfig& cfg)
{
    if (!j.is_array())
        fail("'boundary' must be an array");
    for (const json& b : j) {
        check_keys(b, "boundary[].", { "tag", "type", "mask", "value" });
        ProblemConfig::CustomBc bc;
        if (!b.contains("tag"))
            fail("missing key 'boundary[].tag'");
        bc.tag = as_string(b.at("tag"), "boundary[].tag");
        if (b.contains("type")) {
            const std::string t = as_string(b.at("type"), "boundary[].type");
            if (t == "dirichlet")
                bc.dirichlet = true;
            else if (t == "neumann")
                bc.dirichlet = false;
            else
                fail("'boundary[].type' must be dirichlet or neumann");
        }
        if (b.contains("mask")) {
            const json& m = b.at("mask");
            if (!m.is_array() || m.size() > 3)
                fail("'boundary[].mask' must be an array of at most 3 booleans");
            bc.mask = { false, false, false };
            for (std::size_t i = 0; i < m.size(); i++)
                bc.mask[i] = as_bool(m[i], "boundary[].mask");
        }
        if (b.contains("value"))
            bc.value = as_vec3(b.at("value"), "boundary[].value");
        cfg.custom_bcs.push_back(bc);
    }
}

} // namespace

ProblemConfig parse_config_text(const std::string& text, const std::string& label)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("config is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object())
        fail("config must be a JSON object");

    for (const char* req : { "benchmark", "degrees", "material" })
        if (!j.contains(req))
            fail("missing required keys; a config needs at least: benchmark, degrees, material");

    check_keys(j, "",
               { "benchmark", "mesh", "degrees", "experimental_lowest_order", "quadrature_order",
                 "material", "law", "solver", "steps", "load_scale", "load_kN", "follower_load",
                 "boundary", "body_force", "output" });

    ProblemConfig cfg;
    cfg.source_path = label;
    cfg.canonical_text = j.dump(); // nlohmann objects iterate in key order

    cfg.benchmark = as_string(j.at("benchmark"), "benchmark");
    static const std::set<std::string> benchmarks { "cook", "necking", "sphere", "custom" };
    if (!benchmarks.count(cfg.benchmark))
        fail("'benchmark' must be one of cook, necking, sphere, custom");

    if (j.contains("mesh"))
        parse_mesh(j.at("mesh"), cfg);

    {
        const json& d = j.at("degrees");
        check_keys(d, "degrees.", { "face", "cell" });
        if (!d.contains("face"))
            fail("missing key 'degrees.face'");
        cfg.degrees.k = as_int(d.at("face"), "degrees.face");
        cfg.degrees.l =
            d.contains("cell") ? as_int(d.at("cell"), "degrees.cell") : cfg.degrees.k;
    }
    if (j.contains("experimental_lowest_order"))
        cfg.allow_lowest_order = as_bool(j.at("experimental_lowest_order"),
                                         "experimental_lowest_order");
    try {
        cfg.degrees.validate(cfg.allow_lowest_order);
    } catch (const std::invalid_argument& e) {
        fail(std::string("'degrees': ") + e.what());
    }

    if (j.contains("quadrature_order")) {
        cfg.quadrature_order = as_int(j.at("quadrature_order"), "quadrature_order");
        if (cfg.quadrature_order < 2 * cfg.degrees.k)
            fail("'quadrature_order' must be at least 2 * degrees.face");
    }

    cfg.material = parse_material(j.at("material"));

    if (j.contains("law")) {
        const std::string l = as_string(j.at("law"), "law");
        if (l == "finite_plasticity")
            cfg.law = MaterialLaw::finite_plasticity;
        else if (l == "linear_elastic")
            cfg.law = MaterialLaw::linear_elastic;
        else
            fail("'law' must be finite_plasticity or linear_elastic");
    }
    try {
        if (cfg.law == MaterialLaw::finite_plasticity)
            cfg.material.validate();
        else if (cfg.material.mu() <= 0.0 || 3.0 * cfg.material.lambda() + 2.0 * cfg.material.mu() <= 0.0)
            fail("elastic moduli must be positive definite");
    } catch (const std::invalid_argument& e) {
        fail(std::string("'material': ") + e.what());
    }

    if (j.contains("solver"))
        parse_solver(j.at("solver"), cfg.solver);

    if (j.contains("steps")) {
        cfg.steps = as_int(j.at("steps"), "steps");
        if (cfg.steps < 0)
            fail("'steps' must be non-negative");
    }
    if (j.contains("load_scale"))
        cfg.load_scale = as_number(j.at("load_scale"), "load_scale");
    if (j.contains("load_kN")) {
        if (cfg.benchmark != "cook")
            fail("'load_kN' only applies to the cook benchmark");
        cfg.load_scale = as_number(j.at("load_kN"), "load_kN") / 5.0; // 5 kN nominal
    }
    if (j.contains("follower_load"))
        cfg.follower_load = as_bool(j.at("follower_load"), "follower_load");

    if (j.contains("boundary")) {
        if (cfg.benchmark != "custom")
            fail("'boundary' only applies to the custom benchmark");
        parse_custom_bcs(j.at("boundary"), cfg);
    }
    if (j.contains("body_force")) {
        if (cfg.benchmark != "custom")
            fail("'body_force' only applies to the custom benchmark");
        cfg.body_force = as_vec3(j.at("body_force"), "body_force");
    }
    if (cfg.benchmark == "custom" && !cfg.mesh_from_file && cfg.divisions[0] == 0)
        fail("the custom benchmark needs 'mesh.file' or 'mesh.divisions'");

    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output.", { "dir", "fields", "curves" });
        if (o.contains("dir"))
            cfg.output_dir = as_string(o.at("dir"), "output.dir");
        if (o.contains("fields"))
            cfg.write_fields = as_bool(o.at("fields"), "output.fields");
        if (o.contains("curves"))
            cfg.write_curves = as_bool(o.at("curves"), "output.curves");
    }
    return cfg;
}

ProblemConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::uint64_t config_hash(const ProblemConfig& cfg)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : cfg.canonical_text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace hhoplast
