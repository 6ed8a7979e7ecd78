#include "run_config.hpp"

#include <adol/error.hpp>

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace adol::cli {

using nlohmann::json;

namespace {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError("config: " + where() + "expected an object");
    }

    void get(const char* key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) fail(key, "expected a number");
            out = v->get<double>();
        }
    }
    void get(const char* key, int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) fail(key, "expected an integer");
            const auto x = v->get<long long>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                fail(key, "integer out of range");
            out = static_cast<int>(x);
        }
    }
    void get(const char* key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }
    void get(const char* key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) fail(key, "expected true or false");
            out = v->get<bool>();
        }
    }
    void get(const char* key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) fail(key, "expected a string");
            out = v->get<std::string>();
        }
    }
    void get(const char* key, std::vector<double>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) fail(key, "expected an array of numbers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) fail(key, "expected an array of numbers");
                out.push_back(e.get<double>());
            }
        }
    }
    /// Nested object; returns nullptr when absent.
    const json* object(const char* key) { return find(key); }

    std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (const auto& [k, _] : j_.items())
            if (!seen_.count(k)) throw ValidationError("config: unknown key '" + child(k.c_str()) + "'");
    }

private:
    const json* find(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    [[noreturn]] void fail(const char* key, const char* what) const {
        throw ValidationError("config: " + child(key) + ": " + what);
    }
    std::string where() const { return path_.empty() ? "" : path_ + ": "; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_quad(Reader& parent, const char* key, QuadratureSpec& q) {
    if (const json* v = parent.object(key)) {
        Reader r(*v, parent.child(key));
        r.get("abs_tol", q.abs_tol);
        r.get("rel_tol", q.rel_tol);
        r.get("max_subdivisions", q.max_subdivisions);
        r.finish();
    }
}

json quad_json(const QuadratureSpec& q) {
    return {{"abs_tol", q.abs_tol}, {"rel_tol", q.rel_tol}, {"max_subdivisions", q.max_subdivisions}};
}

template <class F>
void with_prefix(const std::string& block, F&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        throw ValidationError(msg.rfind("config:", 0) == 0 ? msg : "config: " + block + ": " + msg);
    } catch (const DomainError& e) {
        throw ValidationError("config: " + block + ": " + e.what());
    }
}

}  // namespace

RunConfig parse_config(const json& j) {
    RunConfig c;
    Reader root(j, "");

    if (const json* v = root.object("model")) {
        Reader r(*v, "model");
        AdolModel& m = c.model;
        r.get("s0", m.s0);
        r.get("sigma0", m.sigma0);
        r.get("v0", m.v0);
        r.get("r", m.r);
        r.get("q", m.q);
        r.get("mu", m.mu);
        r.get("kappa", m.kappa);
        r.get("theta", m.theta);
        r.get("xi", m.xi);
        r.get("rho", m.rho);
        r.get("lambda", m.lambda);
        r.get("h", m.h);
        r.get("m_rho", m.m_rho);
        r.get("m_pi", m.m_pi);
        r.get("eps", m.eps);
        r.get("t_mat", m.t_mat);
        r.finish();
    }
    if (const json* v = root.object("constants")) {
        Reader r(*v, "constants");
        r.get("h_min", c.constants.h_min);
        r.get("h_max", c.constants.h_max);
        r.get("h_points", c.constants.h_points);
        r.finish();
    }
    if (const json* v = root.object("cf")) {
        Reader r(*v, "cf");
        CorrectionConfig& k = c.cf.cfg;
        std::string mode = to_string(k.mode), jm = to_string(k.j_method);
        r.get("mode", mode);
        r.get("order", k.order);
        r.get("sigma_step", k.sigma_step);
        r.get("v_step", k.v_step);
        r.get("j_method", jm);
        r.get("time_panels", k.time_panels);
        r.get("hermite_nodes", k.hermite_nodes);
        read_quad(r, "quad", k.quad);
        if (const json* o = r.object("ode")) {
            Reader ro(*o, "cf.ode");
            ro.get("rel_tol", k.ode.rel_tol);
            ro.get("abs_tol", k.ode.abs_tol);
            ro.get("max_step", k.ode.max_step);
            ro.finish();
        }
        r.get("u_min", c.cf.u_min);
        r.get("u_max", c.cf.u_max);
        r.get("u_points", c.cf.u_points);
        r.finish();
        with_prefix("cf.mode", [&] { k.mode = parse_cf_mode(mode); });
        with_prefix("cf.j_method", [&] { k.j_method = parse_j_method(jm); });
    }
    if (const json* v = root.object("pricing")) {
        Reader r(*v, "pricing");
        r.get("damping", c.pricing.spec.damping);
        r.get("u_max", c.pricing.spec.u_max);
        r.get("n_points", c.pricing.spec.n_points);
        read_quad(r, "quad", c.pricing.spec.quad);
        r.get("strikes", c.pricing.strikes);
        r.get("is_call", c.pricing.is_call);
        r.get("method", c.pricing.method);
        r.get("include_mc", c.pricing.include_mc);
        r.finish();
    }
    if (const json* v = root.object("mc")) {
        Reader r(*v, "mc");
        std::uint64_t n_paths = c.mc.n_paths;
        r.get("n_paths", n_paths);
        c.mc.n_paths = static_cast<std::size_t>(n_paths);
        r.get("n_steps", c.mc.n_steps);
        r.get("seed", c.mc.seed);
        r.get("t_start", c.mc.t_start);
        r.get("antithetic", c.mc.antithetic);
        r.get("threads", c.mc.threads);
        r.finish();
    }
    if (const json* v = root.object("varswap")) {
        Reader r(*v, "varswap");
        r.get("observation_times", c.varswap.observation_times);
        r.get("u_step", c.varswap.u_step);
        r.get("mc_states", c.varswap.mc_states);
        r.get("mc_steps", c.varswap.mc_steps);
        r.get("seed", c.varswap.seed);
        r.finish();
    }
    if (const json* v = root.object("output")) {
        Reader r(*v, "output");
        r.get("directory", c.output.directory);
        r.get("format_version", c.output.format_version);
        r.finish();
    }
    root.finish();
    resolve(c);
    return c;
}

void resolve(RunConfig& c) {
    with_prefix("model", [&] { c.model.validate(); });
    if (c.varswap.observation_times.empty())
        for (int i = 1; i <= 4; ++i) c.varswap.observation_times.push_back(c.model.t_mat * i / 4.0);
    if (c.pricing.strikes.empty())
        for (int i = 0; i <= 8; ++i) c.pricing.strikes.push_back(c.model.s0 * (16 + i) / 20.0);

    with_prefix("cf", [&] { c.cf.cfg.validate(); });
    with_prefix("pricing", [&] { c.pricing.spec.validate(); });
    with_prefix("mc", [&] { c.mc.validate(); });
    with_prefix("varswap", [&] { c.varswap.validate(c.model.t_mat); });

    const auto& k = c.constants;
    ADOL_REQUIRE(k.h_min > 0.0 && k.h_max < 1.0 && k.h_min <= k.h_max, ValidationError,
                 "config: constants: need 0 < h_min <= h_max < 1");
    ADOL_REQUIRE(k.h_points >= 1 && k.h_points <= 100000, ValidationError,
                 "config: constants.h_points must lie in [1, 100000]");
    ADOL_REQUIRE(c.cf.u_min <= c.cf.u_max && c.cf.u_points >= 1 && c.cf.u_points <= 100000, ValidationError,
                 "config: cf: need u_min <= u_max and 1 <= u_points <= 100000");
    for (double s : c.pricing.strikes)
        ADOL_REQUIRE(s > 0.0, ValidationError, "config: pricing.strikes must be positive");
    ADOL_REQUIRE(c.pricing.method == "quadrature" || c.pricing.method == "fft", ValidationError,
                 "config: pricing.method must be 'quadrature' or 'fft'");
    ADOL_REQUIRE(c.output.format_version == 1, ValidationError, "config: output.format_version must be 1");
    ADOL_REQUIRE(!c.output.directory.empty(), ValidationError, "config: output.directory must not be empty");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, false);
    } catch (const json::parse_error& e) {
        throw ValidationError("config: " + path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    const AdolModel& m = c.model;
    const CorrectionConfig& k = c.cf.cfg;
    json j;
    j["model"] = {{"s0", m.s0},       {"sigma0", m.sigma0}, {"v0", m.v0},       {"r", m.r},
                  {"q", m.q},         {"mu", m.mu},         {"kappa", m.kappa}, {"theta", m.theta},
                  {"xi", m.xi},       {"rho", m.rho},       {"lambda", m.lambda}, {"h", m.h},
                  {"m_rho", m.m_rho}, {"m_pi", m.m_pi},     {"eps", m.eps},     {"t_mat", m.t_mat}};
    j["constants"] = {{"h_min", c.constants.h_min},
                      {"h_max", c.constants.h_max},
                      {"h_points", c.constants.h_points}};
    j["cf"] = {{"mode", to_string(k.mode)},
               {"order", k.order},
               {"sigma_step", k.sigma_step},
               {"v_step", k.v_step},
               {"j_method", to_string(k.j_method)},
               {"time_panels", k.time_panels},
               {"hermite_nodes", k.hermite_nodes},
               {"quad", quad_json(k.quad)},
               {"ode", {{"rel_tol", k.ode.rel_tol}, {"abs_tol", k.ode.abs_tol}, {"max_step", k.ode.max_step}}},
               {"u_min", c.cf.u_min},
               {"u_max", c.cf.u_max},
               {"u_points", c.cf.u_points}};
    j["pricing"] = {{"damping", c.pricing.spec.damping},
                    {"u_max", c.pricing.spec.u_max},
                    {"n_points", c.pricing.spec.n_points},
                    {"quad", quad_json(c.pricing.spec.quad)},
                    {"strikes", c.pricing.strikes},
                    {"is_call", c.pricing.is_call},
                    {"method", c.pricing.method},
                    {"include_mc", c.pricing.include_mc}};
    j["mc"] = {{"n_paths", c.mc.n_paths},       {"n_steps", c.mc.n_steps},
               {"seed", c.mc.seed},             {"t_start", c.mc.t_start},
               {"antithetic", c.mc.antithetic}, {"threads", c.mc.threads}};
    j["varswap"] = {{"observation_times", c.varswap.observation_times},
                    {"u_step", c.varswap.u_step},
                    {"mc_states", c.varswap.mc_states},
                    {"mc_steps", c.varswap.mc_steps},
                    {"seed", c.varswap.seed}};
    j["output"] = {{"directory", c.output.directory}, {"format_version", c.output.format_version}};
    return j;
}

}  // namespace adol::cli
