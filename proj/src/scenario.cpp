#include "orbitlab/scenario.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "orbitlab/kernels.hpp"
#include "orbitlab/random.hpp"

namespace orbitlab::scenario {

namespace {

constexpr std::uint64_t kSeedVectorSalt = 0x7365'6564'7665ULL;
constexpr std::uint64_t kProbeSalt = 0x7072'6f62'6573ULL;
constexpr std::uint64_t kDenseOpSalt = 0x646e'734f'7065ULL;

[[noreturn]] void fail_field(const std::string& field, const std::string& why) {
    throw InvalidInput("config field '" + field + "': " + why);
}

cplx parse_complex(const ordered_json& j, const std::string& field) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    fail_field(field, "expected a number or [re, im]");
}

std::vector<cplx> parse_coeff_list(const ordered_json& j, std::size_t dim, const std::string& field) {
    std::vector<cplx> out;
    if (j.is_object() && j.contains("ramp")) {
        const auto& r = j.at("ramp");
        const cplx from = parse_complex(r.at("from"), field + ".ramp.from");
        const cplx to = parse_complex(r.at("to"), field + ".ramp.to");
        out.reserve(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const double t = dim > 1 ? static_cast<double>(i) / static_cast<double>(dim - 1) : 0.0;
            out.push_back(from + (to - from) * t);
        }
        return out;
    }
    if (!j.is_array()) fail_field(field, "expected an array or {\"ramp\": {...}}");
    if (j.size() != dim)
        fail_field(field, "expected " + std::to_string(dim) + " entries, got " + std::to_string(j.size()));
    out.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i)
        out.push_back(parse_complex(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

op::OperatorSpec parse_operator(const ordered_json& o, std::size_t dim, std::uint64_t scen_seed,
                                const std::string& field) {
    if (!o.is_object() || !o.contains("kind")) fail_field(field, "expected an object with 'kind'");
    const std::string kind = o.at("kind").get<std::string>();
    if (kind == "unilateral_shift") return op::OperatorSpec::unilateral_shift(dim);
    if (kind == "weighted_shift")
        return op::OperatorSpec::weighted_shift(parse_coeff_list(o.at("weights"), dim, field + ".weights"));
    if (kind == "diagonal")
        return op::OperatorSpec::diagonal(parse_coeff_list(o.at("entries"), dim, field + ".entries"));
    if (kind == "dense") {
        if (o.contains("matrix")) {
            const auto& rows = o.at("matrix");
            if (!rows.is_array() || rows.size() != dim) fail_field(field + ".matrix", "expected dim rows");
            std::vector<cplx> m;
            m.reserve(dim * dim);
            for (std::size_t r = 0; r < dim; ++r) {
                const std::vector<cplx> row =
                    parse_coeff_list(rows[r], dim, field + ".matrix[" + std::to_string(r) + "]");
                m.insert(m.end(), row.begin(), row.end());
            }
            return op::OperatorSpec::dense(std::move(m), dim);
        }
        if (o.contains("random")) {
            const auto& r = o.at("random");
            const std::uint64_t seed = r.contains("seed") ? r.at("seed").get<std::uint64_t>() : scen_seed;
            const double scale = r.contains("scale") ? r.at("scale").get<double>() : 1.0;
            const cplx diag_shift = r.contains("diag_shift")
                                        ? parse_complex(r.at("diag_shift"), field + ".random.diag_shift")
                                        : cplx(0, 0);
            Rng rng(mix_seed(seed, kDenseOpSalt));
            std::vector<cplx> m(dim * dim);
            // entries ~ scale/sqrt(2 dim) * standard complex gaussian keeps
            // the spectrum in a disk of radius about `scale`
            const double s = scale / std::sqrt(2.0 * static_cast<double>(dim));
            for (auto& e : m) e = s * rng.gaussian_cplx();
            for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] += diag_shift;
            return op::OperatorSpec::dense(std::move(m), dim);
        }
        fail_field(field, "dense operator needs 'matrix' or 'random'");
    }
    if (kind == "scaled_sum") {
        if (!o.contains("terms") || !o.at("terms").is_array() || o.at("terms").empty())
            fail_field(field + ".terms", "expected a nonempty array");
        std::vector<cplx> coeffs;
        std::vector<op::OperatorSpec> terms;
        std::size_t i = 0;
        for (const auto& t : o.at("terms")) {
            const std::string tf = field + ".terms[" + std::to_string(i++) + "]";
            coeffs.push_back(parse_complex(t.at("coeff"), tf + ".coeff"));
            terms.push_back(parse_operator(t.at("op"), dim, scen_seed, tf + ".op"));
        }
        return op::OperatorSpec::scaled_sum(std::move(coeffs), std::move(terms));
    }
    if (kind == "composition") {
        if (!o.contains("factors") || !o.at("factors").is_array() || o.at("factors").empty())
            fail_field(field + ".factors", "expected a nonempty array");
        std::vector<op::OperatorSpec> factors;
        std::size_t i = 0;
        for (const auto& f : o.at("factors"))
            factors.push_back(parse_operator(f, dim, scen_seed, field + ".factors[" + std::to_string(i++) + "]"));
        return op::OperatorSpec::composition(std::move(factors));
    }
    fail_field(field + ".kind", "unknown operator kind '" + kind + "'");
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_atomic(const std::filesystem::path& target, const std::string& content) {
    namespace fs = std::filesystem;
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out)
            throw fs::filesystem_error("write failed", tmp,
                                       std::make_error_code(std::errc::io_error));
    }
    fs::rename(tmp, target);
}

}  // namespace

void ScenarioConfig::validate() const {
    if (name.empty()) fail_field("name", "must be nonempty");
    if (dim < 2) fail_field("dim", "must be >= 2");
    if (depth == 0) fail_field("depth", "must be >= 1");
    if (depth > dim - dim / 4)
        fail_field("depth", "must be <= dim - dim/4 = " + std::to_string(dim - dim / 4) +
                                " (depth margin keeps the truncation edge out of the orbit)");
    if (!operator_desc.is_object()) fail_field("operator", "must be an object");
    if (seed_vector.kind == SeedVectorSpec::Kind::canonical &&
        (seed_vector.index < 1 || seed_vector.index > dim))
        fail_field("seed_vector.index", "must be in 1..dim");
    if (probes.canonical_max_index > dim)
        fail_field("probes.canonical_max_index", "must be <= dim");
    if (probes.random_count > 4096) fail_field("probes.random_count", "unreasonably large");
    gscfg.thresholds.validate();
}

op::OperatorSpec ScenarioConfig::build_operator() const {
    return parse_operator(operator_desc, dim, seed, "operator");
}

HVector ScenarioConfig::build_seed() const {
    switch (seed_vector.kind) {
        case SeedVectorSpec::Kind::canonical: {
            HVector x(dim, cplx(0, 0));
            x[seed_vector.index - 1] = 1.0;
            return x;
        }
        case SeedVectorSpec::Kind::all_ones:
            return HVector(dim, cplx(1, 0));
        case SeedVectorSpec::Kind::random: {
            Rng rng(mix_seed(seed_vector.seed, kSeedVectorSalt));
            return rng.unit_vector(dim);
        }
    }
    throw InvalidInput("seed_vector: unknown kind");
}

std::vector<std::string> ScenarioConfig::probe_labels() const {
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= probes.canonical_max_index; ++i)
        labels.push_back("e" + std::to_string(i));
    if (probes.include_seed_direction) labels.push_back("seed_dir");
    for (std::size_t i = 1; i <= probes.random_count; ++i)
        labels.push_back("rand" + std::to_string(i));
    return labels;
}

std::vector<HVector> ScenarioConfig::build_probes(const HVector& x) const {
    std::vector<HVector> ps;
    for (std::size_t i = 1; i <= probes.canonical_max_index; ++i) {
        HVector e(dim, cplx(0, 0));
        e[i - 1] = 1.0;
        ps.push_back(std::move(e));
    }
    if (probes.include_seed_direction) {
        HVector d = x;
        const double nx = kernels::norm(x);
        for (auto& c : d) c /= nx;
        ps.push_back(std::move(d));
    }
    Rng rng(mix_seed(seed, kProbeSalt));
    for (std::size_t i = 0; i < probes.random_count; ++i) ps.push_back(rng.unit_vector(dim));
    return ps;
}

ordered_json ScenarioConfig::to_json() const {
    ordered_json j;
    j["name"] = name;
    j["dim"] = dim;
    j["depth"] = depth;
    j["seed"] = seed;
    j["operator"] = operator_desc;
    ordered_json sv;
    switch (seed_vector.kind) {
        case SeedVectorSpec::Kind::canonical:
            sv["kind"] = "canonical";
            sv["index"] = seed_vector.index;
            break;
        case SeedVectorSpec::Kind::all_ones:
            sv["kind"] = "all_ones";
            break;
        case SeedVectorSpec::Kind::random:
            sv["kind"] = "random";
            sv["seed"] = seed_vector.seed;
            break;
    }
    j["seed_vector"] = sv;
    j["probes"] = ordered_json{{"canonical_max_index", probes.canonical_max_index},
                               {"include_seed_direction", probes.include_seed_direction},
                               {"random_count", probes.random_count}};
    j["gs"] = ordered_json{
        {"variant", gscfg.variant == gs::Variant::modified ? "modified" : "classical"},
        {"reorthogonalize", gscfg.reorthogonalize}};
    const ToleranceConfig& t = gscfg.thresholds;
    j["tolerances"] = ordered_json{{"ortho_tol", t.ortho_tol},
                                   {"breakdown_tol", t.breakdown_tol},
                                   {"eq_slack", t.eq_slack},
                                   {"reorthog_threshold", t.reorthog_threshold}};
    return j;
}

ScenarioConfig config_from_json(const ordered_json& j) {
    if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
    static const std::set<std::string> known = {"name", "dim",    "depth",  "seed",      "operator",
                                               "seed_vector", "probes", "gs", "tolerances"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) fail_field(key, "unknown key");

    ScenarioConfig cfg;
    try {
        cfg.name = j.at("name").get<std::string>();
        cfg.dim = j.at("dim").get<std::size_t>();
        cfg.depth = j.at("depth").get<std::size_t>();
        cfg.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
        cfg.operator_desc = j.at("operator");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }

    if (j.contains("seed_vector")) {
        const auto& sv = j.at("seed_vector");
        const std::string kind = sv.at("kind").get<std::string>();
        if (kind == "canonical") {
            cfg.seed_vector.kind = SeedVectorSpec::Kind::canonical;
            cfg.seed_vector.index = sv.contains("index") ? sv.at("index").get<std::size_t>() : 1;
        } else if (kind == "all_ones") {
            cfg.seed_vector.kind = SeedVectorSpec::Kind::all_ones;
        } else if (kind == "random") {
            cfg.seed_vector.kind = SeedVectorSpec::Kind::random;
            cfg.seed_vector.seed = sv.contains("seed") ? sv.at("seed").get<std::uint64_t>() : cfg.seed;
        } else {
            fail_field("seed_vector.kind", "expected canonical|all_ones|random");
        }
    }

    cfg.probes.canonical_max_index = cfg.depth;  // default: every index probed by the chain
    if (j.contains("probes")) {
        const auto& p = j.at("probes");
        if (p.contains("canonical_max_index"))
            cfg.probes.canonical_max_index = p.at("canonical_max_index").get<std::size_t>();
        if (p.contains("include_seed_direction"))
            cfg.probes.include_seed_direction = p.at("include_seed_direction").get<bool>();
        if (p.contains("random_count"))
            cfg.probes.random_count = p.at("random_count").get<std::size_t>();
    }

    if (j.contains("gs")) {
        const auto& g = j.at("gs");
        if (g.contains("variant")) {
            const std::string v = g.at("variant").get<std::string>();
            if (v == "modified")
                cfg.gscfg.variant = gs::Variant::modified;
            else if (v == "classical")
                cfg.gscfg.variant = gs::Variant::classical;
            else
                fail_field("gs.variant", "expected classical|modified");
        }
        if (g.contains("reorthogonalize"))
            cfg.gscfg.reorthogonalize = g.at("reorthogonalize").get<bool>();
    }

    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        ToleranceConfig& tol = cfg.gscfg.thresholds;
        if (t.contains("ortho_tol")) tol.ortho_tol = t.at("ortho_tol").get<double>();
        if (t.contains("breakdown_tol")) tol.breakdown_tol = t.at("breakdown_tol").get<double>();
        if (t.contains("eq_slack")) tol.eq_slack = t.at("eq_slack").get<double>();
        if (t.contains("reorthog_threshold"))
            tol.reorthog_threshold = t.at("reorthog_threshold").get<double>();
    }

    cfg.validate();
    (void)cfg.build_operator();  // surface operator-description errors at load time
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw InvalidInput("cannot open config file: " + file.string());
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("config parse error in " + file.string() + ": " + e.what());
    }
    return config_from_json(j);
}

RunReport run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const op::OperatorSpec T = cfg.build_operator();
    const HVector x = cfg.build_seed();
    const std::vector<HVector> probes = cfg.build_probes(x);
    const std::vector<std::string> labels = cfg.probe_labels();

    const auto t0 = std::chrono::steady_clock::now();
    const chain::VerdictRecord rec = chain::fourth_claim_verdict(T, x, cfg.depth, probes, cfg.gscfg);
    const auto t1 = std::chrono::steady_clock::now();

    RunReport out;
    out.name = cfg.name;
    out.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    ordered_json body;
    body["tool"] = ordered_json{{"name", kToolName}, {"version", kToolVersion}};
    body["config"] = cfg.to_json();

    ordered_json chainj;
    chainj["theta_count"] = rec.chain.theta.count();
    chainj["breakdown_index"] =
        rec.chain.breakdown_index ? ordered_json(*rec.chain.breakdown_index) : ordered_json(nullptr);
    chainj["rescale_count"] = rec.chain.rescale_count;
    ordered_json moduli = ordered_json::array();
    for (const cplx& c : rec.chain.a.values) moduli.push_back(std::abs(c));
    chainj["coefficient_moduli"] = std::move(moduli);
    chainj["residual_ladder"] = rec.chain.ladder();
    chainj["certificates"] = ordered_json{{"gram_defect", rec.chain.theta.gram_defect},
                                          {"span_residual_max", rec.chain.span_residual_max},
                                          {"pythagoras_defect_max", rec.chain.pythagoras_defect_max},
                                          {"reconstruction_error_max", rec.chain.reconstruction_error_max},
                                          {"tail_orthogonality_max", rec.chain.tail_orthogonality_max}};
    body["chain"] = std::move(chainj);

    ordered_json cyc;
    cyc["defect"] = rec.cyclicity.defect;
    cyc["dense_at_truncation"] = rec.cyclicity.dense_at_truncation;
    cyc["span_count"] = rec.cyclicity.span_count;
    cyc["span_cap"] = rec.cyclicity.span_cap;
    ordered_json pd;
    for (std::size_t i = 0; i < labels.size(); ++i) pd[labels[i]] = rec.cyclicity.probe_defects[i];
    cyc["probe_defects"] = std::move(pd);
    body["cyclicity"] = std::move(cyc);

    ordered_json weak;
    weak["steps"] = rec.chain.directions.size();
    weak["probe_labels"] = labels;
    weak["values"] = rec.weak.values;
    weak["bessel_bounds"] = rec.weak.bessel_bounds;
    weak["completeness_defects"] = rec.weak.completeness_defects;
    weak["eq1_max_ratio"] = rec.weak.eq1_max_ratio;
    body["weak_convergence"] = std::move(weak);

    body["verdict"] = chain::to_string(rec.verdict);
    body["verdict_rule"] =
        ordered_json{{"kind", "residual-ladder heuristic"},
                     {"collapse_floor", chain::kCollapseFloor},
                     {"stabilization_ratio", chain::kStabilizationRatio},
                     {"note", "verdict labels are heuristic; the certificates and the master "
                              "inequality are the hard checks"}};

    if (rec.invariant_subspace) {
        const auto& inv = *rec.invariant_subspace;
        body["invariant_subspace"] = ordered_json{
            {"span_count", inv.basis.count()},
            {"invariance_residual", inv.invariance_residual},
            {"nontrivial", inv.nontrivial},
            {"theta_containment_residual", rec.theta_containment_residual}};
    } else {
        body["invariant_subspace"] = nullptr;
    }

    out.body = std::move(body);
    return out;
}

std::vector<RunReport> run_batch(std::span<const ScenarioConfig> configs, unsigned parallelism) {
    if (parallelism == 0) throw InvalidInput("run_batch: parallelism must be >= 1");
    std::set<std::string> names;
    for (const auto& c : configs)
        if (!names.insert(c.name).second)
            throw InvalidInput("run_batch: duplicate scenario name '" + c.name + "'");

    std::vector<RunReport> results(configs.size());
    auto capture = [&](std::size_t i) {
        try {
            results[i] = run_scenario(configs[i]);
        } catch (const std::exception& e) {
            RunReport r;
            r.name = configs[i].name;
            r.exit_code = exit_code_for(e);
            r.error = e.what();
            results[i] = std::move(r);
        }
    };

    const unsigned workers =
        std::min<std::size_t>(parallelism, configs.size() ? configs.size() : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) capture(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1))
                    capture(i);
            });
        for (auto& t : pool) t.join();
    }
    return results;
}

std::vector<std::filesystem::path> emit_plot_data(const ordered_json& report_body,
                                                  const std::filesystem::path& dir) {
    const std::string name = report_body.at("config").at("name").get<std::string>();
    const auto& weak = report_body.at("weak_convergence");
    const auto& labels = weak.at("probe_labels");
    const auto& values = weak.at("values");
    const auto& bounds = weak.at("bessel_bounds");
    if (labels.empty()) {
        std::cerr << "warning: report '" << name << "' has no probes; nothing to plot\n";
        return {};
    }

    std::vector<std::filesystem::path> written;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        std::string csv = "n,value,bessel_bound\n";
        const auto& v = values[p];
        const auto& b = bounds[p];
        for (std::size_t n = 0; n < v.size(); ++n) {
            csv += std::to_string(n + 1);
            csv += ',';
            csv += fmt17(v[n].get<double>());
            csv += ',';
            csv += fmt17(b[n].get<double>());
            csv += '\n';
        }
        const std::filesystem::path file =
            dir / (name + "__" + labels[p].get<std::string>() + ".csv");
        write_text_atomic(file, csv);
        written.push_back(file);
    }
    return written;
}

ordered_json report_file_json(const RunReport& rep) {
    ordered_json j;
    j["report"] = rep.body;
    j["meta"] = ordered_json{{"wall_time_ms", rep.wall_time_ms}};
    return j;
}

std::filesystem::path write_report_file(const RunReport& rep, const std::filesystem::path& dir) {
    const std::filesystem::path file = dir / (rep.name + ".report.json");
    write_text_atomic(file, report_file_json(rep).dump(2) + "\n");
    return file;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InconsistencyError*>(&e)) return 3;
    if (dynamic_cast<const InvalidInput*>(&e)) return 1;
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 1;
    if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 1;
    if (dynamic_cast<const NumericFailure*>(&e)) return 2;
    return 2;
}

}  // namespace orbitlab::scenario
