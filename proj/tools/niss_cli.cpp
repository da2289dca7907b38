// Command-line front end: fourier / ortho / round / bound / scan / verify.
//
// Exit codes: 0 success, 2 parse failure, 3 validation or constraint
// failure, 4 size cap exceeded, 1 internal error. `scan` additionally exits
// non-zero when the sandwich check reports violations.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "niss/niss.hpp"

using nlohmann::json;
using namespace niss;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw niss::parse_error("cannot open input file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw niss::parse_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

std::vector<double> require_number_array(const json& j, const std::string& field) {
    if (!j.is_array()) throw niss::parse_error("field '" + field + "' must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw niss::parse_error("field '" + field + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

// Row-major entries of a rectangular matrix field.
std::vector<double> require_matrix(const json& j, const std::string& field, int& rows, int& cols) {
    if (!j.contains(field)) throw niss::parse_error("missing field '" + field + "'");
    const json& m = j.at(field);
    if (!m.is_array() || m.empty()) throw niss::parse_error("field '" + field + "' must be a non-empty array of rows");
    rows = static_cast<int>(m.size());
    cols = -1;
    std::vector<double> entries;
    for (const auto& row : m) {
        const auto r = require_number_array(row, field);
        if (cols < 0) cols = static_cast<int>(r.size());
        if (static_cast<int>(r.size()) != cols)
            throw niss::parse_error("field '" + field + "' has ragged rows");
        entries.insert(entries.end(), r.begin(), r.end());
    }
    if (cols < 1) throw niss::parse_error("field '" + field + "' has empty rows");
    return entries;
}

BinarySourceSpec load_source(const std::string& path) {
    const json j = load_json(path);
    int rows = 0, cols = 0;
    const auto e = require_matrix(j, "pxy", rows, cols);
    if (rows != 2 || cols != 2) throw niss::parse_error("field 'pxy' must be a 2x2 matrix");
    return BinarySourceSpec::from_pmf({{{e[0], e[1]}, {e[2], e[3]}}});
}

TargetSpec load_target(const std::string& path) {
    const json j = load_json(path);
    int rows = 0, cols = 0;
    auto e = require_matrix(j, "q", rows, cols);
    return TargetSpec::from_matrix(rows, cols, std::move(e));
}

LambdaWeights load_lambda(const std::string& path, int ku, int kv) {
    const json j = load_json(path);
    int rows = 0, cols = 0;
    auto e = require_matrix(j, "lambda", rows, cols);
    if (rows != ku - 1 || cols != kv - 1)
        throw niss::parse_error("field 'lambda' must be a (ku-1)x(kv-1) matrix");
    return LambdaWeights::from_matrix(ku, kv, std::move(e));
}

TruthTable load_table(const std::string& path) {
    const json j = load_json(path);
    if (!j.contains("d")) throw niss::parse_error("missing field 'd'");
    if (!j.at("d").is_number_integer()) throw niss::parse_error("field 'd' must be an integer");
    const int d = j.at("d").get<int>();
    if (d < 0 || d > 20) throw niss::parse_error("field 'd' out of range");
    if (!j.contains("values")) throw niss::parse_error("missing field 'values'");
    const auto vals = require_number_array(j.at("values"), "values");
    if (vals.size() != (std::size_t{1} << d))
        throw niss::parse_error("field 'values' must have 2^d entries");
    TruthTable t(d);
    t.values = vals;
    return t;
}

GeneralSourceSpec load_pmf(const std::string& path) {
    const json j = load_json(path);
    if (!j.contains("d")) throw niss::parse_error("missing field 'd'");
    if (!j.at("d").is_number_integer()) throw niss::parse_error("field 'd' must be an integer");
    const int d = j.at("d").get<int>();
    if (d < 0 || d > 20) throw niss::parse_error("field 'd' out of range");
    if (!j.contains("pmf")) throw niss::parse_error("missing field 'pmf'");
    auto vals = require_number_array(j.at("pmf"), "pmf");
    if (vals.size() != (std::size_t{1} << d)) throw niss::parse_error("field 'pmf' must have 2^d entries");
    return GeneralSourceSpec::from_pmf(d, std::move(vals));
}

RealFunctionFamily load_family(const std::string& path) {
    const json j = load_json(path);
    if (!j.contains("d") || !j.at("d").is_number_integer())
        throw niss::parse_error("missing integer field 'd'");
    if (!j.contains("k") || !j.at("k").is_number_integer())
        throw niss::parse_error("missing integer field 'k'");
    const int d = j.at("d").get<int>();
    const int k = j.at("k").get<int>();
    if (d < 0 || d > 20) throw niss::parse_error("field 'd' out of range");
    if (k < 2 || k > 64) throw niss::parse_error("field 'k' out of range");
    if (!j.contains("tables") || !j.at("tables").is_object())
        throw niss::parse_error("missing object field 'tables'");
    std::vector<TruthTable> tabs;
    for (int u = 1; u < k; ++u) {
        const std::string key = std::to_string(u);
        if (!j.at("tables").contains(key))
            throw niss::parse_error("field 'tables' is missing entry '" + key + "'");
        const auto vals = require_number_array(j.at("tables").at(key), "tables." + key);
        if (vals.size() != (std::size_t{1} << d))
            throw niss::parse_error("field 'tables." + key + "' must have 2^d entries");
        TruthTable t(d);
        t.values = vals;
        tabs.push_back(std::move(t));
    }
    return RealFunctionFamily::from_tables(d, k, std::move(tabs));
}

std::vector<int> subset_elements(std::uint32_t mask) {
    std::vector<int> out;
    for (int j = 0; mask >> j; ++j)
        if ((mask >> j) & 1u) out.push_back(j + 1);
    return out;
}

json source_json(const BinarySourceSpec& src) {
    return json{{"pxy", {{src.pmf[0][0], src.pmf[0][1]}, {src.pmf[1][0], src.pmf[1][1]}}},
                {"rho", src.rho}};
}

json matrix_json(const std::vector<double>& entries, int rows, int cols) {
    json m = json::array();
    for (int r = 0; r < rows; ++r) {
        json row = json::array();
        for (int c = 0; c < cols; ++c) row.push_back(entries[static_cast<std::size_t>(r) * cols + c]);
        m.push_back(row);
    }
    return m;
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty() || output_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw niss::error("cannot open output file: " + output_path);
    out << text;
}

struct CommonOpts {
    std::string output;
    std::string format = "json";
    double tol = 1e-9;
    std::uint64_t seed = 0;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("-o,--output", o.output, "Output path (default: stdout)");
    cmd->add_option("--format", o.format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--tol", o.tol, "Numerical tolerance for checks (default 1e-9)");
    cmd->add_option("--seed", o.seed, "RNG seed (default 0)");
    cmd->add_option("--jobs", o.jobs, "Worker count (default 1)")->check(CLI::PositiveNumber);
}

struct SourceOpts {
    std::string path;
    double dsbs_eps = -1.0;
};

void add_source(CLI::App* cmd, SourceOpts& o) {
    auto* file = cmd->add_option("--source", o.path, "Source pmf JSON file ({\"pxy\": 2x2})");
    auto* dsbs = cmd->add_option("--dsbs", o.dsbs_eps,
                                 "Doubly symmetric binary source with this crossover");
    file->excludes(dsbs);
}

BinarySourceSpec resolve_source(const SourceOpts& o) {
    if (!o.path.empty()) return load_source(o.path);
    if (o.dsbs_eps >= 0.0) return BinarySourceSpec::dsbs(o.dsbs_eps);
    throw niss::parse_error("a source is required: pass --source FILE or --dsbs EPS");
}

// ---------------------------------------------------------------- fourier --
int run_fourier(const SourceOpts& src_opts, double p_opt, const std::string& table_path,
                const CommonOpts& common) {
    double p = p_opt;
    if (p < 0.0) p = resolve_source(src_opts).px();
    const TruthTable table = load_table(table_path);
    const FourierSpectrum spec = analyze(table, p);

    if (common.format == "csv") {
        std::ostringstream out;
        out << "mask,subset,value\n";
        for (std::size_t s = 0; s < spec.coeffs.size(); ++s) {
            const auto elems = subset_elements(static_cast<std::uint32_t>(s));
            std::string label;
            for (std::size_t i = 0; i < elems.size(); ++i)
                label += (i ? "+" : "") + std::to_string(elems[i]);
            out << s << "," << label << "," << fmt17(spec.coeffs[s]) << "\n";
        }
        emit(out.str(), common.output);
        return 0;
    }
    json coeffs = json::array();
    for (std::size_t s = 0; s < spec.coeffs.size(); ++s)
        coeffs.push_back(json{{"mask", s},
                              {"subset", subset_elements(static_cast<std::uint32_t>(s))},
                              {"value", spec.coeffs[s]}});
    const json doc{{"d", spec.d}, {"p", spec.p}, {"coefficients", coeffs}};
    emit(doc.dump(2) + "\n", common.output);
    return 0;
}

// ------------------------------------------------------------------ ortho --
int run_ortho(const std::string& pmf_path, const CommonOpts& common) {
    const GeneralSourceSpec src = load_pmf(pmf_path);
    const OrthonormalBasis basis = gram_schmidt(src);
    const double residual = orthonormality_residual(basis, src);

    if (common.format == "csv") {
        std::ostringstream out;
        out << "mask,subset,trivial";
        for (std::size_t x = 0; x < basis.functions[0].size(); ++x) out << ",v" << x;
        out << "\n";
        for (std::size_t i = 0; i < basis.functions.size(); ++i) {
            const auto elems = subset_elements(static_cast<std::uint32_t>(i));
            std::string label;
            for (std::size_t e = 0; e < elems.size(); ++e)
                label += (e ? "+" : "") + std::to_string(elems[e]);
            out << i << "," << label << "," << int(basis.trivial_flags[i]);
            for (double v : basis.functions[i].values) out << "," << fmt17(v);
            out << "\n";
        }
        emit(out.str(), common.output);
        return 0;
    }
    json entries = json::array();
    for (std::size_t i = 0; i < basis.functions.size(); ++i)
        entries.push_back(json{{"mask", i},
                               {"subset", subset_elements(static_cast<std::uint32_t>(i))},
                               {"trivial", basis.trivial_flags[i] != 0},
                               {"values", basis.functions[i].values}});
    const json doc{{"d", basis.d},
                   {"support_size", src.support_size()},
                   {"nontrivial", basis.nontrivial_count()},
                   {"residual_max", residual},
                   {"basis", entries}};
    emit(doc.dump(2) + "\n", common.output);
    return 0;
}

// ------------------------------------------------------------------ round --
int run_round(const SourceOpts& src_opts, const std::string& family_f_path,
              const std::string& family_g_path, bool exact, std::uint64_t mc_samples,
              const CommonOpts& common) {
    const BinarySourceSpec src = resolve_source(src_opts);
    const RealFunctionFamily fam_f = load_family(family_f_path);
    const RealFunctionFamily fam_g = family_g_path.empty() ? fam_f : load_family(family_g_path);

    const PreservationReport pres = preservation_check(fam_f, fam_g, src);
    json doc{{"d", fam_f.d},
             {"ku", fam_f.k},
             {"kv", fam_g.k},
             {"preservation",
              {{"max_mean_error", pres.max_mean_error}, {"max_cross_error", pres.max_cross_error}}}};

    TargetSpec q;
    if (exact) {
        q = generated_distribution_exact(fam_f, fam_g, src);
        doc["mode"] = "exact";
    } else {
        const McDistribution mc =
            generated_distribution_mc(fam_f, fam_g, src, mc_samples, common.seed, common.jobs);
        q = mc.empirical;
        doc["mode"] = "mc";
        doc["n"] = mc.n_samples;
        doc["seed"] = mc.seed;
        doc["jobs"] = mc.jobs;
        doc["stderr"] = matrix_json(mc.stderr_cells, q.ku, q.kv);
    }
    const CorrelationVector e = e_from_q(q);
    doc["q"] = matrix_json(q.q, q.ku, q.kv);
    doc["qu"] = q.qu;
    doc["qv"] = q.qv;
    doc["e"] = matrix_json(e.e, q.ku - 1, q.kv - 1);

    if (common.format == "csv") {
        std::ostringstream out;
        const bool mc = doc["mode"] == "mc";
        out << (mc ? "u,v,q,stderr\n" : "u,v,q\n");
        for (int u = 0; u < q.ku; ++u)
            for (int v = 0; v < q.kv; ++v) {
                out << u << "," << v << "," << fmt17(q.at(u, v));
                if (mc)
                    out << ","
                        << fmt17(doc["stderr"][static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]
                                     .get<double>());
                out << "\n";
            }
        emit(out.str(), common.output);
        return 0;
    }
    emit(doc.dump(2) + "\n", common.output);
    return 0;
}

// ------------------------------------------------------------------ bound --
int run_bound(const SourceOpts& src_opts, const std::string& target_path,
              const std::vector<double>& qu_opt, const std::vector<double>& qv_opt,
              const std::string& lambda_path, int grid_resolution, const CommonOpts& common) {
    const BinarySourceSpec src = resolve_source(src_opts);

    std::optional<TargetSpec> target;
    std::vector<double> qu, qv;
    if (!target_path.empty()) {
        target = load_target(target_path);
        qu = target->qu;
        qv = target->qv;
    } else {
        if (qu_opt.empty() || qv_opt.empty())
            throw niss::parse_error("pass --target FILE or both --qu and --qv");
        qu = qu_opt;
        qv = qv_opt;
        validate_marginal(qu, "qu");
        validate_marginal(qv, "qv");
    }
    const int ku = static_cast<int>(qu.size());
    const int kv = static_cast<int>(qv.size());

    std::vector<LambdaWeights> lambdas;
    if (!lambda_path.empty())
        lambdas.push_back(load_lambda(lambda_path, ku, kv));
    else
        lambdas = lambda_grid(ku, kv, grid_resolution);

    std::optional<CorrelationVector> e;
    if (target) e = e_from_q(*target);

    json reports = json::array();
    bool all_feasible = true;
    for (const auto& lam : lambdas) {
        const BoundReport r = theta_bounds(src.rho, qu, qv, lam);
        json entry{{"lambda", matrix_json(lam.w, ku - 1, kv - 1)},
                   {"theta_phi", r.theta_phi},
                   {"theta_rho", r.theta_rho},
                   {"theta_rho2_1", r.theta_rho2_1},
                   {"theta_rho2_2", r.theta_rho2_2},
                   {"theta_rho2_3", r.theta_rho2_3},
                   {"theta_minus", r.theta_minus},
                   {"theta_plus", r.theta_plus}};
        if (e) {
            const double score = lambda_score(lam, *e);
            const bool ok = outer_check(*e, src.rho, qu, qv, lam, common.tol);
            entry["score"] = score;
            entry["feasible"] = ok;
            all_feasible = all_feasible && ok;
        }
        reports.push_back(entry);
    }
    json doc{{"rho", src.rho}, {"qu", qu}, {"qv", qv}, {"reports", reports}};
    if (e) {
        doc["e"] = matrix_json(e->e, ku - 1, kv - 1);
        doc["all_feasible"] = all_feasible;
    }

    if (common.format == "csv") {
        std::ostringstream out;
        out << "lambda_index,theta_phi,theta_rho,theta_rho2_1,theta_rho2_2,theta_rho2_3,"
               "theta_minus,theta_plus";
        if (e) out << ",score,feasible";
        out << "\n";
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            const auto& r = reports[i];
            out << i << "," << fmt17(r["theta_phi"].get<double>()) << ","
                << fmt17(r["theta_rho"].get<double>()) << "," << fmt17(r["theta_rho2_1"].get<double>())
                << "," << fmt17(r["theta_rho2_2"].get<double>()) << ","
                << fmt17(r["theta_rho2_3"].get<double>()) << "," << fmt17(r["theta_minus"].get<double>())
                << "," << fmt17(r["theta_plus"].get<double>());
            if (e)
                out << "," << fmt17(r["score"].get<double>()) << ","
                    << (r["feasible"].get<bool>() ? 1 : 0);
            out << "\n";
        }
        emit(out.str(), common.output);
        return 0;
    }
    emit(doc.dump(2) + "\n", common.output);
    return 0;
}

// ------------------------------------------------------------------- scan --
int run_scan(const SourceOpts& src_opts, int d, int ku, int kv, int grid_resolution,
             std::uint64_t pair_cap, const CommonOpts& common) {
    const BinarySourceSpec src = resolve_source(src_opts);
    const auto grid = lambda_grid(ku, kv, grid_resolution);
    const ScanReport rep =
        sandwich_report(achievable_scan(d, ku, kv, src, pair_cap, common.jobs), grid, common.tol,
                        common.jobs);

    if (common.format == "csv") {
        std::ostringstream out;
        out << "f_index,g_index";
        for (int u = 0; u < ku; ++u)
            for (int v = 0; v < kv; ++v) out << ",q_" << u << "_" << v;
        for (int u = 1; u < ku; ++u)
            for (int v = 1; v < kv; ++v) out << ",e_" << u << "_" << v;
        for (std::size_t li = 0; li < grid.size(); ++li) out << ",score_" << li;
        out << ",violations\n";
        std::vector<int> per_record(rep.records.size(), 0);
        for (const auto& v : rep.violations) ++per_record[v.record_index];
        for (std::size_t i = 0; i < rep.records.size(); ++i) {
            const ScanRecord& rec = rep.records[i];
            out << rec.f_index << "," << rec.g_index;
            for (double v : rec.target.q) out << "," << fmt17(v);
            for (double v : rec.e.e) out << "," << fmt17(v);
            for (double v : rec.lambda_scores) out << "," << fmt17(v);
            out << "," << per_record[i] << "\n";
        }
        if (!rep.violations.empty()) {
            out << "\nrecord,lambda,side,margin\n";
            for (const auto& v : rep.violations)
                out << v.record_index << "," << v.lambda_index << "," << (v.side > 0 ? "+" : "-")
                    << "," << fmt17(v.margin) << "\n";
        }
        emit(out.str(), common.output);
    } else {
        json records = json::array();
        for (const ScanRecord& rec : rep.records)
            records.push_back(json{{"f", rec.f_index},
                                   {"g", rec.g_index},
                                   {"q", matrix_json(rec.target.q, ku, kv)},
                                   {"e", matrix_json(rec.e.e, ku - 1, kv - 1)},
                                   {"scores", rec.lambda_scores}});
        json violations = json::array();
        for (const Violation& v : rep.violations)
            violations.push_back(json{{"record", v.record_index},
                                      {"lambda", v.lambda_index},
                                      {"side", v.side > 0 ? "+" : "-"},
                                      {"margin", v.margin}});
        json grid_json = json::array();
        for (const auto& lam : grid) grid_json.push_back(matrix_json(lam.w, ku - 1, kv - 1));
        const json doc{{"source", source_json(src)},
                       {"d", d},
                       {"ku", ku},
                       {"kv", kv},
                       {"tol", rep.tol},
                       {"grid", grid_json},
                       {"records", records},
                       {"violations", violations},
                       {"worst_margin", rep.worst_margin}};
        emit(doc.dump(2) + "\n", common.output);
    }
    if (!rep.violations.empty()) {
        std::cerr << "scan: " << rep.violations.size() << " sandwich violations (worst margin "
                  << fmt17(rep.worst_margin) << ")\n";
        return 1;
    }
    return 0;
}

// ----------------------------------------------------------------- verify --
int run_verify(const SourceOpts& src_opts, int d, int ku, int kv, int pairs, int grid_resolution,
               std::uint64_t pair_cap, const CommonOpts& common) {
    const BinarySourceSpec src = resolve_source(src_opts);

    // identity checks on random pairs: the three routes to E[chi chi] agree
    std::mt19937_64 rng(derive_seed(common.seed, 0x76657269ULL));
    auto random_symbol_table = [&rng, d](int k) {
        TruthTable t(d);
        for (auto& v : t.values) v = static_cast<double>(rng() % static_cast<std::uint64_t>(k));
        return t;
    };
    double worst_formula = 0;
    for (int i = 0; i < pairs; ++i) {
        const TruthTable f = random_symbol_table(ku);
        const TruthTable g = random_symbol_table(kv);
        worst_formula =
            std::max(worst_formula, verify_correlation_formula(f, g, src, ku, kv).max_discrepancy);
    }
    const bool formula_ok = worst_formula <= common.tol;

    // exhaustive sandwich scan
    const auto grid = lambda_grid(ku, kv, grid_resolution);
    const ScanReport rep =
        sandwich_report(achievable_scan(d, ku, kv, src, pair_cap, common.jobs), grid, common.tol,
                        common.jobs);

    const json doc{{"source", source_json(src)},
                   {"d", d},
                   {"ku", ku},
                   {"kv", kv},
                   {"formula", {{"pairs", pairs}, {"max_discrepancy", worst_formula}, {"ok", formula_ok}}},
                   {"sandwich",
                    {{"pairs", rep.records.size()},
                     {"violations", rep.violations.size()},
                     {"worst_margin", rep.worst_margin}}},
                   {"tol", common.tol}};
    emit(doc.dump(2) + "\n", common.output);
    if (!formula_ok) {
        std::cerr << "verify: correlation-identity discrepancy " << fmt17(worst_formula)
                  << " exceeds tol\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier analysis, correlation bounds and exhaustive verification "
                 "for distributed binary sources"};
    app.require_subcommand(1);

    // fourier
    auto* cmd_fourier = app.add_subcommand("fourier", "Fourier coefficients of a table");
    CommonOpts fourier_common;
    SourceOpts fourier_src;
    double fourier_p = -1.0;
    std::string fourier_table;
    add_common(cmd_fourier, fourier_common);
    add_source(cmd_fourier, fourier_src);
    cmd_fourier->add_option("--p", fourier_p, "Bernoulli parameter of the analysis measure");
    cmd_fourier->add_option("--table", fourier_table, "Table JSON ({\"d\": D, \"values\": [2^D]})")
        ->required();

    // ortho
    auto* cmd_ortho = app.add_subcommand("ortho", "Orthonormal basis for a correlated pmf");
    CommonOpts ortho_common;
    std::string ortho_pmf;
    add_common(cmd_ortho, ortho_common);
    cmd_ortho->add_option("--pmf", ortho_pmf, "pmf JSON ({\"d\": D, \"pmf\": [2^D]})")->required();

    // round
    auto* cmd_round = app.add_subcommand("round", "Distribution generated by randomized rounding");
    CommonOpts round_common;
    SourceOpts round_src;
    std::string family_f, family_g;
    bool round_exact = false;
    std::uint64_t round_mc = 0;
    add_common(cmd_round, round_common);
    add_source(cmd_round, round_src);
    cmd_round->add_option("--family-f", family_f, "Alice family JSON")->required();
    cmd_round->add_option("--family-g", family_g, "Bob family JSON (defaults to the f family)");
    auto* exact_flag = cmd_round->add_flag("--exact", round_exact, "Exact weighted-sum computation");
    auto* mc_opt = cmd_round->add_option("--mc", round_mc, "Monte Carlo with this many samples");
    exact_flag->excludes(mc_opt);

    // bound
    auto* cmd_bound = app.add_subcommand("bound", "Closed-form feasibility envelope");
    CommonOpts bound_common;
    SourceOpts bound_src;
    std::string bound_target, bound_lambda;
    std::vector<double> bound_qu, bound_qv;
    int bound_grid = 1;
    add_common(cmd_bound, bound_common);
    add_source(cmd_bound, bound_src);
    cmd_bound->add_option("--target", bound_target, "Target JSON ({\"q\": ku x kv})");
    cmd_bound->add_option("--qu", bound_qu, "Row marginal (when no target is given)")->delimiter(',');
    cmd_bound->add_option("--qv", bound_qv, "Column marginal (when no target is given)")->delimiter(',');
    cmd_bound->add_option("--lambda", bound_lambda, "Weight JSON ({\"lambda\": (ku-1)x(kv-1)})");
    cmd_bound->add_option("--grid", bound_grid, "Lambda grid resolution (default 1)")
        ->check(CLI::PositiveNumber);

    // scan
    auto* cmd_scan = app.add_subcommand("scan", "Exhaustive function-pair scan with sandwich check");
    CommonOpts scan_common;
    SourceOpts scan_src;
    int scan_d = 1, scan_ku = 2, scan_kv = 2, scan_grid = 1;
    std::uint64_t scan_cap = 10'000'000;
    add_common(cmd_scan, scan_common);
    add_source(cmd_scan, scan_src);
    cmd_scan->add_option("--d", scan_d, "Blocklength")->required()->check(CLI::Range(0, 12));
    cmd_scan->add_option("--ku", scan_ku, "Alice output alphabet size")->required();
    cmd_scan->add_option("--kv", scan_kv, "Bob output alphabet size")->required();
    cmd_scan->add_option("--grid", scan_grid, "Lambda grid resolution")->check(CLI::PositiveNumber);
    cmd_scan->add_option("--cap", scan_cap, "Pair-count cap (default 1e7)");

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "Identity checks plus an exhaustive sandwich scan");
    CommonOpts verify_common;
    SourceOpts verify_src;
    int verify_d = 2, verify_ku = 2, verify_kv = 2, verify_pairs = 200, verify_grid = 1;
    std::uint64_t verify_cap = 10'000'000;
    add_common(cmd_verify, verify_common);
    add_source(cmd_verify, verify_src);
    cmd_verify->add_option("--d", verify_d, "Blocklength")->check(CLI::Range(0, 12));
    cmd_verify->add_option("--ku", verify_ku, "Alice output alphabet size");
    cmd_verify->add_option("--kv", verify_kv, "Bob output alphabet size");
    cmd_verify->add_option("--pairs", verify_pairs, "Random pairs for the identity check");
    cmd_verify->add_option("--grid", verify_grid, "Lambda grid resolution")->check(CLI::PositiveNumber);
    cmd_verify->add_option("--cap", verify_cap, "Pair-count cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_fourier->parsed())
            return run_fourier(fourier_src, fourier_p, fourier_table, fourier_common);
        if (cmd_ortho->parsed()) return run_ortho(ortho_pmf, ortho_common);
        if (cmd_round->parsed()) {
            if (!round_exact && round_mc == 0)
                throw niss::parse_error("pass --exact or --mc N");
            return run_round(round_src, family_f, family_g, round_exact, round_mc, round_common);
        }
        if (cmd_bound->parsed())
            return run_bound(bound_src, bound_target, bound_qu, bound_qv, bound_lambda, bound_grid,
                             bound_common);
        if (cmd_scan->parsed())
            return run_scan(scan_src, scan_d, scan_ku, scan_kv, scan_grid, scan_cap, scan_common);
        if (cmd_verify->parsed())
            return run_verify(verify_src, verify_d, verify_ku, verify_kv, verify_pairs, verify_grid,
                              verify_cap, verify_common);
        return 1;
    } catch (const niss::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const niss::size_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const niss::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
