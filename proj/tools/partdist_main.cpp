// Command-line front end: compare partitions, query extremal values, run
// enumeration / sampling / null-model studies, and rebuild the reference
// artifacts.  Exit codes: 0 success (possibly with warnings), 1 usage or
// parse error, 2 infeasible request.

#include <CLI11.hpp>

#include <partdist/partdist.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace pd = partdist;
using ordered_json = nlohmann::ordered_json;

namespace {

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string labels_path;
    std::string matrix_path;
    std::string delimiter;
    int r = 0;
    int s = 0;
    long long n = 0;
    unsigned long long reps = 10000;
    unsigned long long samples = 1000000;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    unsigned long long max_enum = pd::default_enumeration_guard;
    unsigned long long min_count = 0;
    int workers = 1;
    bool count_only = false;
    bool conjectures = false;
    std::vector<long long> moves;
    std::string diag;
    std::string target;
    std::string expected = "data/reference_values.json";
};

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    return pd::read_text_file(path);
}

char resolve_delimiter(const std::string& spec) {
    if (spec.empty()) return '\0';
    if (spec == "comma") return ',';
    if (spec == "tab" || spec == "\\t") return '\t';
    if (spec == "space") return ' ';
    if (spec.size() == 1) return spec[0];
    throw pd::ParseError("unrecognized delimiter '" + spec +
                         "' (use a single character, comma, tab, or space)");
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty())
        std::fputs(text.c_str(), stdout);
    else
        pd::write_text_file(cfg.out, text);
}

pd::Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return pd::Rational(std::stoll(s));
    return pd::Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

std::string format_long_double(long double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10Lg", x);
    return buf;
}

// ---------------------------------------------------------------------------
// compare

void add_optional_criterion(ordered_json& c, const char* key,
                            const std::optional<pd::Rational>& v) {
    if (v) c[key] = pd::rational_json(*v);
}

void table_row(std::string& out, const std::string& name, const std::string& exact,
               const std::string& value) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %-20s %s\n", name.c_str(), exact.c_str(),
                  value.c_str());
    out += buf;
}

void table_row(std::string& out, const std::string& name, const pd::Rational& v) {
    table_row(out, name, v.to_string(), pd::format_double6(v.to_double()));
}

void table_row(std::string& out, const std::string& name,
               const std::optional<pd::Rational>& v) {
    if (v) table_row(out, name, *v);
}

std::string human_table(const pd::ConfusionMatrix& m, const pd::CriteriaReport& rep) {
    std::string out;
    out += "matrix " + std::to_string(rep.r) + " x " + std::to_string(rep.s) +
           ", n = " + std::to_string(rep.n) + "\n";
    out += "pair counts: a=" + std::to_string(rep.pairs.a) +
           " b=" + std::to_string(rep.pairs.b) + " c=" + std::to_string(rep.pairs.c) +
           " d=" + std::to_string(rep.pairs.d) +
           " total=" + std::to_string(rep.pairs.pair_total()) + "\n";
    table_row(out, "criterion", "exact", "value");
    table_row(out, "med", rep.med_result.value);
    table_row(out, "rd", rep.rd_value);
    table_row(out, "ri", rep.ri_value);
    table_row(out, "hamming", rep.hamming_value);
    table_row(out, "erd", rep.erd_value);
    table_row(out, "ard", rep.ard_value);
    table_row(out, "ari", rep.ari_value);
    table_row(out, "max_med", rep.max_med_value);
    table_row(out, "nmed", rep.nmed_value);
    table_row(out, "max_rd", rep.max_rd_value);
    table_row(out, "nrd", rep.nrd_value);

    const int matched_rows = rep.med_result.transposed ? m.cols() : m.rows();
    out += "matching";
    if (rep.med_result.transposed) out += " (on the transposed matrix)";
    out += ":";
    for (int i = 0; i < matched_rows; ++i) {
        out += i ? ", " : " ";
        out += std::to_string(i) + "->" +
               std::to_string(rep.med_result.assignment.col_of_row[i]);
    }
    out += "\n";
    for (const auto& note : rep.notes) out += "note: " + note + "\n";
    return out;
}

void cmd_compare(const RunConfig& cfg) {
    if (cfg.labels_path.empty() == cfg.matrix_path.empty())
        throw CLI::ValidationError("compare", "give exactly one of --labels or --matrix");

    std::optional<pd::ConfusionMatrix> m;
    if (!cfg.matrix_path.empty()) {
        m = pd::parse_matrix_csv(read_input(cfg.matrix_path), cfg.matrix_path);
    } else {
        const auto [u, v] = pd::parse_label_file(read_input(cfg.labels_path),
                                                 resolve_delimiter(cfg.delimiter),
                                                 cfg.labels_path);
        m = pd::ConfusionMatrix::crosstab(u, v);
    }
    const pd::CriteriaReport rep = pd::compute_criteria(*m);

    std::fputs(human_table(*m, rep).c_str(), stdout);

    pd::Provenance prov;
    prov.add("subcommand", "compare");
    if (!cfg.labels_path.empty()) prov.add("labels", cfg.labels_path);
    if (!cfg.matrix_path.empty()) prov.add("matrix", cfg.matrix_path);
    if (!cfg.delimiter.empty()) prov.add("delimiter", cfg.delimiter);
    prov.add("format", cfg.format);

    if (cfg.format == "json") {
        ordered_json j;
        j["provenance"] = prov.to_json();
        ordered_json input;
        input["r"] = rep.r;
        input["s"] = rep.s;
        input["n"] = rep.n;
        input["matrix"] = pd::matrix_json(*m);
        j["input"] = std::move(input);
        ordered_json pc;
        pc["a"] = rep.pairs.a;
        pc["b"] = rep.pairs.b;
        pc["c"] = rep.pairs.c;
        pc["d"] = rep.pairs.d;
        pc["total"] = rep.pairs.pair_total();
        j["pair_counts"] = std::move(pc);
        ordered_json c;
        c["med"] = pd::rational_json(rep.med_result.value);
        c["rd"] = pd::rational_json(rep.rd_value);
        c["ri"] = pd::rational_json(rep.ri_value);
        c["hamming"] = pd::rational_json(rep.hamming_value);
        add_optional_criterion(c, "erd", rep.erd_value);
        add_optional_criterion(c, "ard", rep.ard_value);
        add_optional_criterion(c, "ari", rep.ari_value);
        add_optional_criterion(c, "max_med", rep.max_med_value);
        add_optional_criterion(c, "nmed", rep.nmed_value);
        add_optional_criterion(c, "max_rd", rep.max_rd_value);
        add_optional_criterion(c, "nrd", rep.nrd_value);
        j["criteria"] = std::move(c);
        ordered_json a;
        const int matched_rows = rep.med_result.transposed ? m->cols() : m->rows();
        ordered_json cols = ordered_json::array();
        for (int i = 0; i < matched_rows; ++i)
            cols.push_back(rep.med_result.assignment.col_of_row[i]);
        a["col_of_row"] = std::move(cols);
        a["transposed"] = rep.med_result.transposed;
        a["total_cost"] = rep.med_result.assignment.total_cost;
        j["assignment"] = std::move(a);
        j["notes"] = rep.notes;
        if (!cfg.out.empty())
            pd::write_text_file(cfg.out, j.dump(2) + "\n");
        else
            std::fputs((j.dump(2) + "\n").c_str(), stdout);
        return;
    }

    pd::CsvBuilder csv(prov);
    csv.header({"criterion", "exact", "value"});
    auto put = [&](const char* name, const pd::Rational& v) {
        csv.row({name, v.to_string(), pd::format_double(v.to_double())});
    };
    auto put_opt = [&](const char* name, const std::optional<pd::Rational>& v) {
        if (v) put(name, *v);
    };
    csv.row({"n", std::to_string(rep.n), std::to_string(rep.n)});
    csv.row({"r", std::to_string(rep.r), std::to_string(rep.r)});
    csv.row({"s", std::to_string(rep.s), std::to_string(rep.s)});
    csv.row({"pairs_a", std::to_string(rep.pairs.a), std::to_string(rep.pairs.a)});
    csv.row({"pairs_b", std::to_string(rep.pairs.b), std::to_string(rep.pairs.b)});
    csv.row({"pairs_c", std::to_string(rep.pairs.c), std::to_string(rep.pairs.c)});
    csv.row({"pairs_d", std::to_string(rep.pairs.d), std::to_string(rep.pairs.d)});
    put("med", rep.med_result.value);
    put("rd", rep.rd_value);
    put("ri", rep.ri_value);
    put("hamming", rep.hamming_value);
    put_opt("erd", rep.erd_value);
    put_opt("ard", rep.ard_value);
    put_opt("ari", rep.ari_value);
    put_opt("max_med", rep.max_med_value);
    put_opt("nmed", rep.nmed_value);
    put_opt("max_rd", rep.max_rd_value);
    put_opt("nrd", rep.nrd_value);
    for (const auto& note : rep.notes) csv.row({"note", "", note});
    emit(cfg, csv.str());
}

// ---------------------------------------------------------------------------
// extremes

void cmd_extremes(const RunConfig& cfg) {
    const int r = cfg.r, s = cfg.s;
    const long long n = cfg.n;
    if (r < 1 || s < 1 || n < 1)
        throw CLI::ValidationError("extremes", "--r, --s, and --n must be positive");

    pd::Provenance prov;
    prov.add("subcommand", "extremes").add("r", r).add("s", s).add("n", n).add("format",
                                                                               cfg.format);

    const int lo = std::min(r, s), hi = std::max(r, s);
    ordered_json j;
    j["provenance"] = prov.to_json();
    j["r"] = r;
    j["s"] = s;
    j["n"] = n;

    std::vector<std::pair<std::string, std::string>> rows;  // csv: key, exact/value pairs
    auto put = [&](const std::string& key, const pd::Rational& v) {
        rows.emplace_back(key, v.to_string() + "," + pd::format_double(v.to_double()));
    };

    const pd::Rational mm = pd::max_med(r, s, n);
    j["max_med"] = pd::rational_json(mm);
    put("max_med", mm);

    if (lo >= 2 && n >= 2LL * (lo - 1) + hi) {
        const pd::Rational mr = pd::max_rd(r, s, n);
        pd::ConfusionMatrix w = pd::argmax_rd_witness(lo, hi, n);
        std::vector<long long> first_row;
        for (int jj = 0; jj < w.cols(); ++jj) first_row.push_back(w.at(0, jj));
        if (r > s) w = w.transposed();
        ordered_json rd;
        rd["max_rd"] = pd::rational_json(mr);
        rd["witness"] = pd::matrix_json(w);
        rd["witness_first_row"] = first_row;
        rd["witness_attains"] = (pd::rand_distance(w) == mr);
        j["rd"] = std::move(rd);
        put("max_rd", mr);
        rows.emplace_back("rd_witness", "\"" + w.to_string() + "\",");
    } else {
        j["rd"] = nullptr;
        rows.emplace_back("rd_note", "outside the n >= 2(min-1)+max closed-form domain,");
    }

    if (lo >= 2 && hi >= 2 && n % (static_cast<long long>(r) * s) == 0 && n >= 2) {
        ordered_json ind;
        const pd::Rational ird = pd::independent_rd(r, s, n);
        ind["rd"] = pd::rational_json(ird);
        ind["ard"] = pd::rational_json(pd::independent_ard(r, s, n));
        if (lo >= 2 && n >= 2LL * (lo - 1) + hi) {
            const pd::Rational nrd_ind = ird / pd::max_rd(r, s, n);
            ind["nrd"] = pd::rational_json(nrd_ind);
            put("independent_nrd", nrd_ind);
        }
        j["independence"] = std::move(ind);
        put("independent_rd", ird);
        put("independent_ard", pd::independent_ard(r, s, n));
    } else {
        j["independence"] = nullptr;
    }

    if (r == 2 && s == 2 && n >= 3) {
        const pd::TwoByTwoArdMax am = pd::two_by_two_ard_max(n);
        ordered_json a;
        a["max_ard"] = pd::rational_json(am.value);
        a["d1"] = am.d1;
        a["witness"] = pd::matrix_json(am.witness);
        j["two_by_two_ard"] = std::move(a);
        put("max_ard", am.value);
        rows.emplace_back("ard_witness", "\"" + am.witness.to_string() + "\",");
        rows.emplace_back("ard_d1", std::to_string(am.d1) + ",");
    }

    if (cfg.format == "json") {
        emit(cfg, j.dump(2) + "\n");
        return;
    }
    pd::CsvBuilder csv(prov);
    csv.header({"key", "exact", "value"});
    for (const auto& [key, rest] : rows) csv.row({key + "," + rest});
    emit(cfg, csv.str());
}

// ---------------------------------------------------------------------------
// enumerate

void require_dims(const RunConfig& cfg) {
    if (cfg.r < 1 || cfg.s < 1 || cfg.n < 1)
        throw CLI::ValidationError("dimensions", "--r, --s, and --n must be positive");
}

void cmd_enumerate(const RunConfig& cfg) {
    require_dims(cfg);
    const pd::BigUint count = pd::count_confusion_matrices(cfg.r, cfg.s, cfg.n);

    pd::Provenance prov;
    prov.add("subcommand", "enumerate")
        .add("r", cfg.r)
        .add("s", cfg.s)
        .add("n", cfg.n)
        .add("max_enum", cfg.max_enum)
        .add("min_count", cfg.min_count)
        .add("workers", cfg.workers)
        .add("format", cfg.format)
        .add("family_size", count.to_string());

    if (cfg.count_only) {
        if (cfg.format == "json") {
            ordered_json j;
            j["provenance"] = prov.to_json();
            j["r"] = cfg.r;
            j["s"] = cfg.s;
            j["n"] = cfg.n;
            j["family_size"] = count.to_string();
            emit(cfg, j.dump(2) + "\n");
        } else {
            pd::CsvBuilder csv(prov);
            csv.header({"r", "s", "n", "family_size"});
            csv.row({std::to_string(cfg.r), std::to_string(cfg.s), std::to_string(cfg.n),
                     count.to_string()});
            emit(cfg, csv.str());
        }
        return;
    }

    if (cfg.conjectures) {
        const int lo = std::min(cfg.r, cfg.s), hi = std::max(cfg.r, cfg.s);
        const pd::ConjectureReport rep =
            pd::verify_maximizer_conjectures(lo, hi, cfg.n, cfg.max_enum);
        ordered_json j;
        j["provenance"] = prov.to_json();
        j["r"] = rep.r;
        j["s"] = rep.s;
        j["n"] = rep.n;
        j["family_size"] = rep.family_size;
        j["rd_max"] = pd::rational_json(rep.rd_max);
        j["rd_formula"] = pd::rational_json(rep.rd_formula);
        j["rd_matches_formula"] = rep.rd_matches_formula;
        j["rd_witness_attains"] = rep.rd_witness_attains;
        j["rd_shape_attained"] = rep.rd_shape_attained;
        if (rep.rd_argmax) j["rd_argmax"] = pd::matrix_json(*rep.rd_argmax);
        j["ard_max"] = pd::rational_json(rep.ard_max);
        j["ard_shape_attained"] = rep.ard_shape_attained;
        if (rep.ard_argmax) j["ard_argmax"] = pd::matrix_json(*rep.ard_argmax);
        j["ard_undefined"] = rep.ard_undefined;
        j["counterexamples"] = rep.counterexamples;
        j["ok"] = rep.ok();
        emit(cfg, j.dump(2) + "\n");
        return;
    }

    const pd::ConditionalTable tbl =
        pd::conditional_given_med_exhaustive(cfg.r, cfg.s, cfg.n, cfg.max_enum, cfg.workers);
    if (cfg.format == "json") {
        ordered_json j;
        j["provenance"] = prov.to_json();
        j["family_size"] = count.to_string();
        j["conditional"] = pd::conditional_to_json(tbl, cfg.min_count);
        j["med_marginal"] = pd::summary_to_json(tbl.med_marginal());
        emit(cfg, j.dump(2) + "\n");
    } else {
        emit(cfg, pd::conditional_to_csv(tbl, prov, cfg.min_count));
    }
}

// ---------------------------------------------------------------------------
// sample

void cmd_sample(const RunConfig& cfg) {
    require_dims(cfg);
    if (cfg.n < std::max(cfg.r, cfg.s))
        throw InfeasibleError("the family is empty: n < max(r, s)");

    const pd::SamplerConfig scfg{cfg.seed, 0};
    pd::SplitStream card_stream(scfg, {pd::stream_tag_cardinality});
    const pd::CardinalityEstimate card =
        pd::estimate_cardinality(cfg.r, cfg.s, cfg.n, cfg.samples, card_stream);
    const pd::SampledConditionalResult sc =
        pd::conditional_given_med_sampled(cfg.r, cfg.s, cfg.n, cfg.samples, scfg, cfg.workers);

    const double matrix_acceptance =
        static_cast<double>(cfg.samples) / static_cast<double>(sc.attempts);
    const long double estimate_from_attempts =
        card.composition_count.to_long_double() * static_cast<long double>(matrix_acceptance);

    pd::Provenance prov;
    prov.add("subcommand", "sample")
        .add("r", cfg.r)
        .add("s", cfg.s)
        .add("n", cfg.n)
        .add("samples", cfg.samples)
        .add("seed", static_cast<unsigned long long>(cfg.seed))
        .add("min_count", cfg.min_count)
        .add("workers", cfg.workers)
        .add("format", cfg.format)
        .add("composition_count", card.composition_count.to_string())
        .add("composition_acceptance_rate", pd::format_double(card.acceptance_rate))
        .add("cardinality_estimate", format_long_double(card.estimate))
        .add("cardinality_std_error", format_long_double(card.std_error))
        .add("matrix_sampler_attempts", sc.attempts)
        .add("matrix_sampler_rejection_rate", pd::format_double(1.0 - matrix_acceptance))
        .add("cardinality_estimate_from_attempts",
             format_long_double(estimate_from_attempts));

    if (cfg.format == "json") {
        ordered_json j;
        j["provenance"] = prov.to_json();
        ordered_json card_j;
        card_j["composition_count"] = card.composition_count.to_string();
        card_j["composition_draws"] = card.samples;
        card_j["accepted"] = card.accepted;
        card_j["acceptance_rate"] = card.acceptance_rate;
        card_j["estimate"] = static_cast<double>(card.estimate);
        card_j["std_error"] = static_cast<double>(card.std_error);
        j["cardinality"] = std::move(card_j);
        ordered_json ms;
        ms["samples"] = cfg.samples;
        ms["attempts"] = sc.attempts;
        ms["rejection_rate"] = 1.0 - matrix_acceptance;
        ms["estimate"] = static_cast<double>(estimate_from_attempts);
        j["matrix_sampler"] = std::move(ms);
        j["conditional"] = pd::conditional_to_json(sc.table, cfg.min_count);
        j["med_marginal"] = pd::summary_to_json(sc.table.med_marginal());
        emit(cfg, j.dump(2) + "\n");
    } else {
        emit(cfg, pd::conditional_to_csv(sc.table, prov, cfg.min_count));
    }
}

// ---------------------------------------------------------------------------
// null-sim

void cmd_null_sim(const RunConfig& cfg) {
    require_dims(cfg);
    const pd::SamplerConfig scfg{cfg.seed, 0};
    const pd::NullStudyResult res =
        pd::null_case_study(cfg.r, cfg.s, cfg.n, cfg.reps, scfg, cfg.workers);

    pd::Provenance prov;
    prov.add("subcommand", "null-sim")
        .add("r", cfg.r)
        .add("s", cfg.s)
        .add("n", cfg.n)
        .add("reps", cfg.reps)
        .add("seed", static_cast<unsigned long long>(cfg.seed))
        .add("workers", cfg.workers)
        .add("format", cfg.format)
        .add("ard_undefined", res.ard_undefined)
        .add("reduced_label_draws", res.reduced_label_draws);

    if (cfg.format == "json") {
        ordered_json j;
        j["provenance"] = prov.to_json();
        j["r"] = res.r;
        j["s"] = res.s;
        j["n"] = res.n;
        j["replicates"] = res.replicates;
        j["ard_undefined"] = res.ard_undefined;
        j["reduced_label_draws"] = res.reduced_label_draws;
        j["med"] = pd::summary_to_json(res.med);
        j["rd"] = pd::summary_to_json(res.rd);
        j["ard"] = pd::summary_to_json(res.ard);
        if (res.nmed) j["nmed"] = pd::summary_to_json(*res.nmed);
        if (res.nrd) j["nrd"] = pd::summary_to_json(*res.nrd);
        emit(cfg, j.dump(2) + "\n");
    } else {
        std::vector<pd::DistributionSummary> all{res.med, res.rd, res.ard};
        if (res.nmed) all.push_back(*res.nmed);
        if (res.nrd) all.push_back(*res.nrd);
        emit(cfg, pd::summary_histogram_csv(all, prov));
    }
}

// ---------------------------------------------------------------------------
// perturb

std::vector<long long> resolve_diagonal(const RunConfig& cfg) {
    if (!cfg.diag.empty()) {
        std::vector<long long> diag;
        std::stringstream ss(cfg.diag);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) throw pd::ParseError("--diag: empty entry");
            diag.push_back(std::stoll(tok));
        }
        if (cfg.s > 0 && static_cast<int>(diag.size()) != cfg.s)
            throw CLI::ValidationError("perturb", "--diag length disagrees with --s");
        long long total = 0;
        for (long long v : diag) total += v;
        if (cfg.n > 0 && total != cfg.n)
            throw CLI::ValidationError("perturb", "--diag sum disagrees with --n");
        return diag;
    }
    if (cfg.s < 1 || cfg.n < 1)
        throw CLI::ValidationError("perturb", "give --s and --n, or an explicit --diag");
    std::vector<long long> diag(cfg.s, cfg.n / cfg.s);
    for (long long i = 0; i < cfg.n % cfg.s; ++i) ++diag[static_cast<std::size_t>(i)];
    return diag;
}

void cmd_perturb(const RunConfig& cfg) {
    const std::vector<long long> diag = resolve_diagonal(cfg);
    long long n = 0;
    for (long long v : diag) n += v;
    const int s = static_cast<int>(diag.size());
    if (cfg.moves.empty())
        throw CLI::ValidationError("perturb", "--moves needs at least one value");
    for (long long m : cfg.moves)
        if (m < 0 || m > n)
            throw CLI::ValidationError("perturb", "--moves values must lie in [0, n]");
    if (cfg.reps < 1) throw CLI::ValidationError("perturb", "--reps must be positive");

    const pd::SamplerConfig scfg{cfg.seed, 0};
    std::string diag_str;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (i) diag_str += ';';
        diag_str += std::to_string(diag[i]);
    }

    pd::Provenance prov;
    prov.add("subcommand", "perturb")
        .add("s", s)
        .add("n", n)
        .add("diagonal", diag_str)
        .add("reps", cfg.reps)
        .add("seed", static_cast<unsigned long long>(cfg.seed))
        .add("format", cfg.format);

    struct Level {
        long long moves;
        pd::DistributionSummary med_sum, rd_sum, ard_sum;
        unsigned long long ard_undefined = 0;
    };
    std::vector<Level> levels;
    for (long long m : cfg.moves)
        levels.push_back({m, pd::DistributionSummary::exact("med", n),
                          pd::DistributionSummary::exact("rd", pd::choose2(n)),
                          pd::DistributionSummary::binned("ard"), 0});

    pd::CsvBuilder csv(prov);
    const bool want_csv = (cfg.format == "csv");
    if (want_csv)
        csv.header({"rep", "moves", "overlap_exact", "overlap", "med_exact", "med",
                    "rd_exact", "rd", "ard_exact", "ard"});

    for (unsigned long long rep = 0; rep < cfg.reps; ++rep) {
        for (std::size_t idx = 0; idx < cfg.moves.size(); ++idx) {
            pd::SplitStream stream(scfg, {pd::stream_tag_perturb, rep,
                                          static_cast<std::uint64_t>(idx)});
            const pd::PerturbationResult res =
                pd::perturb_from_diagonal(diag, cfg.moves[idx], stream);
            const pd::Rational rd = pd::rand_distance(res.perturbed);
            const pd::Rational erd = pd::expected_rd(res.perturbed);
            std::optional<pd::Rational> ard;
            if (!erd.is_zero()) ard = rd / erd;

            Level& lv = levels[idx];
            lv.med_sum.add_exact(res.med_value.num() * (n / res.med_value.den()));
            lv.rd_sum.add_exact(rd.num() * (pd::choose2(n) / rd.den()));
            if (ard)
                lv.ard_sum.add_value(*ard);
            else
                ++lv.ard_undefined;

            if (want_csv)
                csv.row({std::to_string(rep), std::to_string(cfg.moves[idx]),
                         res.degree_of_overlap.to_string(),
                         pd::format_double(res.degree_of_overlap.to_double()),
                         res.med_value.to_string(),
                         pd::format_double(res.med_value.to_double()), rd.to_string(),
                         pd::format_double(rd.to_double()),
                         ard ? ard->to_string() : std::string(),
                         ard ? pd::format_double(ard->to_double()) : std::string()});
        }
    }

    if (want_csv) {
        emit(cfg, csv.str());
        return;
    }
    ordered_json j;
    j["provenance"] = prov.to_json();
    j["s"] = s;
    j["n"] = n;
    j["diagonal"] = diag;
    j["reps"] = cfg.reps;
    ordered_json lvls = ordered_json::array();
    for (const Level& lv : levels) {
        ordered_json o;
        o["moves"] = lv.moves;
        o["overlap"] = pd::rational_json(pd::Rational(lv.moves, n));
        o["med"] = pd::summary_to_json(lv.med_sum);
        o["rd"] = pd::summary_to_json(lv.rd_sum);
        o["ard"] = pd::summary_to_json(lv.ard_sum);
        o["ard_undefined"] = lv.ard_undefined;
        lvls.push_back(std::move(o));
    }
    j["levels"] = std::move(lvls);
    emit(cfg, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// reproduce

namespace fs = std::filesystem;

void announce(const fs::path& p) { std::printf("wrote %s\n", p.string().c_str()); }

void write_artifact(const fs::path& p, const std::string& text) {
    pd::write_text_file(p.string(), text);
    announce(p);
}

pd::Provenance reproduce_provenance(const RunConfig& cfg, const std::string& target) {
    pd::Provenance prov;
    prov.add("subcommand", "reproduce")
        .add("target", target)
        .add("seed", static_cast<unsigned long long>(cfg.seed))
        .add("workers", cfg.workers);
    return prov;
}

void reproduce_figure1(const RunConfig& cfg, const fs::path& dir) {
    const long long n = cfg.n > 0 ? cfg.n : 20;
    pd::Provenance prov = reproduce_provenance(cfg, "figure1");
    prov.add("n", n);
    pd::CsvBuilder csv(prov);
    csv.header({"d1", "criterion", "value_exact", "value"});
    for (const pd::TwoByTwoRow& row : pd::two_by_two_figure(n)) {
        csv.row({std::to_string(row.d1), "med", row.med_value.to_string(),
                 pd::format_double(row.med_value.to_double())});
        csv.row({std::to_string(row.d1), "rd", row.rd_value.to_string(),
                 pd::format_double(row.rd_value.to_double())});
        for (const pd::Rational& a : row.ard_values)
            csv.row({std::to_string(row.d1), "ard", a.to_string(),
                     pd::format_double(a.to_double())});
        csv.row({std::to_string(row.d1), "ard_undefined",
                 std::to_string(row.ard_undefined), std::to_string(row.ard_undefined)});
    }
    write_artifact(dir / "figure1_profile.csv", csv.str());
}

void reproduce_figure2(const RunConfig& cfg, const fs::path& dir) {
    const long long n_cap = cfg.n > 0 ? cfg.n : 400;
    const std::vector<std::pair<int, int>> shapes{{2, 2}, {2, 3}, {3, 3},
                                                  {2, 5}, {4, 4}, {5, 5}};
    pd::Provenance prov = reproduce_provenance(cfg, "figure2");
    prov.add("n_cap", n_cap);
    pd::CsvBuilder csv(prov);
    csv.header({"r", "s", "n", "independent_rd_exact", "independent_rd", "max_rd_exact",
                "max_rd", "nrd_exact", "nrd", "note"});
    for (const auto& [r, s] : shapes) {
        std::vector<long long> ns;
        for (long long n = static_cast<long long>(r) * s; n <= n_cap;
             n += static_cast<long long>(r) * s)
            ns.push_back(n);
        for (const pd::IndependentCurvePoint& p : pd::nrd_independent_curve({{r, s}}, ns)) {
            if (!p.defined) {
                csv.row({std::to_string(p.r), std::to_string(p.s), std::to_string(p.n), "",
                         "", "", "", "", "", p.note});
                continue;
            }
            csv.row({std::to_string(p.r), std::to_string(p.s), std::to_string(p.n),
                     p.independent_rd_value.to_string(),
                     pd::format_double(p.independent_rd_value.to_double()),
                     p.max_rd_value.to_string(),
                     pd::format_double(p.max_rd_value.to_double()),
                     p.nrd_value.to_string(), pd::format_double(p.nrd_value.to_double()),
                     ""});
        }
    }
    write_artifact(dir / "figure2_independent_nrd.csv", csv.str());
}

void summary_stat_rows(pd::CsvBuilder& csv, int r, int s, long long n,
                       unsigned long long reps, const pd::DistributionSummary& sum) {
    const auto fences = sum.whisker_fences();
    csv.row({std::to_string(r), std::to_string(s), std::to_string(n), std::to_string(reps),
             sum.name(), std::to_string(sum.count()), pd::format_double(sum.mean()),
             pd::format_double(sum.stddev()),
             sum.min_value() ? sum.min_value()->to_string() : "",
             sum.min_value() ? pd::format_double(sum.min_value()->to_double()) : "",
             sum.max_value() ? sum.max_value()->to_string() : "",
             sum.max_value() ? pd::format_double(sum.max_value()->to_double()) : "",
             pd::format_double(sum.quantile(0.25)), pd::format_double(sum.quantile(0.5)),
             pd::format_double(sum.quantile(0.75)), pd::format_double(fences.lower),
             pd::format_double(fences.upper)});
}

void summary_hist_rows(pd::CsvBuilder& csv, int r, int s, long long n,
                       const pd::DistributionSummary& sum) {
    for (const auto& [key, cnt] : sum.histogram()) {
        if (sum.is_exact()) {
            const pd::Rational v(key, sum.denominator());
            csv.row({std::to_string(r), std::to_string(s), std::to_string(n), sum.name(),
                     v.to_string(), pd::format_double(v.to_double()),
                     std::to_string(cnt)});
        } else {
            csv.row({std::to_string(r), std::to_string(s), std::to_string(n), sum.name(),
                     "", pd::format_double(key * sum.bin_width()), std::to_string(cnt)});
        }
    }
}

void reproduce_null(const RunConfig& cfg, const fs::path& dir, long long n,
                    const std::string& target) {
    pd::Provenance prov = reproduce_provenance(cfg, target);
    prov.add("n", n).add("reps", cfg.reps).add("stream_id_rule", "n*10+r");

    pd::CsvBuilder stats(prov);
    stats.header({"r", "s", "n", "reps", "criterion", "count", "mean", "sd", "min_exact",
                  "min", "max_exact", "max", "p25", "p50", "p75", "whisker_low",
                  "whisker_high"});
    pd::CsvBuilder hist(prov);
    hist.header({"r", "s", "n", "criterion", "value_exact", "value", "count"});

    for (int r = 2; r <= 5; ++r) {
        const pd::SamplerConfig scfg{cfg.seed,
                                     static_cast<std::uint64_t>(n) * 10 +
                                         static_cast<std::uint64_t>(r)};
        const pd::NullStudyResult res =
            pd::null_case_study(r, r, n, cfg.reps, scfg, cfg.workers);
        std::vector<const pd::DistributionSummary*> sums{&res.med, &res.rd, &res.ard};
        if (res.nmed) sums.push_back(&*res.nmed);
        if (res.nrd) sums.push_back(&*res.nrd);
        for (const pd::DistributionSummary* sum : sums) {
            summary_stat_rows(stats, r, r, n, cfg.reps, *sum);
            summary_hist_rows(hist, r, r, n, *sum);
        }
        stats.row({std::to_string(r), std::to_string(r), std::to_string(n),
                   std::to_string(cfg.reps), "ard_undefined",
                   std::to_string(res.ard_undefined), "", "", "", "", "", "", "", "", "",
                   "", ""});
        stats.row({std::to_string(r), std::to_string(r), std::to_string(n),
                   std::to_string(cfg.reps), "reduced_label_draws",
                   std::to_string(res.reduced_label_draws), "", "", "", "", "", "", "", "",
                   "", "", ""});
    }
    write_artifact(dir / (target + "_summary.csv"), stats.str());
    write_artifact(dir / (target + "_histograms.csv"), hist.str());
}

void rd_by_med_csv(const pd::ConditionalTable& tbl, const pd::Provenance& prov,
                   const fs::path& path) {
    pd::CsvBuilder csv(prov);
    csv.header({"med_exact", "med", "rd_exact", "rd", "count"});
    for (const auto& [key, sl] : tbl.slices()) {
        const pd::Rational mv(key, tbl.n());
        for (const auto& [rd_num, cnt] : sl.rd_hist) {
            const pd::Rational rv(rd_num, tbl.rd_denominator());
            csv.row({mv.to_string(), pd::format_double(mv.to_double()), rv.to_string(),
                     pd::format_double(rv.to_double()), std::to_string(cnt)});
        }
    }
    write_artifact(path, csv.str());
}

void reproduce_figure5to7(const RunConfig& cfg, const fs::path& dir) {
    const int r = cfg.r > 0 ? cfg.r : 3;
    const int s = cfg.s > 0 ? cfg.s : 3;
    const long long n = cfg.n > 0 ? cfg.n : 20;
    pd::Provenance prov = reproduce_provenance(cfg, "figure5to7");
    prov.add("r", r).add("s", s).add("n", n).add("max_enum", cfg.max_enum);

    const pd::ConditionalTable tbl =
        pd::conditional_given_med_exhaustive(r, s, n, cfg.max_enum, cfg.workers);

    pd::write_text_file((dir / "figure5to7_conditional.csv").string(),
                        pd::conditional_to_csv(tbl, prov, cfg.min_count));
    announce(dir / "figure5to7_conditional.csv");
    rd_by_med_csv(tbl, prov, dir / "figure5to7_rd_by_med.csv");
    write_artifact(dir / "figure5to7_med_marginal.csv",
                   pd::summary_histogram_csv({tbl.med_marginal()}, prov));

    ordered_json j;
    j["provenance"] = prov.to_json();
    j["conditional"] = pd::conditional_to_json(tbl, cfg.min_count);
    write_artifact(dir / "figure5to7_extremes.json", j.dump(2) + "\n");
}

void reproduce_figure8(const RunConfig& cfg, const fs::path& dir) {
    const int r = cfg.r > 0 ? cfg.r : 5;
    const int s = cfg.s > 0 ? cfg.s : 5;
    const long long n = cfg.n > 0 ? cfg.n : 80;
    if (n < std::max(r, s)) throw InfeasibleError("the family is empty: n < max(r, s)");

    pd::Provenance prov = reproduce_provenance(cfg, "figure8");
    prov.add("r", r).add("s", s).add("n", n).add("samples", cfg.samples);

    const pd::SamplerConfig scfg{cfg.seed, 0};
    const pd::SampledConditionalResult sc =
        pd::conditional_given_med_sampled(r, s, n, cfg.samples, scfg, cfg.workers);
    pd::SplitStream card_stream(scfg, {pd::stream_tag_cardinality});
    const pd::CardinalityEstimate card =
        pd::estimate_cardinality(r, s, n, cfg.samples, card_stream);

    pd::write_text_file((dir / "figure8_conditional.csv").string(),
                        pd::conditional_to_csv(sc.table, prov, cfg.min_count));
    announce(dir / "figure8_conditional.csv");
    write_artifact(dir / "figure8_med_marginal.csv",
                   pd::summary_histogram_csv({sc.table.med_marginal()}, prov));

    const double acc = static_cast<double>(cfg.samples) / static_cast<double>(sc.attempts);
    ordered_json j;
    j["provenance"] = prov.to_json();
    j["composition_count"] = card.composition_count.to_string();
    j["composition_draws"] = card.samples;
    j["composition_accepted"] = card.accepted;
    j["composition_acceptance_rate"] = card.acceptance_rate;
    j["cardinality_estimate"] = static_cast<double>(card.estimate);
    j["cardinality_std_error"] = static_cast<double>(card.std_error);
    j["matrix_sampler_attempts"] = sc.attempts;
    j["matrix_sampler_rejection_rate"] = 1.0 - acc;
    j["cardinality_estimate_from_attempts"] =
        static_cast<double>(card.composition_count.to_long_double() *
                            static_cast<long double>(acc));
    write_artifact(dir / "figure8_cardinality.json", j.dump(2) + "\n");
}

// --- reproduce tables: recompute the reference numbers and diff them -------

struct RefItem {
    std::string id;
    std::string kind;
    std::string computed;
};

std::string bool_str(bool v) { return v ? "true" : "false"; }

std::string csv_quote(const std::string& s) {
    if (s.find(',') == std::string::npos) return s;
    return "\"" + s + "\"";
}

std::vector<RefItem> computed_reference_items(const RunConfig& cfg) {
    std::vector<RefItem> items;
    auto put = [&](const std::string& id, const std::string& kind,
                   const std::string& value) { items.push_back({id, kind, value}); };
    auto put_rational = [&](const std::string& id, const pd::Rational& v) {
        put(id, "rational", v.to_string());
    };
    auto put_dec = [&](const std::string& id, int places, const pd::Rational& v) {
        put(id, "decimal" + std::to_string(places), v.to_decimal_string(places));
    };

    const pd::ConfusionMatrix iris(3, 3, {50, 0, 0, 0, 48, 2, 0, 1, 49});
    const pd::ConfusionMatrix modclust(
        5, 3, {47, 197, 7, 0, 1408, 153, 0, 278, 1216, 0, 62, 0, 4813, 2, 0});
    const pd::ConfusionMatrix entmerge(5, 5, {16,   7, 0,    14,  214, 0, 146, 929, 417,
                                              69,   0, 1191, 81,  63,  159, 0,  0,   0,
                                              0,    62, 4809, 0,   0,   1,   5});
    const pd::ConfusionMatrix steinley(
        5, 5, {1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
    const pd::ConfusionMatrix n1(2, 2, {16, 2, 2, 0});
    const pd::ConfusionMatrix n2(2, 2, {11, 0, 4, 5});
    const pd::ConfusionMatrix overlap13(3, 3, {3, 2, 3, 2, 2, 2, 2, 2, 2});
    const pd::ConfusionMatrix overlap18(3, 3, {1, 2, 5, 3, 1, 2, 2, 4, 0});
    const pd::ConfusionMatrix spike(3, 3, {16, 1, 1, 1, 0, 0, 1, 0, 0});
    const pd::ConfusionMatrix taylor(2, 2, {55, 6, 4, 35});

    {
        const pd::PairCounts pc = pd::pair_counts(iris);
        put("iris_discordant_pairs", "integer", std::to_string(pc.b + pc.c));
        put_rational("iris_rd", pd::rand_distance(pc));
        put_dec("iris_rd_3dp", 3, pd::rand_distance(pc));
        put_rational("iris_med", pd::med(iris).value);
        put_dec("iris_med_2dp", 2, pd::med(iris).value);
        put_dec("iris_ard_3dp", 3, pd::adjusted_rand_distance(pc));
    }
    {
        const pd::CriteriaReport rep = pd::compute_criteria(modclust);
        put_rational("modclust_med", rep.med_result.value);
        put_dec("modclust_med_3dp", 3, rep.med_result.value);
        put_dec("modclust_rd_3dp", 3, rep.rd_value);
        put_dec("modclust_ard_3dp", 3, *rep.ard_value);
    }
    {
        const pd::CriteriaReport rep = pd::compute_criteria(entmerge);
        put_rational("entmerge_med", rep.med_result.value);
        put_dec("entmerge_med_3dp", 3, rep.med_result.value);
        put_dec("entmerge_rd_3dp", 3, rep.rd_value);
        put_dec("entmerge_ard_3dp", 3, *rep.ard_value);
    }
    {
        const pd::MedResult mr = pd::med(steinley);
        put_rational("steinley_med", mr.value);
        put_rational("steinley_rd", pd::rand_distance(steinley));
        put_dec("steinley_ard_3dp", 3, pd::adjusted_rand_distance(steinley));
        put("steinley_lsap_cost", "integer", std::to_string(mr.assignment.total_cost));
        long long diag_agree = 0;
        for (int i = 0; i < 5; ++i) diag_agree += steinley.at(i, i);
        put("steinley_identity_matching_optimal", "bool",
            bool_str(pd::Rational(steinley.total() - diag_agree, steinley.total()) ==
                     mr.value));
        const int cycle[5] = {3, 4, 0, 1, 2};  // columns reordered as 4,5,1,2,3
        long long cycle_agree = 0;
        for (int i = 0; i < 5; ++i) cycle_agree += steinley.at(i, cycle[i]);
        put("steinley_column_cycle_optimal", "bool",
            bool_str(pd::Rational(steinley.total() - cycle_agree, steinley.total()) ==
                     mr.value));
    }
    put_rational("equal_split_2x2_med",
                 pd::med(pd::ConfusionMatrix(2, 2, {5, 5, 5, 5})).value);
    {
        const pd::CriteriaReport rep = pd::compute_criteria(n1);
        put_rational("pair_n1_med", rep.med_result.value);
        put_dec("pair_n1_rd_3dp", 3, rep.rd_value);
        put_dec("pair_n1_ard_3dp", 3, *rep.ard_value);
    }
    {
        const pd::CriteriaReport rep = pd::compute_criteria(n2);
        put_rational("pair_n2_med", rep.med_result.value);
        put_dec("pair_n2_rd_3dp", 3, rep.rd_value);
        put_dec("pair_n2_ard_3dp", 3, *rep.ard_value);
    }

    put_rational("max_med_2_2_20", pd::max_med(2, 2, 20));
    put_rational("max_med_3_3_20", pd::max_med(3, 3, 20));
    put_rational("max_med_2_2_21", pd::max_med(2, 2, 21));
    put_rational("max_med_2_2_100", pd::max_med(2, 2, 100));
    put_rational("max_med_3_3_100", pd::max_med(3, 3, 100));
    put_rational("max_med_4_4_100", pd::max_med(4, 4, 100));
    put_rational("max_med_5_5_100", pd::max_med(5, 5, 100));
    put_rational("nmed_even_example", pd::nmed(pd::ConfusionMatrix(2, 2, {6, 4, 4, 6})));
    put_rational("max_rd_2_2_20", pd::max_rd(2, 2, 20));
    put_rational("max_rd_2_2_21", pd::max_rd(2, 2, 21));
    {
        const pd::ConfusionMatrix w100 = pd::argmax_rd_witness(5, 5, 100);
        std::string fr = "[";
        for (int j = 0; j < 5; ++j) {
            if (j) fr += ',';
            fr += std::to_string(w100.at(0, j));
        }
        fr += ']';
        put("rd_witness_5_5_100_first_row", "vector", fr);
        const pd::ConfusionMatrix w20 = pd::argmax_rd_witness(2, 2, 20);
        put("rd_witness_2_2_20", "vector", w20.to_string());
        put("rd_witness_2_2_20_attains", "bool",
            bool_str(pd::rand_distance(w20) == pd::max_rd(2, 2, 20)));
    }
    put_rational("independent_nrd_2_2_20",
                 pd::independent_rd(2, 2, 20) / pd::max_rd(2, 2, 20));
    put_dec("independent_nrd_5_5_100_2dp", 2,
            pd::independent_rd(5, 5, 100) / pd::max_rd(5, 5, 100));
    put_dec("independent_ard_2_3_24_3dp", 3, pd::independent_ard(2, 3, 24));
    put_dec("independent_ard_3_3_27_3dp", 3, pd::independent_ard(3, 3, 27));

    {
        bool has_high = false, has_low = false;
        pd::Rational med16, rd16;
        for (const pd::TwoByTwoRow& row : pd::two_by_two_profile(20)) {
            if (row.d1 != 16) continue;
            med16 = row.med_value;
            rd16 = row.rd_value;
            for (const pd::Rational& a : row.ard_values) {
                if (a.to_decimal_string(3) == "1.097") has_high = true;
                if (a.to_decimal_string(3) == "0.668") has_low = true;
            }
        }
        put_rational("profile20_d16_med", med16);
        put_dec("profile20_d16_rd_3dp", 3, rd16);
        put("profile20_d16_has_ard_1097", "bool", bool_str(has_high));
        put("profile20_d16_has_ard_0668", "bool", bool_str(has_low));
        const pd::TwoByTwoArdMax am = pd::two_by_two_ard_max(20);
        put_rational("profile20_ard_max", am.value);
        put("profile20_ard_max_d1", "integer", std::to_string(am.d1));
        put("profile20_ard_max_witness", "vector", am.witness.to_string());
    }
    put_rational("alpha_20_12", pd::alpha_n(20, 12));
    put_rational("alpha_20_16", pd::alpha_n(20, 16));
    put_dec("taylor_approx_3dp", 3, pd::taylor_rd_small(100, 6, 4));
    put_dec("taylor_exact_3dp", 3, pd::rand_distance(taylor));

    {
        auto overlap_of = [](const pd::ConfusionMatrix& m) {
            long long trace = 0;
            for (int i = 0; i < std::min(m.rows(), m.cols()); ++i) trace += m.at(i, i);
            return pd::Rational(m.total() - trace, m.total());
        };
        put_rational("overlap_13moves_do", overlap_of(overlap13));
        put_rational("overlap_13moves_med", pd::med(overlap13).value);
        put_rational("overlap_18moves_do", overlap_of(overlap18));
        put_rational("overlap_18moves_med", pd::med(overlap18).value);
        put_dec("spike_ard_3dp", 3, pd::adjusted_rand_distance(spike));
    }

    put("family_count_2_2_20", "integer",
        pd::count_confusion_matrices(2, 2, 20).to_string());
    put("family_count_3_3_20", "integer",
        pd::count_confusion_matrices(3, 3, 20).to_string());
    put("compositions_80_25", "integer", pd::count_compositions(80, 25).to_string());
    put("compositions_80_25_approx", "approx_rel",
        format_long_double(pd::count_compositions(80, 25).to_long_double()));
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f",
                      pd::folded_binomial_max_prob(100).prob.to_double());
        put("folded_max_prob_100_4dp", "decimal4", buf);
    }
    {
        const pd::ConjectureReport rep = pd::verify_maximizer_conjectures(2, 2, 20);
        put_rational("conj_2_2_20_rd_max", rep.rd_max);
        put_rational("conj_2_2_20_ard_max", rep.ard_max);
        put("conj_2_2_20_clean", "bool", bool_str(rep.ok()));
    }

    {
        const pd::ConditionalTable tbl =
            pd::conditional_given_med_exhaustive(3, 3, 20, cfg.max_enum, cfg.workers);
        put("study_3_3_20_total", "integer", std::to_string(tbl.total()));
        put_dec("study_3_3_20_ard_max_3dp", 3, tbl.ard_max());
        put_rational("study_3_3_20_ard_max", tbl.ard_max());
        put_rational("study_3_3_20_ard_max_med", tbl.ard_max_med());
        const auto argmax = tbl.ard_mean_argmax_key(1);
        put_rational("study_3_3_20_ard_mean_argmax",
                     pd::Rational(argmax ? *argmax : -1, 20));
        put("study_3_3_20_med_support_max", "integer",
            std::to_string(tbl.slices().rbegin()->first));
        const unsigned long long top = tbl.slices().rbegin()->second.count;
        put("study_3_3_20_p_med_max", "approx_rel",
            pd::format_double(static_cast<double>(top) / static_cast<double>(tbl.total())));
        put("study_3_3_20_ard_undefined", "integer", std::to_string(tbl.ard_undefined()));
    }
    return items;
}

bool reference_item_matches(const RefItem& item, const ordered_json& expected) {
    const std::string kind = expected.value("kind", "");
    if (kind != item.kind) return false;
    const std::string want = expected.value("expected", "");
    if (kind == "rational")
        return parse_rational(item.computed) == parse_rational(want);
    if (kind == "approx_rel") {
        const double tol = expected.value("rel_tol", 0.0);
        const double got = std::stod(item.computed);
        const double ref = std::stod(want);
        return std::abs(got - ref) <= tol * std::abs(ref);
    }
    return item.computed == want;  // decimalK, integer, vector, bool
}

int reproduce_tables(const RunConfig& cfg, const fs::path& dir) {
    ordered_json expectations;
    try {
        expectations = ordered_json::parse(pd::read_text_file(cfg.expected));
    } catch (const std::exception& e) {
        throw pd::ParseError(std::string("expectations file: ") + e.what());
    }
    std::map<std::string, ordered_json> by_id;
    for (const auto& entry : expectations)
        by_id[entry.value("id", "")] = entry;

    const std::vector<RefItem> items = computed_reference_items(cfg);

    pd::Provenance prov = reproduce_provenance(cfg, "tables");
    prov.add("expected", cfg.expected);
    pd::CsvBuilder csv(prov);
    csv.header({"id", "kind", "expected", "computed", "match"});
    unsigned mismatches = 0;
    std::map<std::string, bool> seen;
    for (const RefItem& item : items) {
        const auto it = by_id.find(item.id);
        std::string want = "(missing)";
        bool ok = false;
        if (it != by_id.end()) {
            want = it->second.value("expected", "");
            ok = reference_item_matches(item, it->second);
            seen[item.id] = true;
        }
        if (!ok) {
            ++mismatches;
            std::printf("MISMATCH %s: expected %s, computed %s\n", item.id.c_str(),
                        want.c_str(), item.computed.c_str());
        }
        csv.row({item.id, item.kind, csv_quote(want), csv_quote(item.computed),
                 bool_str(ok)});
    }
    for (const auto& [id, entry] : by_id) {
        if (seen.count(id)) continue;
        ++mismatches;
        std::printf("MISMATCH %s: expected %s, nothing computed\n", id.c_str(),
                    entry.value("expected", "").c_str());
        csv.row({id, entry.value("kind", ""), csv_quote(entry.value("expected", "")),
                 "(missing)", "false"});
    }
    write_artifact(dir / "tables_report.csv", csv.str());
    std::printf("%zu reference values checked, %u mismatches\n", items.size(), mismatches);
    return mismatches == 0 ? 0 : 1;
}

int cmd_reproduce(const RunConfig& cfg) {
    const fs::path dir = cfg.out.empty() ? fs::path("out") : fs::path(cfg.out);
    fs::create_directories(dir);
    if (cfg.target == "figure1") {
        reproduce_figure1(cfg, dir);
    } else if (cfg.target == "figure2") {
        reproduce_figure2(cfg, dir);
    } else if (cfg.target == "null100") {
        reproduce_null(cfg, dir, 100, "null100");
    } else if (cfg.target == "null400") {
        reproduce_null(cfg, dir, 400, "null400");
    } else if (cfg.target == "figure5to7") {
        reproduce_figure5to7(cfg, dir);
    } else if (cfg.target == "figure8") {
        reproduce_figure8(cfg, dir);
    } else if (cfg.target == "tables") {
        return reproduce_tables(cfg, dir);
    } else {
        throw CLI::ValidationError("reproduce", "unknown target '" + cfg.target + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    int exit_code = 0;

    CLI::App app{"exact distances and reference studies for partition comparisons"};
    app.set_version_flag("--version", pd::version_string);
    app.require_subcommand(1);

    auto add_r = [&](CLI::App* c) { c->add_option("--r", cfg.r, "row clusters")->envname("PARTDIST_R"); };
    auto add_s = [&](CLI::App* c) { c->add_option("--s", cfg.s, "column clusters")->envname("PARTDIST_S"); };
    auto add_n = [&](CLI::App* c) { c->add_option("--n", cfg.n, "objects")->envname("PARTDIST_N"); };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", cfg.seed, "sampler seed")->envname("PARTDIST_SEED"); };
    auto add_reps = [&](CLI::App* c) { c->add_option("--reps", cfg.reps, "replicates")->envname("PARTDIST_REPS"); };
    auto add_samples = [&](CLI::App* c) { c->add_option("--samples", cfg.samples, "sample draws")->envname("PARTDIST_SAMPLES"); };
    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", cfg.format, "artifact format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->envname("PARTDIST_FORMAT");
    };
    auto add_out = [&](CLI::App* c, const char* what) { c->add_option("--out", cfg.out, what)->envname("PARTDIST_OUT"); };
    auto add_guard = [&](CLI::App* c) { c->add_option("--max-enum", cfg.max_enum, "largest family size to enumerate")->envname("PARTDIST_MAX_ENUM"); };
    auto add_min_count = [&](CLI::App* c) { c->add_option("--min-count", cfg.min_count, "drop conditional slices below this count")->envname("PARTDIST_MIN_COUNT"); };
    auto add_workers = [&](CLI::App* c) { c->add_option("--workers", cfg.workers, "worker thread cap")->envname("PARTDIST_WORKERS"); };

    CLI::App* compare = app.add_subcommand("compare", "all criteria for one pair of partitions");
    compare->add_option("--labels", cfg.labels_path, "two-column label file ('-' for stdin)");
    compare->add_option("--matrix", cfg.matrix_path, "confusion-matrix csv ('-' for stdin)");
    compare->add_option("--delimiter", cfg.delimiter, "label-file delimiter (comma, tab, space, or one character)");
    add_format(compare);
    add_out(compare, "artifact path (stdout when omitted)");
    compare->callback([&] { cmd_compare(cfg); });

    CLI::App* extremes = app.add_subcommand("extremes", "closed-form extremal values for a shape");
    add_r(extremes);
    add_s(extremes);
    add_n(extremes);
    add_format(extremes);
    add_out(extremes, "artifact path (stdout when omitted)");
    extremes->callback([&] { cmd_extremes(cfg); });

    CLI::App* enumerate_cmd = app.add_subcommand("enumerate", "exhaustive study of one family");
    add_r(enumerate_cmd);
    add_s(enumerate_cmd);
    add_n(enumerate_cmd);
    add_guard(enumerate_cmd);
    add_min_count(enumerate_cmd);
    add_workers(enumerate_cmd);
    add_format(enumerate_cmd);
    add_out(enumerate_cmd, "artifact path (stdout when omitted)");
    enumerate_cmd->add_flag("--count-only", cfg.count_only, "report the family size and stop");
    enumerate_cmd->add_flag("--conjectures", cfg.conjectures, "check the maximizer shape conjectures instead");
    enumerate_cmd->callback([&] { cmd_enumerate(cfg); });

    CLI::App* sample = app.add_subcommand("sample", "uniform draws from one family");
    add_r(sample);
    add_s(sample);
    add_n(sample);
    add_samples(sample);
    add_seed(sample);
    add_min_count(sample);
    add_workers(sample);
    add_format(sample);
    add_out(sample, "artifact path (stdout when omitted)");
    sample->callback([&] { cmd_sample(cfg); });

    CLI::App* null_sim = app.add_subcommand("null-sim", "independent-labels null study");
    add_r(null_sim);
    add_s(null_sim);
    add_n(null_sim);
    add_reps(null_sim);
    add_seed(null_sim);
    add_workers(null_sim);
    add_format(null_sim);
    add_out(null_sim, "artifact path (stdout when omitted)");
    null_sim->callback([&] { cmd_null_sim(cfg); });

    CLI::App* perturb = app.add_subcommand("perturb", "controlled-overlap perturbation study");
    add_s(perturb);
    add_n(perturb);
    perturb->add_option("--moves", cfg.moves, "objects to relocate (comma-separated levels)")
        ->delimiter(',');
    perturb->add_option("--diag", cfg.diag, "explicit starting diagonal (comma-separated)");
    add_reps(perturb);
    add_seed(perturb);
    add_format(perturb);
    add_out(perturb, "artifact path (stdout when omitted)");
    perturb->callback([&] { cmd_perturb(cfg); });

    CLI::App* reproduce = app.add_subcommand("reproduce", "rebuild a reference artifact");
    reproduce->add_option("target", cfg.target, "figure1|figure2|null100|null400|figure5to7|figure8|tables")
        ->required();
    add_r(reproduce);
    add_s(reproduce);
    add_n(reproduce);
    add_reps(reproduce);
    add_samples(reproduce);
    add_seed(reproduce);
    add_guard(reproduce);
    add_min_count(reproduce);
    add_workers(reproduce);
    reproduce->add_option("--expected", cfg.expected, "expectations file for the tables target");
    add_out(reproduce, "output directory (default: out)");
    reproduce->callback([&] { exit_code = cmd_reproduce(cfg); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const pd::EnumerationGuardError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const pd::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return exit_code;
}
