// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linktheory/chain.hpp"
#include "linktheory/dsl.hpp"
#include "linktheory/measurement.hpp"
#include "linktheory/verify.hpp"

using nlohmann::json;
using namespace lks;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::ParseError, "cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Splits a line into rational tokens; commas count as spaces, '#' starts a
// comment. Returns false once the line carries no data.
bool line_tokens(const std::string& line, std::vector<std::string>& tokens) {
    tokens.clear();
    std::string cleaned = line.substr(0, line.find('#'));
    for (char& c : cleaned)
        if (c == ',' || c == '\t' || c == '\r') c = ' ';
    std::istringstream in(cleaned);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return !tokens.empty();
}

Rational token_rational(const std::string& tok, const std::string& path) {
    std::optional<Rational> q = parse_rational(tok);
    if (!q) fail(ErrorKind::ParseError, path + ": bad rational '" + tok + "'");
    return *q;
}

Mat read_matrix(const std::string& path) {
    std::vector<Vec> rows;
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<std::string> tokens;
    while (std::getline(in, line)) {
        if (!line_tokens(line, tokens)) continue;
        Vec row;
        for (const std::string& tok : tokens) row.push_back(token_rational(tok, path));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorKind::ParseError, path + ": empty matrix");
    for (const Vec& row : rows)
        if (row.size() != rows[0].size())
            fail(ErrorKind::ParseError, path + ": ragged matrix rows");
    return Mat::from_rows(rows);
}

Vec read_vector(const std::string& path) {
    Vec v;
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<std::string> tokens;
    while (std::getline(in, line)) {
        if (!line_tokens(line, tokens)) continue;
        for (const std::string& tok : tokens) v.push_back(token_rational(tok, path));
    }
    if (v.empty()) fail(ErrorKind::ParseError, path + ": empty vector");
    return v;
}

// Sectioned chain description for `measure`: keyword lines `gen`, `init`,
// `steps N`; data lines fill the active section.
struct ChainFile {
    std::vector<Vec> gen_rows;
    Vec init;
    std::optional<std::size_t> steps;
};

ChainFile read_chain_file(const std::string& path) {
    ChainFile out;
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<std::string> tokens;
    enum class Section { none, gen, init } section = Section::none;
    while (std::getline(in, line)) {
        if (!line_tokens(line, tokens)) continue;
        if (tokens[0] == "gen") {
            section = Section::gen;
            continue;
        }
        if (tokens[0] == "init") {
            section = Section::init;
            continue;
        }
        if (tokens[0] == "steps") {
            if (tokens.size() != 2) fail(ErrorKind::ParseError, path + ": steps needs one count");
            long n = 0;
            try {
                n = std::stol(tokens[1]);
            } catch (const std::exception&) {
                fail(ErrorKind::ParseError, path + ": bad steps count '" + tokens[1] + "'");
            }
            if (n < 1) fail(ErrorKind::ParseError, path + ": steps must be >= 1");
            out.steps = static_cast<std::size_t>(n);
            continue;
        }
        if (section == Section::none)
            fail(ErrorKind::ParseError, path + ": data before a gen/init keyword");
        Vec row;
        for (const std::string& tok : tokens) row.push_back(token_rational(tok, path));
        if (section == Section::gen)
            out.gen_rows.push_back(std::move(row));
        else
            out.init.insert(out.init.end(), row.begin(), row.end());
    }
    if (out.gen_rows.empty()) fail(ErrorKind::ParseError, path + ": missing gen section");
    if (out.init.empty()) fail(ErrorKind::ParseError, path + ": missing init section");
    for (const Vec& row : out.gen_rows)
        if (row.size() != out.gen_rows[0].size())
            fail(ErrorKind::ParseError, path + ": ragged matrix rows");
    return out;
}

json rationals_json(const std::vector<Rational>& xs) {
    json arr = json::array();
    for (const Rational& x : xs) arr.push_back(to_string(x));
    return arr;
}

std::string rationals_text(const std::vector<Rational>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += to_string(xs[i]);
    }
    return out + "]";
}

bool any_negative(const std::vector<Rational>& xs) {
    for (const Rational& x : xs)
        if (is_negative(x)) return true;
    return false;
}

std::string flags_text(const std::vector<std::string>& flags) {
    if (flags.empty()) return "";
    std::string out = " [";
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) out += " ";
        out += flags[i];
    }
    return out + "]";
}

json flags_json(const std::vector<std::string>& flags) {
    json arr = json::array();
    for (const std::string& f : flags) arr.push_back(f);
    return arr;
}

std::vector<Rational> mat_entries(const Mat& m) {
    std::vector<Rational> out;
    out.reserve(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out.push_back(m.at(i, j));
    return out;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalResult {
    std::string query;
    std::optional<std::vector<Rational>> value;  // table or matrix entries
    std::optional<Rational> scalar;              // born / prob
    Rational total = 0;
    std::vector<std::string> flags;
};

EvalResult eval_one(const SystemDocument& doc, const QueryDecl& q) {
    EvalResult r;
    r.query = dsl_detail::query_text(q);
    try {
        QueryValue v = evaluate_query(doc, q);
        switch (q.kind) {
            case QueryDecl::Kind::marginal:
                r.value = v.table->weights();
                r.total = v.table->total();
                break;
            case QueryDecl::Kind::state:
                r.value = mat_entries(*v.state);
                r.total = v.state->trace();
                break;
            case QueryDecl::Kind::born: {
                r.scalar = *v.scalar;
                LinkState s = dsl_detail::pair_state(doc, q);
                r.total = s.trace();
                r.flags = any_negative(mat_entries(s.entries))
                              ? std::vector<std::string>{"negative-weights"}
                              : std::vector<std::string>{};
                return r;
            }
            case QueryDecl::Kind::prob: {
                r.scalar = *v.scalar;
                Process folded = apply_links(to_link_system(doc));
                r.total = folded.total();
                r.flags = any_negative(folded.weights())
                              ? std::vector<std::string>{"negative-weights"}
                              : std::vector<std::string>{};
                return r;
            }
        }
        if (any_negative(*r.value)) r.flags.push_back("negative-weights");
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NullNormalizer) throw;
        r.total = 0;
        r.flags.push_back("null-normalizer");
    }
    return r;
}

int run_eval(const std::string& file, const std::string& query, bool as_json) {
    std::string text = read_file(file);
    if (!query.empty()) text += "\nquery " + query + "\n";
    SystemDocument doc = parse(text);

    std::vector<const QueryDecl*> selected;
    if (!query.empty())
        selected.push_back(&doc.queries.back());
    else
        for (const QueryDecl& q : doc.queries) selected.push_back(&q);

    json results = json::array();
    for (const QueryDecl* q : selected) {
        EvalResult r = eval_one(doc, *q);
        if (as_json) {
            json obj;
            obj["query"] = r.query;
            if (r.scalar)
                obj["value"] = to_string(*r.scalar);
            else if (r.value)
                obj["value"] = rationals_json(*r.value);
            else
                obj["value"] = nullptr;
            obj["total"] = to_string(r.total);
            obj["flags"] = flags_json(r.flags);
            results.push_back(obj);
        } else {
            std::string value = r.scalar ? to_string(*r.scalar)
                                         : (r.value ? rationals_text(*r.value) : "null");
            std::cout << r.query << " = " << value << " (total " << to_string(r.total) << ")"
                      << flags_text(r.flags) << "\n";
        }
    }
    if (as_json) std::cout << results.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// chain
// ---------------------------------------------------------------------------

int run_chain(const std::string& gen_file, const std::string& init_file, std::size_t steps,
              const std::string& kind, bool as_json) {
    Mat g = read_matrix(gen_file);
    Vec v = read_vector(init_file);

    std::vector<Vec> stages;
    Rational total = 0;
    std::vector<std::string> flags;

    if (kind == "markov") {
        markov_chain(g, v, 1);  // validates generator and initial vector
        total = 1;
        Vec cur = v;
        stages.push_back(cur);
        for (std::size_t t = 0; t < steps; ++t) {
            cur = marginal(markov_chain(g, cur, 1), {"x1"}).weights();
            stages.push_back(cur);
        }
    } else if (kind == "inverse") {
        if (!g.square()) fail(ErrorKind::DimMismatch, "generator must be square");
        std::optional<Mat> inv = g.inverse();
        if (!inv) fail(ErrorKind::SingularT, "generator is not invertible");
        Vec cur = v;
        stages.push_back(cur);
        for (std::size_t t = 0; t < steps; ++t) {
            cur = marginal(chain_table({*inv}, cur), {"x1"}).weights();
            stages.push_back(cur);
        }
        for (const Rational& e : stages.back()) total += e;
        for (const Vec& row : stages)
            if (any_negative(row)) {
                flags.push_back("negative-weights");
                break;
            }
        if (is_zero(total)) flags.push_back("null-normalizer");
    } else {  // quantum
        PreparedChain chain = make_prepared_chain(std::vector<Mat>(steps, g), v);
        for (std::size_t t = 0; t <= steps; ++t) {
            LinkState s = chain.stage_state(t);
            total = s.trace();
            Vec row;
            for (std::size_t i = 0; i < s.dim(); ++i) row.push_back(s.at(i, i) / total);
            stages.push_back(std::move(row));
        }
    }

    if (as_json) {
        json obj;
        obj["query"] = "chain --kind " + kind + " --steps " + std::to_string(steps);
        json value = json::array();
        for (const Vec& row : stages) value.push_back(rationals_json(row));
        obj["value"] = value;
        obj["total"] = to_string(total);
        obj["flags"] = flags_json(flags);
        std::cout << obj.dump(2) << "\n";
    } else {
        for (std::size_t t = 0; t < stages.size(); ++t)
            std::cout << t << ": " << rationals_text(stages[t]) << "\n";
        std::cout << "total " << to_string(total) << flags_text(flags) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// measure
// ---------------------------------------------------------------------------

Probe parse_probe(const std::string& raw) {
    std::size_t colon = raw.find(':');
    std::string stage_text = raw.substr(0, colon == std::string::npos ? raw.size() : colon);
    long stage = -1;
    try {
        stage = std::stol(stage_text);
    } catch (const std::exception&) {
        stage = -1;
    }
    if (stage < 0) fail(ErrorKind::ParseError, "bad probe stage '" + raw + "'");
    if (colon == std::string::npos) return complete_probe(static_cast<std::size_t>(stage));

    std::vector<long> map;
    std::string rest = raw.substr(colon + 1);
    std::istringstream in(rest);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        long label = -1;
        try {
            label = std::stol(tok);
        } catch (const std::exception&) {
            label = -1;
        }
        if (label < 0) fail(ErrorKind::ParseError, "bad probe map label '" + tok + "'");
        map.push_back(label);
    }
    if (map.empty()) fail(ErrorKind::ParseError, "empty probe map in '" + raw + "'");
    return partial_probe(static_cast<std::size_t>(stage), std::move(map));
}

int run_measure(const std::string& file, const std::vector<std::string>& probe_args,
                const std::string& select, bool as_json) {
    ChainFile spec = read_chain_file(file);
    Mat g = Mat::from_rows(spec.gen_rows);

    std::vector<Probe> probes;
    std::size_t max_stage = 0;
    for (const std::string& raw : probe_args) {
        probes.push_back(parse_probe(raw));
        max_stage = std::max(max_stage, probes.back().stage);
    }
    std::sort(probes.begin(), probes.end(),
              [](const Probe& a, const Probe& b) { return a.stage < b.stage; });
    std::size_t steps = spec.steps.value_or(std::max<std::size_t>(max_stage, 1));

    PreparedChain chain = make_prepared_chain(std::vector<Mat>(steps, g), spec.init);
    std::vector<std::string> rids;
    for (const Probe& p : probes) rids.push_back("r" + std::to_string(p.stage));
    Process records = marginal(probe(chain, probes), rids);

    if (!select.empty()) {
        std::size_t eq = select.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= select.size())
            fail(ErrorKind::ParseError, "--select expects VAR=VAL");
        std::string var = select.substr(0, eq);
        long val = -1;
        try {
            val = std::stol(select.substr(eq + 1));
        } catch (const std::exception&) {
            val = -1;
        }
        if (val < 0) fail(ErrorKind::ParseError, "bad --select value in '" + select + "'");
        records = selection(records, Event::atom(var, val));
    }

    Rational total = records.total();
    std::vector<std::string> flags;
    if (any_negative(records.weights())) flags.push_back("negative-weights");
    if (is_zero(total)) flags.push_back("null-normalizer");

    std::vector<Rational> value = records.weights();
    if (!is_zero(total))
        for (Rational& w : value) w /= total;

    if (as_json) {
        json obj;
        std::string q = "measure";
        for (const std::string& raw : probe_args) q += " --probe " + raw;
        if (!select.empty()) q += " --select " + select;
        obj["query"] = q;
        obj["value"] = rationals_json(value);
        obj["total"] = to_string(total);
        obj["flags"] = flags_json(flags);
        std::cout << obj.dump(2) << "\n";
    } else {
        for (std::size_t c = 0; c < records.case_count(); ++c) {
            std::vector<long> vals = records.unflatten(c);
            std::string label;
            for (std::size_t i = 0; i < rids.size(); ++i) {
                if (i) label += " ";
                label += rids[i] + "=" + std::to_string(vals[i]);
            }
            std::cout << label << ": " << to_string(value[c]) << "\n";
        }
        std::cout << "total " << to_string(total) << flags_text(flags) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(const std::string& suite, std::size_t trials, std::uint64_t seed, long dims_max) {
    SuiteReport rep = run_verify_suite(suite, trials, seed, dims_max);
    std::cout << "suite=" << rep.suite << " trials=" << rep.trials
              << " failures=" << rep.failures << " skipped=" << rep.skipped
              << " result=" << (rep.ok() ? "ok" : "FAIL") << "\n";
    if (rep.ok()) return 0;

    const SuiteWitness& w = rep.witnesses.front();
    json witness;
    witness["suite"] = rep.suite;
    witness["seed"] = seed;
    witness["dims-max"] = dims_max;
    witness["trial"] = w.trial;
    witness["replay-seed"] = trial_seed(seed, w.trial);
    witness["detail"] = w.detail;
    std::cout << witness.dump(2) << "\n";
    return 1;
}

// ---------------------------------------------------------------------------
// parse
// ---------------------------------------------------------------------------

int run_parse(const std::string& file, bool roundtrip) {
    SystemDocument doc = parse(read_file(file));
    std::string canonical = serialize(doc);
    if (roundtrip) {
        SystemDocument again = parse(canonical);
        if (!same_document(doc, again) || serialize(again) != canonical) {
            json witness;
            witness["file"] = file;
            witness["detail"] = "canonical form failed to round-trip";
            witness["canonical"] = canonical;
            std::cout << witness.dump(2) << "\n";
            return 1;
        }
    }
    std::cout << canonical;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"link theory toolkit: evaluate, chain, measure, verify, parse"};
    app.require_subcommand(1);

    std::string eval_file, eval_query;
    bool eval_json = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate queries against a document");
    eval_cmd->add_option("FILE", eval_file, "document to evaluate")->required();
    eval_cmd->add_option("--query", eval_query, "single query to run instead of the document's");
    eval_cmd->add_flag("--json", eval_json, "emit JSON");

    std::string chain_gen, chain_init, chain_kind;
    std::size_t chain_steps = 0;
    bool chain_json = false;
    CLI::App* chain_cmd = app.add_subcommand("chain", "iterate a chain and print each stage");
    chain_cmd->add_option("--gen", chain_gen, "generator matrix file")->required();
    chain_cmd->add_option("--init", chain_init, "initial vector file")->required();
    chain_cmd->add_option("--steps", chain_steps, "number of steps")
        ->required()
        ->check(CLI::PositiveNumber);
    chain_cmd->add_option("--kind", chain_kind, "markov | quantum | inverse")
        ->required()
        ->check(CLI::IsMember({"markov", "quantum", "inverse"}));
    chain_cmd->add_flag("--json", chain_json, "emit JSON");

    std::string measure_file, measure_select;
    std::vector<std::string> measure_probes;
    bool measure_json = false;
    CLI::App* measure_cmd = app.add_subcommand("measure", "probe a prepared chain");
    measure_cmd->add_option("FILE", measure_file, "chain description (gen/init/steps)")
        ->required();
    measure_cmd->add_option("--probe", measure_probes, "probe stage t or t:l0,l1,... for partial")
        ->required();
    measure_cmd->add_option("--select", measure_select, "condition on a record, VAR=VAL");
    measure_cmd->add_flag("--json", measure_json, "emit JSON");

    std::string verify_suite;
    std::size_t verify_trials = 0;
    std::uint64_t verify_seed = 0;
    long verify_dims = 0;
    CLI::App* verify_cmd = app.add_subcommand("verify", "run a theorem verification suite");
    verify_cmd->add_option("SUITE", verify_suite, "suite name")->required();
    verify_cmd->add_option("--trials", verify_trials, "number of trials")->required();
    verify_cmd->add_option("--seed", verify_seed, "base seed")->required();
    verify_cmd->add_option("--dims-max", verify_dims, "cap sampled ranges (0 = suite default)");

    std::string parse_file;
    bool parse_roundtrip = false;
    CLI::App* parse_cmd = app.add_subcommand("parse", "parse and print the canonical form");
    parse_cmd->add_option("FILE", parse_file, "document to parse")->required();
    parse_cmd->add_flag("--roundtrip", parse_roundtrip, "verify canonical round-trip");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*eval_cmd) return run_eval(eval_file, eval_query, eval_json);
        if (*chain_cmd)
            return run_chain(chain_gen, chain_init, chain_steps, chain_kind, chain_json);
        if (*measure_cmd)
            return run_measure(measure_file, measure_probes, measure_select, measure_json);
        if (*verify_cmd)
            return run_verify(verify_suite, verify_trials, verify_seed, verify_dims);
        if (*parse_cmd) return run_parse(parse_file, parse_roundtrip);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
