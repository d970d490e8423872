// This code is licensed under the Apache License, Version 2.0. You may obtain
// a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linktheory/link.hpp"
#include "linktheory/process.hpp"
#include "linktheory/state.hpp"

namespace lks {

// ---------------------------------------------------------------------------
// Source text model. A document is a list of statements:
//   var NAME : INT
//   box NAME [ inputs ; outputs ] body
//   link BOX.VAR = BOX.VAR
//   query marginal QIDs | state QID = QID | born [0,1,..] QID = QID | prob EXPR
// Bodies: dense [..], white, sharp(K), stoch [[..],..], unitary [[..],..],
// matrix [[..],..]. Line comments start with '#'.
// ---------------------------------------------------------------------------

struct SourcePos {
    std::size_t line = 1;
    std::size_t col = 1;
};

struct QualifiedId {
    std::string box;
    std::string var;

    std::string flat() const { return box + "." + var; }
    bool operator==(const QualifiedId& o) const { return box == o.box && var == o.var; }
    bool operator<(const QualifiedId& o) const {
        return box != o.box ? box < o.box : var < o.var;
    }
};

struct VarDecl {
    std::string id;
    long range = 0;
    SourcePos pos;
};

enum class BodyKind { dense, white, sharp, stoch, unitary, matrix };

struct BoxDecl {
    std::string id;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    BodyKind body = BodyKind::dense;
    std::vector<Rational> dense;   // dense body
    long sharp_index = 0;          // sharp body
    std::vector<Vec> rows;         // stoch / unitary / matrix bodies
    SourcePos pos;

    // filled by validation
    std::vector<long> ranges;       // one per local, inputs then outputs
    std::vector<Rational> table;    // weights in process layout
    std::vector<std::string> locals() const {
        std::vector<std::string> ids = inputs;
        ids.insert(ids.end(), outputs.begin(), outputs.end());
        return ids;
    }
};

struct LinkDecl {
    QualifiedId kept;     // left side, survives the fold
    QualifiedId dropped;  // right side, consumed by the fold
    SourcePos pos;
};

struct EventNode {
    enum class Kind { atom, equal, conj, disj, neg };
    Kind kind = Kind::atom;
    QualifiedId a;
    QualifiedId b;  // equal only
    long value = 0;  // atom only
    std::vector<EventNode> kids;

    bool operator==(const EventNode& o) const {
        return kind == o.kind && a == o.a && b == o.b && value == o.value && kids == o.kids;
    }
};

struct QueryDecl {
    enum class Kind { marginal, state, born, prob };
    Kind kind = Kind::marginal;
    std::vector<QualifiedId> ids;  // marginal: list; state/born: the pair
    std::vector<int> proj;         // born projection diagonal
    EventNode event;               // prob
    SourcePos pos;
};

struct SystemDocument {
    std::vector<VarDecl> vars;
    std::vector<BoxDecl> boxes;
    std::vector<LinkDecl> links;
    std::vector<QueryDecl> queries;

    // filled by validation
    std::map<std::string, long> symbols;             // local id -> range
    std::map<std::string, std::string> drop_map;     // dropped flat -> kept flat
};

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace dsl_detail {

enum class TokKind { ident, number, punct, eof };

struct Token {
    TokKind kind = TokKind::eof;
    std::string text;
    SourcePos pos;

    std::string show() const {
        return kind == TokKind::eof ? std::string("end of input") : "'" + text + "'";
    }
};

[[noreturn]] inline void syntax_fail(const SourcePos& pos, const std::string& expected,
                                     const std::string& found) {
    fail(ErrorKind::ParseError, std::to_string(pos.line) + ":" + std::to_string(pos.col) +
                                    ": expected " + expected + ", found " + found);
}

inline bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
inline bool digit(char c) { return c >= '0' && c <= '9'; }

inline std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    SourcePos pos;
    std::size_t i = 0;
    auto advance = [&](char c) {
        if (c == '\n') {
            ++pos.line;
            pos.col = 1;
        } else {
            ++pos.col;
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(c);
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') {
                advance(text[i]);
                ++i;
            }
            continue;
        }
        SourcePos start = pos;
        if (ident_start(c)) {
            std::string id;
            while (i < text.size() && ident_char(text[i])) {
                id += text[i];
                advance(text[i]);
                ++i;
            }
            out.push_back({TokKind::ident, id, start});
            continue;
        }
        if (digit(c)) {
            std::string num;
            while (i < text.size() && digit(text[i])) {
                num += text[i];
                advance(text[i]);
                ++i;
            }
            out.push_back({TokKind::number, num, start});
            continue;
        }
        static const std::string punct = "[](),.;:=/-";
        if (punct.find(c) != std::string::npos) {
            out.push_back({TokKind::punct, std::string(1, c), start});
            advance(c);
            ++i;
            continue;
        }
        syntax_fail(start, "a token", "stray character '" + std::string(1, c) + "'");
    }
    out.push_back({TokKind::eof, "", pos});
    return out;
}

// ---------------------------------------------------------------------------
// Parser (syntax only; semantic checks happen in validate)
// ---------------------------------------------------------------------------

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    SystemDocument run() {
        SystemDocument doc;
        while (peek().kind != TokKind::eof) {
            const Token& t = peek();
            if (t.kind != TokKind::ident)
                syntax_fail(t.pos, "'var', 'box', 'link' or 'query'", t.show());
            if (t.text == "var")
                doc.vars.push_back(parse_var());
            else if (t.text == "box")
                doc.boxes.push_back(parse_box());
            else if (t.text == "link")
                doc.links.push_back(parse_link());
            else if (t.text == "query")
                doc.queries.push_back(parse_query());
            else
                syntax_fail(t.pos, "'var', 'box', 'link' or 'query'", t.show());
        }
        return doc;
    }

  private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t k = i_ + ahead;
        return k < toks_.size() ? toks_[k] : toks_.back();
    }
    Token take() { return toks_[std::min(i_++, toks_.size() - 1)]; }

    bool at_punct(char c) const {
        return peek().kind == TokKind::punct && peek().text[0] == c;
    }
    bool at_word(const char* w) const {
        return peek().kind == TokKind::ident && peek().text == w;
    }
    void expect_punct(char c, const std::string& what) {
        if (!at_punct(c)) syntax_fail(peek().pos, what, peek().show());
        take();
    }
    std::string expect_ident(const std::string& what) {
        if (peek().kind != TokKind::ident) syntax_fail(peek().pos, what, peek().show());
        return take().text;
    }
    long expect_int(const std::string& what) {
        if (peek().kind != TokKind::number) syntax_fail(peek().pos, what, peek().show());
        Token t = take();
        try {
            return std::stol(t.text);
        } catch (...) {
            syntax_fail(t.pos, what, "oversized integer '" + t.text + "'");
        }
    }

    QualifiedId parse_qid() {
        QualifiedId q;
        q.box = expect_ident("a qualified name BOX.VAR");
        expect_punct('.', "'.' in qualified name");
        q.var = expect_ident("a variable name after '.'");
        return q;
    }

    Rational parse_rational() {
        bool neg = false;
        if (at_punct('-')) {
            take();
            neg = true;
        }
        Token t = peek();
        long num = expect_int("a rational number");
        long den = 1;
        if (at_punct('/')) {
            take();
            den = expect_int("a denominator");
            if (den == 0) syntax_fail(t.pos, "a nonzero denominator", "'0'");
        }
        return rat(neg ? -num : num, den);
    }

    std::vector<std::string> parse_id_list_until(char stop) {
        std::vector<std::string> ids;
        if (at_punct(stop)) return ids;
        ids.push_back(expect_ident("a variable name"));
        while (at_punct(',')) {
            take();
            ids.push_back(expect_ident("a variable name"));
        }
        return ids;
    }

    VarDecl parse_var() {
        VarDecl d;
        d.pos = take().pos;  // 'var'
        d.id = expect_ident("a variable name after 'var'");
        expect_punct(':', "':' after the variable name");
        d.range = expect_int("a range after ':'");
        return d;
    }

    std::vector<Vec> parse_rows() {
        std::vector<Vec> rows;
        expect_punct('[', "'[' opening a matrix");
        do {
            expect_punct('[', "'[' opening a matrix row");
            Vec row;
            row.push_back(parse_rational());
            while (at_punct(',')) {
                take();
                row.push_back(parse_rational());
            }
            expect_punct(']', "']' closing the matrix row");
            rows.push_back(std::move(row));
            if (!at_punct(',')) break;
            take();
        } while (true);
        expect_punct(']', "']' closing the matrix");
        return rows;
    }

    BoxDecl parse_box() {
        BoxDecl d;
        d.pos = take().pos;  // 'box'
        d.id = expect_ident("a box name after 'box'");
        expect_punct('[', "'[' after the box name");
        d.inputs = parse_id_list_until(';');
        expect_punct(';', "';' separating inputs from outputs");
        d.outputs = parse_id_list_until(']');
        expect_punct(']', "']' closing the box variable lists");
        std::string kind = expect_ident("a body keyword (dense, white, sharp, stoch, unitary, matrix)");
        if (kind == "dense") {
            d.body = BodyKind::dense;
            expect_punct('[', "'[' opening the weight list");
            d.dense.push_back(parse_rational());
            while (at_punct(',')) {
                take();
                d.dense.push_back(parse_rational());
            }
            expect_punct(']', "']' closing the weight list");
        } else if (kind == "white") {
            d.body = BodyKind::white;
        } else if (kind == "sharp") {
            d.body = BodyKind::sharp;
            expect_punct('(', "'(' after 'sharp'");
            d.sharp_index = expect_int("a case index");
            expect_punct(')', "')' after the case index");
        } else if (kind == "stoch" || kind == "unitary" || kind == "matrix") {
            d.body = kind == "stoch" ? BodyKind::stoch
                                     : (kind == "unitary" ? BodyKind::unitary : BodyKind::matrix);
            d.rows = parse_rows();
        } else {
            syntax_fail(peek().pos, "a body keyword (dense, white, sharp, stoch, unitary, matrix)",
                        "'" + kind + "'");
        }
        return d;
    }

    LinkDecl parse_link() {
        LinkDecl d;
        d.pos = take().pos;  // 'link'
        d.kept = parse_qid();
        expect_punct('=', "'=' between link ends");
        d.dropped = parse_qid();
        return d;
    }

    EventNode parse_event_unit() {
        if (at_word("not")) {
            take();
            EventNode n;
            n.kind = EventNode::Kind::neg;
            n.kids.push_back(parse_event_unit());
            return n;
        }
        if (at_punct('(')) {
            take();
            EventNode inner = parse_event();
            expect_punct(')', "')' closing the event group");
            return inner;
        }
        EventNode n;
        n.a = parse_qid();
        expect_punct('=', "'=' in event atom");
        if (peek().kind == TokKind::number) {
            n.kind = EventNode::Kind::atom;
            n.value = expect_int("a value");
        } else {
            n.kind = EventNode::Kind::equal;
            n.b = parse_qid();
        }
        return n;
    }

    EventNode parse_event_conj() {
        EventNode first = parse_event_unit();
        if (!at_word("and")) return first;
        EventNode n;
        n.kind = EventNode::Kind::conj;
        n.kids.push_back(std::move(first));
        while (at_word("and")) {
            take();
            n.kids.push_back(parse_event_unit());
        }
        return n;
    }

    EventNode parse_event() {
        EventNode first = parse_event_conj();
        if (!at_word("or")) return first;
        EventNode n;
        n.kind = EventNode::Kind::disj;
        n.kids.push_back(std::move(first));
        while (at_word("or")) {
            take();
            n.kids.push_back(parse_event_conj());
        }
        return n;
    }

    QueryDecl parse_query() {
        QueryDecl d;
        d.pos = take().pos;  // 'query'
        std::string kind = expect_ident("a query kind (marginal, state, born, prob)");
        if (kind == "marginal") {
            d.kind = QueryDecl::Kind::marginal;
            d.ids.push_back(parse_qid());
            while (at_punct(',')) {
                take();
                d.ids.push_back(parse_qid());
            }
        } else if (kind == "state") {
            d.kind = QueryDecl::Kind::state;
            d.ids.push_back(parse_qid());
            expect_punct('=', "'=' between the linked pair");
            d.ids.push_back(parse_qid());
        } else if (kind == "born") {
            d.kind = QueryDecl::Kind::born;
            expect_punct('[', "'[' opening the projection diagonal");
            d.proj.push_back(static_cast<int>(expect_int("a projection bit")));
            while (at_punct(',')) {
                take();
                d.proj.push_back(static_cast<int>(expect_int("a projection bit")));
            }
            expect_punct(']', "']' closing the projection diagonal");
            d.ids.push_back(parse_qid());
            expect_punct('=', "'=' between the linked pair");
            d.ids.push_back(parse_qid());
        } else if (kind == "prob") {
            d.kind = QueryDecl::Kind::prob;
            d.event = parse_event();
        } else {
            syntax_fail(peek().pos, "a query kind (marginal, state, born, prob)", "'" + kind + "'");
        }
        return d;
    }
};

[[noreturn]] inline void semantic_fail(ErrorKind kind, const SourcePos& pos,
                                       const std::string& message) {
    fail(kind, std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + message);
}

inline std::size_t checked_cases(const std::vector<long>& ranges, const SourcePos& pos) {
    std::size_t cases = 1;
    for (long r : ranges) {
        if (r <= 0) semantic_fail(ErrorKind::RangeMismatch, pos, "ranges must be positive");
        if (cases > kMaxJointCases / static_cast<std::size_t>(r))
            semantic_fail(ErrorKind::DimensionCap, pos, "box exceeds the joint case cap");
        cases *= static_cast<std::size_t>(r);
    }
    return cases;
}

// Resolve the ranges of one side of a box against the global symbol table,
// inferring a single missing range from the required product when possible.
inline void resolve_side(const std::vector<std::string>& ids, std::size_t required,
                         std::map<std::string, long>& symbols, const SourcePos& pos) {
    std::vector<std::string> unknown;
    std::size_t known = 1;
    for (const std::string& id : ids) {
        auto it = symbols.find(id);
        if (it == symbols.end()) {
            unknown.push_back(id);
        } else {
            if (known > kMaxJointCases / static_cast<std::size_t>(it->second))
                semantic_fail(ErrorKind::DimensionCap, pos, "box exceeds the joint case cap");
            known *= static_cast<std::size_t>(it->second);
        }
    }
    if (unknown.empty()) {
        if (known != required)
            semantic_fail(ErrorKind::RangeMismatch, pos,
                          "declared ranges cover " + std::to_string(known) + " cases, body has " +
                              std::to_string(required));
        return;
    }
    if (unknown.size() > 1)
        semantic_fail(ErrorKind::UnknownVariable, pos,
                      "cannot infer ranges of " + unknown[0] + " and " + unknown[1] +
                          " together; declare one with 'var'");
    if (known == 0 || required % known != 0 || required / known == 0)
        semantic_fail(ErrorKind::RangeMismatch, pos,
                      "body size " + std::to_string(required) + " is not divisible by the " +
                          std::to_string(known) + " declared cases");
    symbols[unknown[0]] = static_cast<long>(required / known);
}

}  // namespace dsl_detail

// ---------------------------------------------------------------------------
// Validation: resolves ranges, builds component tables, checks bodies, links
// and queries. Throws positioned errors; a document that survives is ready
// for conversion and evaluation.
// ---------------------------------------------------------------------------

inline void validate(SystemDocument& doc) {
    using dsl_detail::semantic_fail;

    doc.symbols.clear();
    for (const VarDecl& v : doc.vars) {
        if (v.range <= 0) semantic_fail(ErrorKind::RangeMismatch, v.pos, "range must be positive");
        if (static_cast<std::size_t>(v.range) > kMaxJointCases)
            semantic_fail(ErrorKind::DimensionCap, v.pos, "range exceeds the joint case cap");
        if (!doc.symbols.emplace(v.id, v.range).second)
            semantic_fail(ErrorKind::NameClash, v.pos, "variable " + v.id + " declared twice");
    }

    std::set<std::string> box_names;
    for (BoxDecl& b : doc.boxes) {
        if (!box_names.insert(b.id).second)
            semantic_fail(ErrorKind::NameClash, b.pos, "box " + b.id + " declared twice");
        std::vector<std::string> locals = b.locals();
        std::set<std::string> seen;
        for (const std::string& id : locals)
            if (!seen.insert(id).second)
                semantic_fail(ErrorKind::NameClash, b.pos,
                              "variable " + id + " repeated inside box " + b.id);

        if (b.body == BodyKind::stoch || b.body == BodyKind::unitary ||
            b.body == BodyKind::matrix) {
            const std::size_t r = b.rows.size();
            const std::size_t c = b.rows[0].size();
            for (const Vec& row : b.rows)
                if (row.size() != c)
                    semantic_fail(ErrorKind::RangeMismatch, b.pos, "matrix rows differ in length");
            dsl_detail::resolve_side(b.inputs, c, doc.symbols, b.pos);
            dsl_detail::resolve_side(b.outputs, r, doc.symbols, b.pos);
        } else if (b.body == BodyKind::dense) {
            dsl_detail::resolve_side(locals, b.dense.size(), doc.symbols, b.pos);
        } else {  // white, sharp: no shape to infer from
            for (const std::string& id : locals)
                if (!doc.symbols.count(id))
                    semantic_fail(ErrorKind::UnknownVariable, b.pos,
                                  "variable " + id + " needs a 'var' declaration");
        }

        b.ranges.clear();
        for (const std::string& id : locals) b.ranges.push_back(doc.symbols.at(id));
        std::size_t cases = dsl_detail::checked_cases(b.ranges, b.pos);

        switch (b.body) {
            case BodyKind::dense:
                b.table = b.dense;
                break;
            case BodyKind::white:
                b.table.assign(cases, Rational(1));
                break;
            case BodyKind::sharp:
                if (b.sharp_index < 0 || static_cast<std::size_t>(b.sharp_index) >= cases)
                    semantic_fail(ErrorKind::RangeMismatch, b.pos,
                                  "sharp index is outside the box cases");
                b.table.assign(cases, Rational(0));
                b.table[static_cast<std::size_t>(b.sharp_index)] = 1;
                break;
            case BodyKind::stoch:
            case BodyKind::unitary:
            case BodyKind::matrix: {
                const std::size_t r = b.rows.size();
                const std::size_t c = b.rows[0].size();
                if (b.body == BodyKind::stoch) {
                    for (std::size_t j = 0; j < c; ++j) {
                        Rational colsum = 0;
                        for (std::size_t i = 0; i < r; ++i) {
                            if (is_negative(b.rows[i][j]))
                                semantic_fail(ErrorKind::InvalidGenerator, b.pos,
                                              "stoch body has a negative entry");
                            colsum += b.rows[i][j];
                        }
                        if (colsum != Rational(1))
                            semantic_fail(ErrorKind::InvalidGenerator, b.pos,
                                          "stoch body column does not sum to 1");
                    }
                }
                if (b.body == BodyKind::unitary) {
                    Mat m = Mat::from_rows(b.rows);
                    if (!m.square() || !is_unitary(m))
                        semantic_fail(ErrorKind::NotUnitary, b.pos,
                                      "unitary body is not orthogonal");
                }
                // layout: inputs vary slowest, column index = joint input case
                b.table.assign(cases, Rational(0));
                for (std::size_t j = 0; j < c; ++j)
                    for (std::size_t i = 0; i < r; ++i) b.table[j * r + i] = b.rows[i][j];
                break;
            }
        }
    }

    auto resolve = [&](const QualifiedId& q, const SourcePos& pos) -> long {
        for (const BoxDecl& b : doc.boxes)
            if (b.id == q.box) {
                std::vector<std::string> locals = b.locals();
                for (std::size_t k = 0; k < locals.size(); ++k)
                    if (locals[k] == q.var) return b.ranges[k];
                semantic_fail(ErrorKind::UnknownVariable, pos,
                              "box " + q.box + " has no variable " + q.var);
            }
        semantic_fail(ErrorKind::UnknownVariable, pos, "no box named " + q.box);
    };

    doc.drop_map.clear();
    std::set<std::string> link_ends;
    for (const LinkDecl& l : doc.links) {
        long ra = resolve(l.kept, l.pos);
        long rb = resolve(l.dropped, l.pos);
        if (ra != rb)
            semantic_fail(ErrorKind::RangeMismatch, l.pos,
                          "link ends " + l.kept.flat() + " and " + l.dropped.flat() +
                              " have different ranges");
        if (l.kept.box == l.dropped.box)
            semantic_fail(ErrorKind::ImproperSystem, l.pos,
                          "link ends must come from different boxes");
        if (!link_ends.insert(l.kept.flat()).second || !link_ends.insert(l.dropped.flat()).second)
            semantic_fail(ErrorKind::ImproperSystem, l.pos,
                          "a variable may appear in at most one link");
        doc.drop_map[l.dropped.flat()] = l.kept.flat();
    }

    auto check_event = [&](const EventNode& n, const SourcePos& pos, auto&& self) -> void {
        switch (n.kind) {
            case EventNode::Kind::atom: {
                long r = resolve(n.a, pos);
                if (n.value < 0 || n.value >= r)
                    semantic_fail(ErrorKind::RangeMismatch, pos,
                                  "value " + std::to_string(n.value) + " is outside the range of " +
                                      n.a.flat());
                break;
            }
            case EventNode::Kind::equal:
                if (resolve(n.a, pos) != resolve(n.b, pos))
                    semantic_fail(ErrorKind::RangeMismatch, pos,
                                  "compared variables have different ranges");
                break;
            default:
                for (const EventNode& k : n.kids) self(k, pos, self);
        }
    };

    for (QueryDecl& q : doc.queries) {
        switch (q.kind) {
            case QueryDecl::Kind::marginal:
                for (const QualifiedId& id : q.ids) resolve(id, q.pos);
                break;
            case QueryDecl::Kind::state:
            case QueryDecl::Kind::born: {
                resolve(q.ids[0], q.pos);
                resolve(q.ids[1], q.pos);
                bool found = false;
                for (const LinkDecl& l : doc.links) {
                    if (l.kept == q.ids[0] && l.dropped == q.ids[1]) found = true;
                    if (l.kept == q.ids[1] && l.dropped == q.ids[0]) {
                        std::swap(q.ids[0], q.ids[1]);  // normalize to declared order
                        found = true;
                    }
                    if (found) break;
                }
                if (!found)
                    semantic_fail(ErrorKind::ImproperSystem, q.pos,
                                  "queried pair is not a declared link");
                if (q.kind == QueryDecl::Kind::born) {
                    long r = resolve(q.ids[0], q.pos);
                    if (q.proj.size() != static_cast<std::size_t>(r))
                        semantic_fail(ErrorKind::RangeMismatch, q.pos,
                                      "projection diagonal length does not match the range");
                    for (int bit : q.proj)
                        if (bit != 0 && bit != 1)
                            semantic_fail(ErrorKind::RangeMismatch, q.pos,
                                          "projection entries must be 0 or 1");
                }
                break;
            }
            case QueryDecl::Kind::prob:
                check_event(q.event, q.pos, check_event);
                break;
        }
    }
}

// Parses and validates; every failure is a positioned Error, never a crash.
inline SystemDocument parse(const std::string& text) {
    SystemDocument doc = dsl_detail::Parser(dsl_detail::lex(text)).run();
    validate(doc);
    return doc;
}

// ---------------------------------------------------------------------------
// Conversion and query evaluation
// ---------------------------------------------------------------------------

inline LinkSystem to_link_system(const SystemDocument& doc) {
    LinkSystem sys;
    for (const BoxDecl& b : doc.boxes) {
        std::vector<VariableDescriptor> vars;
        std::vector<std::string> locals = b.locals();
        for (std::size_t k = 0; k < locals.size(); ++k)
            vars.push_back({b.id + "." + locals[k], b.ranges[k]});
        sys.components.push_back({b.id, make_process(vars, b.table)});
    }
    for (const LinkDecl& l : doc.links)
        sys.links.push_back({LinkEnd(l.kept.flat()), LinkEnd(l.dropped.flat())});
    return sys;
}

struct QueryValue {
    QueryDecl::Kind kind = QueryDecl::Kind::marginal;
    std::optional<Process> table;   // marginal
    std::optional<Mat> state;       // state
    std::optional<Rational> scalar; // born, prob
};

namespace dsl_detail {

inline std::string surviving_id(const SystemDocument& doc, const QualifiedId& q) {
    std::string f = q.flat();
    auto it = doc.drop_map.find(f);
    return it == doc.drop_map.end() ? f : it->second;
}

inline Event build_event(const SystemDocument& doc, const EventNode& n) {
    switch (n.kind) {
        case EventNode::Kind::atom:
            return Event::atom(surviving_id(doc, n.a), n.value);
        case EventNode::Kind::equal:
            return Event::equal(surviving_id(doc, n.a), surviving_id(doc, n.b));
        case EventNode::Kind::neg:
            return !build_event(doc, n.kids[0]);
        case EventNode::Kind::conj: {
            Event e = Event::always();
            for (const EventNode& k : n.kids) e = e && build_event(doc, k);
            return e;
        }
        case EventNode::Kind::disj: {
            Event e = Event::never();
            for (const EventNode& k : n.kids) e = e || build_event(doc, k);
            return e;
        }
    }
    fail(ErrorKind::ParseError, "unreachable event kind");
}

// state of the queried linked pair: every other link applied, then read
inline LinkState pair_state(const SystemDocument& doc, const QueryDecl& q) {
    LinkSystem sys = to_link_system(doc);
    std::string kept = q.ids[0].flat(), dropped = q.ids[1].flat();
    std::erase_if(sys.links, [&](const Link& l) {
        return l.first.members == std::vector<std::string>{kept} &&
               l.second.members == std::vector<std::string>{dropped};
    });
    return link_state(apply_links(sys), kept, dropped);
}

}  // namespace dsl_detail

inline QueryValue evaluate_query(const SystemDocument& doc, const QueryDecl& q) {
    QueryValue out;
    out.kind = q.kind;
    switch (q.kind) {
        case QueryDecl::Kind::marginal: {
            std::vector<std::string> ids;
            for (const QualifiedId& id : q.ids) ids.push_back(dsl_detail::surviving_id(doc, id));
            out.table = marginal(apply_links(to_link_system(doc)), ids);
            break;
        }
        case QueryDecl::Kind::state:
            out.state = dsl_detail::pair_state(doc, q).entries;
            break;
        case QueryDecl::Kind::born:
            out.scalar = born(Projection{q.proj}, dsl_detail::pair_state(doc, q));
            break;
        case QueryDecl::Kind::prob:
            out.scalar =
                probability(apply_links(to_link_system(doc)), dsl_detail::build_event(doc, q.event));
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Canonical serialization
// ---------------------------------------------------------------------------

namespace dsl_detail {

inline std::string event_text(const EventNode& n) {
    switch (n.kind) {
        case EventNode::Kind::atom:
            return n.a.flat() + " = " + std::to_string(n.value);
        case EventNode::Kind::equal:
            return n.a.flat() + " = " + n.b.flat();
        case EventNode::Kind::neg:
            return "not (" + event_text(n.kids[0]) + ")";
        case EventNode::Kind::conj:
        case EventNode::Kind::disj: {
            std::string sep = n.kind == EventNode::Kind::conj ? " and " : " or ";
            std::string out;
            for (std::size_t k = 0; k < n.kids.size(); ++k) {
                if (k) out += sep;
                const EventNode& kid = n.kids[k];
                bool wrap = kid.kind == EventNode::Kind::conj || kid.kind == EventNode::Kind::disj;
                out += wrap ? "(" + event_text(kid) + ")" : event_text(kid);
            }
            return out;
        }
    }
    return "";
}

inline std::string query_text(const QueryDecl& q) {
    switch (q.kind) {
        case QueryDecl::Kind::marginal: {
            std::string out = "marginal ";
            for (std::size_t k = 0; k < q.ids.size(); ++k)
                out += (k ? ", " : "") + q.ids[k].flat();
            return out;
        }
        case QueryDecl::Kind::state:
            return "state " + q.ids[0].flat() + " = " + q.ids[1].flat();
        case QueryDecl::Kind::born: {
            std::string out = "born [";
            for (std::size_t k = 0; k < q.proj.size(); ++k)
                out += (k ? "," : "") + std::to_string(q.proj[k]);
            return out + "] " + q.ids[0].flat() + " = " + q.ids[1].flat();
        }
        case QueryDecl::Kind::prob:
            return "prob " + event_text(q.event);
    }
    return "";
}

// canonical body: all-ones tables print as white, unit tables as sharp(k)
inline std::string body_text(const std::vector<Rational>& table) {
    bool ones = true;
    for (const Rational& w : table) ones = ones && w == Rational(1);
    if (ones) return "white";
    std::size_t units = 0, unit_at = 0;
    bool rest_zero = true;
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (table[k] == Rational(1)) {
            ++units;
            unit_at = k;
        } else if (!is_zero(table[k])) {
            rest_zero = false;
        }
    }
    if (units == 1 && rest_zero) return "sharp(" + std::to_string(unit_at) + ")";
    std::string out = "dense [";
    for (std::size_t k = 0; k < table.size(); ++k) out += (k ? "," : "") + to_string(table[k]);
    return out + "]";
}

}  // namespace dsl_detail

inline std::string serialize(const SystemDocument& doc) {
    std::string out;

    std::map<std::string, long> used;  // local ids referenced by boxes, sorted
    for (const BoxDecl& b : doc.boxes) {
        std::vector<std::string> locals = b.locals();
        for (std::size_t k = 0; k < locals.size(); ++k) used[locals[k]] = b.ranges[k];
    }
    for (const auto& [id, range] : used)
        out += "var " + id + ":" + std::to_string(range) + "\n";

    std::vector<const BoxDecl*> boxes;
    for (const BoxDecl& b : doc.boxes) boxes.push_back(&b);
    std::sort(boxes.begin(), boxes.end(),
              [](const BoxDecl* a, const BoxDecl* b) { return a->id < b->id; });
    for (const BoxDecl* b : boxes) {
        out += "box " + b->id + "[";
        for (std::size_t k = 0; k < b->inputs.size(); ++k) out += (k ? "," : "") + b->inputs[k];
        out += ";";
        for (std::size_t k = 0; k < b->outputs.size(); ++k) out += (k ? "," : "") + b->outputs[k];
        out += "] " + dsl_detail::body_text(b->table) + "\n";
    }

    std::vector<std::pair<std::string, std::string>> links;
    for (const LinkDecl& l : doc.links) links.push_back({l.kept.flat(), l.dropped.flat()});
    std::sort(links.begin(), links.end());
    for (const auto& [kept, dropped] : links) out += "link " + kept + " = " + dropped + "\n";

    for (const QueryDecl& q : doc.queries) out += "query " + dsl_detail::query_text(q) + "\n";
    return out;
}

// Serializes a programmatic system: each component becomes a box with all its
// variables on the output side; flat ids are localized by stripping the box
// prefix or replacing dots, deduplicating per (name, range).
inline std::string serialize(const LinkSystem& sys) {
    SystemDocument doc;
    std::map<std::string, std::string> flat_to_local;
    std::map<std::string, long> local_range;
    for (const Component& c : sys.components) {
        BoxDecl b;
        b.id = c.name;
        for (const VariableDescriptor& v : c.process.vars()) {
            std::string local = v.id;
            if (local.rfind(c.name + ".", 0) == 0) local = local.substr(c.name.size() + 1);
            for (char& ch : local)
                if (ch == '.') ch = '_';
            std::string base = local;
            int suffix = 2;
            while (local_range.count(local) && local_range[local] != v.range)
                local = base + "_" + std::to_string(suffix++);
            local_range[local] = v.range;
            flat_to_local[v.id] = b.id + "." + local;
            b.outputs.push_back(local);
            b.ranges.push_back(v.range);
        }
        b.table = c.process.weights();
        doc.boxes.push_back(std::move(b));
    }
    for (const Link& l : sys.links) {
        if (l.first.members.size() != 1 || l.second.members.size() != 1)
            fail(ErrorKind::ImproperSystem, "only single-variable link ends serialize");
        LinkDecl d;
        const std::string& kf = flat_to_local.at(l.first.members[0]);
        const std::string& df = flat_to_local.at(l.second.members[0]);
        auto split = [](const std::string& f) {
            std::size_t dot = f.find('.');
            return QualifiedId{f.substr(0, dot), f.substr(dot + 1)};
        };
        d.kept = split(kf);
        d.dropped = split(df);
        doc.links.push_back(d);
    }
    return serialize(doc);
}

// Structural equality of link systems modulo variable naming: components are
// matched by name, variables by position, links by the induced renaming.
inline bool structurally_equal(const LinkSystem& a, const LinkSystem& b) {
    if (a.components.size() != b.components.size() || a.links.size() != b.links.size())
        return false;
    auto canon = [](const LinkSystem& s) {
        std::map<std::string, std::string> rename;
        std::vector<std::pair<std::string, std::pair<std::vector<long>, std::vector<Rational>>>>
            comps;
        for (const Component& c : s.components) {
            std::vector<long> ranges;
            const auto& vars = c.process.vars();
            for (std::size_t k = 0; k < vars.size(); ++k) {
                rename[vars[k].id] = c.name + "#" + std::to_string(k);
                ranges.push_back(vars[k].range);
            }
            comps.push_back({c.name, {ranges, c.process.weights()}});
        }
        std::sort(comps.begin(), comps.end());
        std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> links;
        for (const Link& l : s.links) {
            std::vector<std::string> first, second;
            for (const std::string& m : l.first.members) first.push_back(rename.at(m));
            for (const std::string& m : l.second.members) second.push_back(rename.at(m));
            links.push_back({first, second});
        }
        std::sort(links.begin(), links.end());
        return std::make_pair(comps, links);
    };
    return canon(a) == canon(b);
}

// Semantic document equality: resolved tables, splits, links and queries; the
// surface body notation (stoch vs dense, etc.) does not matter.
inline bool same_document(const SystemDocument& a, const SystemDocument& b) {
    if (a.boxes.size() != b.boxes.size() || a.links.size() != b.links.size() ||
        a.queries.size() != b.queries.size())
        return false;
    auto box_view = [](const SystemDocument& d) {
        std::map<std::string, const BoxDecl*> m;
        for (const BoxDecl& x : d.boxes) m[x.id] = &x;
        return m;
    };
    auto av = box_view(a), bv = box_view(b);
    for (const auto& [id, pa] : av) {
        auto it = bv.find(id);
        if (it == bv.end()) return false;
        const BoxDecl* pb = it->second;
        if (pa->inputs != pb->inputs || pa->outputs != pb->outputs || pa->ranges != pb->ranges ||
            pa->table != pb->table)
            return false;
    }
    auto link_view = [](const SystemDocument& d) {
        std::vector<std::pair<std::string, std::string>> v;
        for (const LinkDecl& l : d.links) v.push_back({l.kept.flat(), l.dropped.flat()});
        std::sort(v.begin(), v.end());
        return v;
    };
    if (link_view(a) != link_view(b)) return false;
    for (std::size_t k = 0; k < a.queries.size(); ++k) {
        const QueryDecl& qa = a.queries[k];
        const QueryDecl& qb = b.queries[k];
        if (qa.kind != qb.kind || qa.ids != qb.ids || qa.proj != qb.proj ||
            !(qa.event == qb.event))
            return false;
    }
    return true;
}

}  // namespace lks
