#pragma once

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/heckelab.hpp"

namespace deformlab::cli {

/// Parse or validation failure at a 1-based line and column of the task
/// file (column 0 when the error concerns a whole section or file).
class task_error : public error {
public:
    task_error(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : error(located(what, line, column)), line_(line), column_(column)
    {
    }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string located(const std::string& what, std::size_t line, std::size_t column)
    {
        if (line == 0)
            return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }
    std::size_t line_, column_;
};

struct TaskEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
    std::size_t column = 0; ///< column of the first character of value
};

struct TaskSection {
    std::string name;
    std::size_t line = 0;
    std::vector<TaskEntry> entries;

    const TaskEntry* find(std::string_view key) const
    {
        for (const auto& e : entries)
            if (e.key == key)
                return &e;
        return nullptr;
    }
};

/// Sections in file order. Only names, keys and values take part in
/// equality; locations do not.
struct TaskFile {
    std::vector<TaskSection> sections;

    const TaskSection* section(std::string_view name) const
    {
        for (const auto& s : sections)
            if (s.name == name)
                return &s;
        return nullptr;
    }

    std::string command() const { return section("task")->find("command")->value; }

    std::string to_text() const
    {
        std::ostringstream os;
        for (std::size_t i = 0; i < sections.size(); ++i) {
            if (i)
                os << "\n";
            os << "[" << sections[i].name << "]\n";
            for (const auto& e : sections[i].entries)
                os << e.key << " = " << e.value << "\n";
        }
        return os.str();
    }

    friend bool operator==(const TaskFile& a, const TaskFile& b)
    {
        if (a.sections.size() != b.sections.size())
            return false;
        for (std::size_t i = 0; i < a.sections.size(); ++i) {
            const auto& x = a.sections[i];
            const auto& y = b.sections[i];
            if (x.name != y.name || x.entries.size() != y.entries.size())
                return false;
            for (std::size_t j = 0; j < x.entries.size(); ++j)
                if (x.entries[j].key != y.entries[j].key || x.entries[j].value != y.entries[j].value)
                    return false;
        }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Value syntax

/// Bracketed list tree; leaves keep their text and absolute column.
struct ListNode {
    bool leaf = false;
    std::string text;
    std::size_t column = 0;
    std::vector<ListNode> items;
};

inline ListNode parse_list(const TaskEntry& e)
{
    const std::string& s = e.value;
    std::size_t pos = 0;
    auto col = [&](std::size_t p) { return e.column + p; };
    auto skip = [&] {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    };
    std::function<ListNode()> node = [&]() -> ListNode {
        skip();
        ListNode n;
        n.column = col(pos);
        if (pos < s.size() && s[pos] == '[') {
            ++pos;
            skip();
            if (pos < s.size() && s[pos] == ']') {
                ++pos;
                return n;
            }
            for (;;) {
                n.items.push_back(node());
                skip();
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < s.size() && s[pos] == ']') {
                    ++pos;
                    return n;
                }
                throw task_error("expected ',' or ']'", e.line, col(pos));
            }
        }
        n.leaf = true;
        int depth = 0;
        const std::size_t start = pos;
        while (pos < s.size()) {
            const char c = s[pos];
            if (c == '(')
                ++depth;
            else if (c == ')')
                --depth;
            else if (depth == 0 && (c == ',' || c == ']' || c == '['))
                break;
            ++pos;
        }
        n.text = s.substr(start, pos - start);
        while (!n.text.empty() && std::isspace(static_cast<unsigned char>(n.text.back())))
            n.text.pop_back();
        if (n.text.empty())
            throw task_error("empty list entry", e.line, n.column);
        return n;
    };
    ListNode root = node();
    skip();
    if (pos != s.size())
        throw task_error("unexpected text after list", e.line, col(pos));
    return root;
}

/// Names an expression may use: noncommuting letters, commuting parameter
/// symbols and, when a cyclotomic order is configured, z = zeta_order.
struct ExprContext {
    int zeta_order = 0;
    std::vector<std::string> letters;
    std::map<std::string, Symbol> params;
};

namespace detail {

class ExprParser {
public:
    ExprParser(std::string_view text, const ExprContext& ctx, std::size_t line, std::size_t column)
        : s_(text), ctx_(ctx), line_(line), column_(column)
    {
    }

    SmashElement parse()
    {
        auto v = sum();
        skip();
        if (pos_ != s_.size())
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what, std::optional<std::size_t> at = std::nullopt) const
    {
        throw task_error(what, line_, column_ + at.value_or(pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool peek(char c)
    {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool starts_atom()
    {
        skip();
        if (pos_ >= s_.size())
            return false;
        const char c = s_[pos_];
        return c == '(' || std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    SmashElement sum()
    {
        auto v = product();
        for (;;) {
            if (peek('+')) {
                ++pos_;
                v += product();
            } else if (peek('-')) {
                ++pos_;
                v -= product();
            } else
                return v;
        }
    }

    SmashElement product()
    {
        auto v = unary();
        for (;;) {
            if (peek('*')) {
                ++pos_;
                v = deformlab::detail::word_product(v, unary());
            } else if (peek('/')) {
                ++pos_;
                const std::size_t at = pos_;
                const auto d = unary();
                v = v.scaled(ParamPoly(constant_of(d, at).inverse()));
            } else if (starts_atom())
                v = deformlab::detail::word_product(v, unary());
            else
                return v;
        }
    }

    Cyclotomic constant_of(const SmashElement& d, std::size_t at) const
    {
        if (d.is_zero())
            throw task_error("zero denominator", line_, column_ + at);
        if (d.terms().size() != 1 || d.terms().begin()->first != SmashElement::Key{0, {}} ||
            !d.terms().begin()->second.is_constant())
            fail("division by a non-constant", at);
        return d.terms().begin()->second.constant();
    }

    SmashElement unary()
    {
        if (peek('-')) {
            ++pos_;
            return -unary();
        }
        if (peek('+')) {
            ++pos_;
            return unary();
        }
        auto base = atom();
        if (peek('^')) {
            ++pos_;
            skip();
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            if (start == pos_)
                fail("expected exponent");
            const int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
            SmashElement r(1);
            for (int i = 0; i < e; ++i)
                r = deformlab::detail::word_product(r, base);
            return r;
        }
        return base;
    }

    SmashElement atom()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto v = sum();
            if (!peek(')'))
                fail("expected ')'");
            ++pos_;
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            return SmashElement(ParamPoly(Rational(Integer(std::string(s_.substr(start, pos_ - start))))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            return identifier(std::string(s_.substr(start, pos_ - start)), start);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    SmashElement identifier(const std::string& name, std::size_t at)
    {
        if (auto it = ctx_.params.find(name); it != ctx_.params.end())
            return SmashElement(ParamPoly::variable(it->second));
        const bool z_is_letter = std::find(ctx_.letters.begin(), ctx_.letters.end(), "z") != ctx_.letters.end();
        if (name == "z" && !z_is_letter) {
            if (ctx_.zeta_order < 1)
                fail("z needs a cyclotomic order in [scalars]", at);
            return SmashElement(ParamPoly(Cyclotomic::zeta(ctx_.zeta_order)));
        }
        // a run of letters such as "yx" is the word y x
        Word w;
        std::size_t i = 0;
        while (i < name.size()) {
            std::size_t best = 0, best_len = 0;
            for (std::size_t l = 0; l < ctx_.letters.size(); ++l) {
                const auto& L = ctx_.letters[l];
                if (L.size() > best_len && name.compare(i, L.size(), L) == 0) {
                    best = l;
                    best_len = L.size();
                }
            }
            if (best_len == 0)
                fail("unknown name '" + name + "'", at);
            w.push_back(static_cast<int>(best));
            i += best_len;
        }
        return SmashElement::monomial(std::move(w));
    }

    std::string_view s_;
    const ExprContext& ctx_;
    std::size_t line_, column_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline SmashElement parse_expression(std::string_view text, const ExprContext& ctx, std::size_t line,
                                     std::size_t column)
{
    return detail::ExprParser(text, ctx, line, column).parse();
}

inline ParamPoly parse_poly(std::string_view text, const ExprContext& ctx, std::size_t line, std::size_t column)
{
    const auto e = parse_expression(text, ctx, line, column);
    if (e.is_zero())
        return ParamPoly();
    if (e.terms().size() != 1 || e.terms().begin()->first != SmashElement::Key{0, {}})
        throw task_error("expected a scalar expression", line, column);
    return e.terms().begin()->second;
}

inline Cyclotomic parse_scalar(std::string_view text, const ExprContext& ctx, std::size_t line, std::size_t column)
{
    const auto p = parse_poly(text, ctx, line, column);
    if (!p.is_constant())
        throw task_error("expected a constant", line, column);
    return p.constant();
}

inline long parse_int(std::string_view text, std::size_t line, std::size_t column)
{
    long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw task_error("expected an integer, got '" + std::string(text) + "'", line, column);
    return v;
}

inline std::size_t parse_count(const TaskEntry& e, long min = 0)
{
    const long v = parse_int(e.value, e.line, e.column);
    if (v < min)
        throw task_error(e.key + " must be at least " + std::to_string(min), e.line, e.column);
    return static_cast<std::size_t>(v);
}

inline bool parse_bool(const TaskEntry& e)
{
    if (e.value == "true" || e.value == "yes" || e.value == "1")
        return true;
    if (e.value == "false" || e.value == "no" || e.value == "0")
        return false;
    throw task_error("expected true or false", e.line, e.column);
}

/// Whitespace- or comma-separated names.
inline std::vector<std::string> parse_names(const TaskEntry& e)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : e.value + " ") {
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            if (!cur.empty())
                out.push_back(std::move(cur));
            cur.clear();
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
            cur += c;
        else
            throw task_error("bad character '" + std::string(1, c) + "' in name list", e.line, e.column);
    }
    return out;
}

/// Items separated by ';' with their columns.
inline std::vector<std::pair<std::string, std::size_t>> split_items(const TaskEntry& e)
{
    std::vector<std::pair<std::string, std::size_t>> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= e.value.size(); ++i)
        if (i == e.value.size() || e.value[i] == ';') {
            std::size_t a = start, b = i;
            while (a < b && std::isspace(static_cast<unsigned char>(e.value[a])))
                ++a;
            while (b > a && std::isspace(static_cast<unsigned char>(e.value[b - 1])))
                --b;
            if (a < b)
                out.emplace_back(e.value.substr(a, b - a), e.column + a);
            start = i + 1;
        }
    return out;
}

inline std::vector<long> parse_int_list(const TaskEntry& e)
{
    std::vector<long> out;
    std::size_t i = 0;
    const auto& s = e.value;
    while (i < s.size()) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ','))
            ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ',')
            ++i;
        if (start < i)
            out.push_back(parse_int(std::string_view(s).substr(start, i - start), e.line, e.column + start));
    }
    return out;
}

inline CycMatrix matrix_from(const ListNode& n, const ExprContext& ctx, std::size_t line)
{
    if (n.leaf || n.items.empty())
        throw task_error("expected a matrix [[..], ..]", line, n.column);
    const std::size_t rows = n.items.size();
    const std::size_t cols = n.items[0].items.size();
    CycMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = n.items[i];
        if (row.leaf || row.items.size() != cols)
            throw task_error("matrix rows must have equal length", line, row.column);
        for (std::size_t j = 0; j < cols; ++j) {
            if (!row.items[j].leaf)
                throw task_error("expected a matrix entry", line, row.items[j].column);
            m(i, j) = parse_scalar(row.items[j].text, ctx, line, row.items[j].column);
        }
    }
    return m;
}

inline std::vector<Cyclotomic> vector_from(const ListNode& n, const ExprContext& ctx, std::size_t line)
{
    if (n.leaf)
        throw task_error("expected a vector [..]", line, n.column);
    std::vector<Cyclotomic> v;
    for (const auto& x : n.items) {
        if (!x.leaf)
            throw task_error("expected a vector entry", line, x.column);
        v.push_back(parse_scalar(x.text, ctx, line, x.column));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Schema

inline const std::vector<std::string>& commands()
{
    static const std::vector<std::string> c{"hochschild",      "deform",        "poisson",         "flat",
                                            "torsion",         "sra-classify",  "sra-pbw",         "dunkl-commute",
                                            "hecke-classify",  "hecke-obstruction", "coxeter-even", "group-order",
                                            "orbifold-dims"};
    return c;
}

/// Task options accepted by each command; the first `required` are mandatory.
struct CommandSchema {
    std::vector<std::string> options;
    std::size_t required = 0;
    bool needs_group = false;
};

inline const CommandSchema& schema(const std::string& command)
{
    static const std::map<std::string, CommandSchema> s{
        {"hochschild", {{"algebra", "n_max", "table", "unit"}, 2, false}},
        {"deform", {{"algebra", "mu1", "order", "table", "unit"}, 3, false}},
        {"poisson", {{"vars", "bracket"}, 2, false}},
        {"flat", {{"letters", "relations", "degree", "parameters", "deformation", "slack"}, 3, false}},
        {"torsion", {{"letters", "relations", "n_max", "parameters", "deformation"}, 3, false}},
        {"sra-classify", {{}, 0, true}},
        {"sra-pbw", {{"degree", "kappa", "trials"}, 1, true}},
        {"dunkl-commute", {{"degree", "equivariance"}, 1, true}},
        {"hecke-classify", {{}, 0, true}},
        {"hecke-obstruction", {{"oracle"}, 0, true}},
        {"coxeter-even", {{"wordlen", "slack"}, 1, true}},
        {"group-order", {{}, 0, true}},
        {"orbifold-dims", {{}, 0, true}},
    };
    return s.at(command);
}

inline const std::map<std::string, std::set<std::string>>& section_keys()
{
    static const std::map<std::string, std::set<std::string>> k{
        {"scalars", {"order", "seed"}},
        {"group", {"kind", "generators", "n", "dim", "triple", "matrix"}},
        {"space", {"dim", "form"}},
    };
    return k;
}

inline ExprContext scalar_context(const TaskFile& t)
{
    ExprContext ctx;
    if (const auto* s = t.section("scalars"))
        if (const auto* e = s->find("order"))
            ctx.zeta_order = static_cast<int>(parse_count(*e, 1));
    return ctx;
}

/// Letters and parameters of a presentation task.
inline ExprContext presentation_context(const TaskFile& t)
{
    ExprContext ctx = scalar_context(t);
    const auto* task = t.section("task");
    ctx.letters = parse_names(*task->find("letters"));
    if (ctx.letters.empty())
        throw task_error("letters must not be empty", task->find("letters")->line, task->find("letters")->column);
    if (const auto* p = task->find("parameters"))
        for (const auto& n : parse_names(*p))
            ctx.params.emplace(n, symbol(n));
    return ctx;
}

/// Syntax checks that need no mathematics: values parse, integers are
/// integers, lists are well formed.
inline void validate(const TaskFile& t)
{
    const auto ctx = scalar_context(t);
    if (const auto* s = t.section("scalars"))
        if (const auto* e = s->find("seed"))
            parse_count(*e);
    if (const auto* g = t.section("group")) {
        const auto* kind = g->find("kind");
        if (!kind)
            throw task_error("[group] needs kind", g->line);
        static const std::set<std::string> kinds{"matrices", "cyclic", "trivial", "triangle", "coxeter"};
        if (!kinds.count(kind->value))
            throw task_error("unknown group kind '" + kind->value + "'", kind->line, kind->column);
        if (const auto* e = g->find("generators"))
            for (const auto& m : parse_list(*e).items)
                matrix_from(m, ctx, e->line);
        for (const char* k : {"n", "dim"})
            if (const auto* e = g->find(k))
                parse_count(*e, 1);
        if (const auto* e = g->find("triple"))
            if (parse_int_list(*e).size() != 3)
                throw task_error("triple needs three integers", e->line, e->column);
        if (const auto* e = g->find("matrix")) {
            const auto n = parse_list(*e);
            for (const auto& row : n.items)
                for (const auto& x : row.items)
                    if (!x.leaf || (x.text != "inf" && !std::all_of(x.text.begin(), x.text.end(), ::isdigit)))
                        throw task_error("Coxeter entries are integers or inf", e->line, x.column);
        }
    }
    if (const auto* s = t.section("space")) {
        if (const auto* e = s->find("dim"))
            parse_count(*e, 1);
        if (const auto* e = s->find("form"))
            matrix_from(parse_list(*e), ctx, e->line);
    }
    const auto* task = t.section("task");
    for (const auto& e : task->entries) {
        if (e.key == "n_max" || e.key == "degree" || e.key == "order" || e.key == "wordlen" || e.key == "trials" ||
            e.key == "slack")
            parse_count(e);
        else if (e.key == "oracle" || e.key == "equivariance")
            parse_bool(e);
        else if (e.key == "table" || e.key == "unit" || e.key == "mu1" || e.key == "bracket")
            parse_list(e);
    }
    if (const auto* r = task->find("relations")) {
        const auto pctx = presentation_context(t);
        for (const auto& [text, col] : split_items(*r))
            parse_expression(text, pctx, r->line, col);
    }
}

/// Line-oriented sections: "[name]" headers, "key = value" pairs, '#'
/// comments and blank lines. Exactly one [task] section with a known
/// command is required.
inline TaskFile parse_task(std::string_view text)
{
    TaskFile t;
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos)
            end = text.size();
        std::string line(text.substr(begin, end - begin));
        ++line_no;
        begin = end + 1;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::size_t a = 0;
        while (a < line.size() && std::isspace(static_cast<unsigned char>(line[a])))
            ++a;
        std::size_t b = line.size();
        while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1])))
            --b;
        if (a == b) {
            if (end == text.size())
                break;
            continue;
        }
        if (line[a] == '[') {
            if (line[b - 1] != ']')
                throw task_error("section header must end with ']'", line_no, b);
            std::string name = line.substr(a + 1, b - a - 2);
            if (name != "task" && !section_keys().count(name))
                throw task_error("unknown section [" + name + "]", line_no, a + 1);
            if (t.section(name))
                throw task_error(name == "task" ? "duplicate task" : "duplicate section [" + name + "]", line_no, a + 1);
            t.sections.push_back({name, line_no, {}});
        } else {
            const auto eq = line.find('=', a);
            if (eq == std::string::npos || eq >= b)
                throw task_error("expected 'key = value'", line_no, a + 1);
            if (t.sections.empty())
                throw task_error("entry outside of a section", line_no, a + 1);
            std::size_t ke = eq;
            while (ke > a && std::isspace(static_cast<unsigned char>(line[ke - 1])))
                --ke;
            std::size_t vs = eq + 1;
            while (vs < b && std::isspace(static_cast<unsigned char>(line[vs])))
                ++vs;
            TaskEntry e{line.substr(a, ke - a), line.substr(vs, b - vs), line_no, vs + 1};
            if (e.key.empty())
                throw task_error("missing key", line_no, a + 1);
            auto& sec = t.sections.back();
            if (sec.find(e.key))
                throw task_error("duplicate key '" + e.key + "'", line_no, a + 1);
            sec.entries.push_back(std::move(e));
        }
        if (end == text.size())
            break;
    }

    const auto* task = t.section("task");
    if (!task)
        throw task_error("missing required section [task]");
    const auto* cmd = task->find("command");
    if (!cmd)
        throw task_error("[task] needs a command", task->line);
    if (std::find(commands().begin(), commands().end(), cmd->value) == commands().end())
        throw task_error("unknown command '" + cmd->value + "'", cmd->line, cmd->column);
    const auto& sch = schema(cmd->value);
    for (const auto& e : task->entries)
        if (e.key != "command" && std::find(sch.options.begin(), sch.options.end(), e.key) == sch.options.end())
            throw task_error("unknown option '" + e.key + "' for " + cmd->value, e.line, 1);
    for (std::size_t i = 0; i < sch.required; ++i)
        if (!task->find(sch.options[i]))
            throw task_error(cmd->value + " needs option '" + sch.options[i] + "'", task->line);
    for (const auto& s : t.sections)
        if (s.name != "task")
            for (const auto& e : s.entries)
                if (!section_keys().at(s.name).count(e.key))
                    throw task_error("unknown key '" + e.key + "' in [" + s.name + "]", e.line, 1);
    if (sch.needs_group && !t.section("group"))
        throw task_error("missing required section [group]");
    validate(t);
    return t;
}

} // namespace deformlab::cli
