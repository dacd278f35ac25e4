#pragma once

#include <chrono>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "deformlab/cli/report.hpp"
#include "deformlab/cli/task.hpp"
#include "deformlab/dunkl.hpp"
#include "deformlab/heckelab.hpp"
#include "deformlab/hochschild.hpp"
#include "deformlab/sra.hpp"

namespace deformlab::cli {

/// Command-line overrides.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> degree_budget; ///< cap on degree-like options
};

namespace detail {

using nlohmann::json;

inline json to_json(const Cyclotomic& c) { return c.to_string(); }

inline json to_json(const std::vector<Cyclotomic>& v)
{
    json a = json::array();
    for (const auto& x : v)
        a.push_back(x.to_string());
    return a;
}

inline json to_json(const std::vector<std::size_t>& v)
{
    json a = json::array();
    for (auto x : v)
        a.push_back(x);
    return a;
}

class Context {
public:
    Context(const TaskFile& t, const RunOptions& opt) : t_(t), opt_(opt), scalars_(scalar_context(t))
    {
        seed_ = 0;
        if (const auto* s = t.section("scalars"))
            if (const auto* e = s->find("seed"))
                seed_ = parse_count(*e);
        if (opt.seed)
            seed_ = *opt.seed;
    }

    std::uint64_t seed() const { return seed_; }
    const ExprContext& scalars() const { return scalars_; }
    const TaskSection& task() const { return *t_.section("task"); }
    const TaskFile& file() const { return t_; }

    const TaskEntry* option(std::string_view key) const { return task().find(key); }

    std::size_t count(std::string_view key, std::size_t fallback, long min = 0) const
    {
        const auto* e = option(key);
        return e ? parse_count(*e, min) : fallback;
    }

    /// Degree-like option, checked against the budget.
    std::size_t degree(std::string_view key, std::size_t fallback, long min = 0) const
    {
        const auto v = count(key, fallback, min);
        if (opt_.degree_budget && v > *opt_.degree_budget) {
            const auto* e = option(key);
            throw task_error(std::string(key) + " = " + std::to_string(v) + " exceeds the degree budget " +
                                 std::to_string(*opt_.degree_budget),
                             e ? e->line : 0, e ? e->column : 0);
        }
        return v;
    }

    bool flag(std::string_view key, bool fallback) const
    {
        const auto* e = option(key);
        return e ? parse_bool(*e) : fallback;
    }

    const TaskSection& group_section() const { return *t_.section("group"); }

    std::string group_kind() const { return group_section().find("kind")->value; }

    const TaskEntry& group_key(std::string_view key) const
    {
        const auto* e = group_section().find(key);
        if (!e)
            throw task_error("[group] of kind " + group_kind() + " needs " + std::string(key), group_section().line);
        return *e;
    }

    FiniteGroup group() const
    {
        const auto kind = group_kind();
        const auto& sec = group_section();
        if (kind == "trivial") {
            const auto* e = sec.find("dim");
            return trivial_group(e ? parse_count(*e, 1) : 2);
        }
        if (kind == "cyclic") {
            const int n = static_cast<int>(parse_count(group_key("n"), 1));
            const auto* e = sec.find("dim");
            const std::size_t dim = e ? parse_count(*e, 1) : 2;
            if (dim == 1)
                return generate_group({cyclic_line_generator(n)});
            if (dim == 2)
                return generate_group({cyclic_sl2_generator(n)});
            throw task_error("cyclic groups act on dimension 1 or 2", e->line, e->column);
        }
        if (kind == "matrices") {
            const auto& e = group_key("generators");
            std::vector<CycMatrix> gens;
            for (const auto& m : parse_list(e).items)
                gens.push_back(matrix_from(m, scalars_, e.line));
            if (gens.empty())
                throw task_error("generators must not be empty", e.line, e.column);
            return generate_group(gens);
        }
        throw task_error("this command needs a matrix group, not kind " + kind, sec.line);
    }

    std::array<int, 3> triple() const
    {
        if (group_kind() != "triangle")
            throw task_error("this command needs [group] kind = triangle", group_section().line);
        const auto v = parse_int_list(group_key("triple"));
        return {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
    }

    CoxeterMatrix coxeter() const
    {
        if (group_kind() != "coxeter")
            throw task_error("this command needs [group] kind = coxeter", group_section().line);
        const auto& e = group_key("matrix");
        std::vector<std::vector<int>> m;
        for (const auto& row : parse_list(e).items) {
            m.emplace_back();
            for (const auto& x : row.items)
                m.back().push_back(x.text == "inf" ? CoxeterMatrix::kInfinity : std::stoi(x.text));
        }
        return CoxeterMatrix(m);
    }

    SympAction action() const
    {
        auto G = group();
        const auto* sp = t_.section("space");
        if (sp) {
            if (const auto* d = sp->find("dim"))
                if (parse_count(*d) != G.dim())
                    throw task_error("[space] dim does not match the group", d->line, d->column);
            if (const auto* f = sp->find("form"))
                return SympAction(std::move(G), SympForm(matrix_from(parse_list(*f), scalars_, f->line)));
        }
        return SympAction::standard(std::move(G));
    }

    StructConstAlgebra algebra() const
    {
        const auto& e = *option("algebra");
        const auto words = parse_names(e);
        if (words.size() == 2 && (words[0] == "truncated" || words[0] == "cyclic")) {
            const auto n = static_cast<std::size_t>(parse_int(words[1], e.line, e.column));
            if (n < 1)
                throw task_error("algebra size must be positive", e.line, e.column);
            return words[0] == "truncated" ? StructConstAlgebra::truncated_polynomial(n)
                                           : StructConstAlgebra::cyclic_group_algebra(n);
        }
        if (words.size() == 1 && words[0] == "table") {
            const auto* t = option("table");
            if (!t)
                throw task_error("algebra = table needs a table option", e.line, e.column);
            std::vector<std::vector<StructConstAlgebra::Vec>> mult;
            for (const auto& row : parse_list(*t).items) {
                mult.emplace_back();
                for (const auto& v : row.items)
                    mult.back().push_back(vector_from(v, scalars_, t->line));
            }
            std::optional<StructConstAlgebra::Vec> unit;
            if (const auto* u = option("unit"))
                unit = vector_from(parse_list(*u), scalars_, u->line);
            return StructConstAlgebra(std::move(mult), std::move(unit));
        }
        throw task_error("algebra is 'truncated N', 'cyclic N' or 'table'", e.line, e.column);
    }

    Presentation presentation() const
    {
        const auto ctx = presentation_context(t_);
        auto P = Presentation::free_algebra(ctx.letters.size());
        P.letters = ctx.letters;
        const auto& rel = *option("relations");
        for (const auto& [text, col] : split_items(rel))
            P.relations.push_back(parse_expression(text, ctx, rel.line, col));
        if (const auto* p = option("parameters"))
            for (const auto& n : parse_names(*p))
                P.parameters.push_back(symbol(n));
        if (const auto* d = option("deformation")) {
            for (const auto& n : parse_names(*d)) {
                if (!ctx.params.count(n))
                    throw task_error("deformation parameter '" + n + "' is not declared", d->line, d->column);
                P.deformation.push_back(symbol(n));
            }
        } else
            P.deformation = P.parameters;
        return P;
    }

private:
    const TaskFile& t_;
    RunOptions opt_;
    ExprContext scalars_;
    std::uint64_t seed_ = 0;
};

inline json verdicts_json(const std::vector<FlatnessVerdict>& vs)
{
    json a = json::array();
    for (const auto& v : vs)
        a.push_back({{"degree", v.degree}, {"generic_dim", v.generic_dim}, {"special_dim", v.special_dim},
                     {"flat", v.flat}});
    return a;
}

inline int run_hochschild(const Context& c, json& out)
{
    const auto A = c.algebra();
    const auto n = c.degree("n_max", 3);
    out["algebra_dim"] = A.dim();
    out["dims"] = to_json(cohomology_dims(A, n));
    out["center_dim"] = center_dim(A);
    return 0;
}

inline int run_deform(const Context& c, json& out)
{
    const auto A = c.algebra();
    const auto N = c.degree("order", 2, 1);
    const auto& e = *c.option("mu1");
    Cochain mu1(2, A.dim());
    for (const auto& entry : parse_list(e).items) {
        if (entry.leaf || entry.items.size() != 3 || !entry.items[0].leaf || !entry.items[1].leaf)
            throw task_error("mu1 entries are [i, j, [vector]]", e.line, entry.column);
        const auto i = parse_int(entry.items[0].text, e.line, entry.items[0].column);
        const auto j = parse_int(entry.items[1].text, e.line, entry.items[1].column);
        const auto v = vector_from(entry.items[2], c.scalars(), e.line);
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= A.dim() || static_cast<std::size_t>(j) >= A.dim() ||
            v.size() != A.dim())
            throw task_error("mu1 entry out of range", e.line, entry.column);
        const auto t = mu1.index({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
        for (std::size_t k = 0; k < A.dim(); ++k)
            mu1.at(t, k) = v[k];
    }
    const auto outcome = solve_deformation(A, mu1, N);
    const auto& maps = outcome.series.maps;
    out["order_reached"] = outcome.series.order;
    json ms = json::array();
    json residual_zero = json::array();
    for (std::size_t k = 0; k < maps.size(); ++k) {
        json entries = json::array();
        for (std::size_t t = 0; t < maps[k].tuples(); ++t) {
            std::vector<Cyclotomic> v(A.dim());
            bool zero = true;
            for (std::size_t m = 0; m < A.dim(); ++m) {
                v[m] = maps[k].at(t, m);
                zero = zero && v[m].is_zero();
            }
            if (!zero)
                entries.push_back({{"args", to_json(maps[k].args(t))}, {"value", to_json(v)}});
        }
        ms.push_back({{"order", k + 1}, {"entries", entries}});
        residual_zero.push_back(associativity_residual(A, maps, k + 1).is_zero());
    }
    out["maps"] = ms;
    out["residual_zero"] = residual_zero;
    out["ok"] = outcome.ok();
    if (outcome.obstruction) {
        out["obstruction"] = {{"order", outcome.obstruction->order},
                              {"class_coords", to_json(outcome.obstruction->class_coords)}};
        return 1;
    }
    out["obstruction"] = nullptr;
    return 0;
}

inline int run_poisson(const Context& c, json& out)
{
    const auto& ve = *c.option("vars");
    const auto names = parse_names(ve);
    ExprContext ctx = c.scalars();
    std::vector<Symbol> vars;
    for (const auto& n : names) {
        vars.push_back(symbol(n));
        ctx.params.emplace(n, vars.back());
    }
    const auto& be = *c.option("bracket");
    std::vector<std::vector<ParamPoly>> B;
    for (const auto& row : parse_list(be).items) {
        B.emplace_back();
        for (const auto& x : row.items) {
            if (!x.leaf)
                throw task_error("expected a bracket entry", be.line, x.column);
            B.back().push_back(parse_poly(x.text, ctx, be.line, x.column));
        }
        if (B.back().size() != vars.size())
            throw task_error("bracket must be square in the variables", be.line, row.column);
    }
    if (B.size() != vars.size())
        throw task_error("bracket must be square in the variables", be.line, be.column);
    const auto v = poisson_check(vars, B);
    out["jacobi"] = v.ok;
    if (!v.ok) {
        out["failing_triple"] = {names[v.triple[0]], names[v.triple[1]], names[v.triple[2]]};
        out["residual"] = v.residual.to_string();
        return 1;
    }
    return 0;
}

inline int run_flat(const Context& c, json& out)
{
    const auto P = c.presentation();
    const auto n = c.degree("degree", 3);
    DimOptions opt{RankMode::automatic(c.seed())};
    opt.slack = c.count("slack", 0);
    std::vector<FlatnessVerdict> vs;
    bool flat = true;
    for (std::size_t k = 0; k <= n; ++k) {
        vs.push_back(flat_at_degree(P, k, opt));
        flat = flat && vs.back().flat;
    }
    json rels = json::array();
    for (const auto& r : P.relations)
        rels.push_back(P.render(r));
    out["relations"] = rels;
    out["verdicts"] = verdicts_json(vs);
    out["flat"] = flat;
    return flat ? 0 : 1;
}

inline int run_torsion(const Context& c, json& out)
{
    const auto P = c.presentation();
    const auto n = c.degree("n_max", 3);
    const auto w = torsion_witness(P, n, c.seed());
    if (!w) {
        out["witness"] = nullptr;
        out["flat"] = true;
        return 0;
    }
    out["witness"] = {{"element", P.render(w->element)}, {"degree", w->degree}, {"found_at", w->found_at}};
    out["flat"] = false;
    return 1;
}

inline json sra_symbols_json(const SraParameters& p)
{
    json a = json::array({symbol_name(p.t)});
    for (auto s : p.c)
        a.push_back(symbol_name(s));
    return a;
}

inline int run_sra_classify(const Context& c, json& out)
{
    const auto act = c.action();
    const auto cls = classify_kappa(act);
    const auto refl = symplectic_reflection_classes(act.group, act.form);
    const auto classes = conjugacy_classes(act.group);
    json per = json::array();
    for (const auto& cs : cls.per_class) {
        std::size_t size = 0;
        for (const auto& k : classes)
            if (std::find(k.begin(), k.end(), cs.rep) != k.end())
                size = k.size();
        per.push_back({{"representative", cs.rep}, {"class_size", size}, {"solution_dim", cs.basis.size()}});
    }
    out["group_order"] = act.group.order();
    out["dimension"] = cls.dimension;
    out["identity_dim"] = cls.identity_dim;
    out["symplectic_reflection_classes"] = refl.size();
    out["per_class"] = per;
    return 0;
}

inline int run_sra_pbw(const Context& c, json& out)
{
    const auto act = c.action();
    const auto n = c.degree("degree", 3, 3);
    const auto params = sra_parameters(act);
    std::vector<ParamPoly> cs;
    for (auto s : params.c)
        cs.push_back(ParamPoly::variable(s));
    const auto base = sra_kappa(act, ParamPoly::variable(params.t), cs);
    out["parameters"] = sra_symbols_json(params);
    const auto* k = c.option("kappa");
    const std::string mode = k ? k->value : "classified";
    if (mode == "classified") {
        const auto vs = pbw_check(act, base, n);
        bool flat = true;
        for (const auto& v : vs)
            flat = flat && v.flat;
        out["kappa"] = mode;
        out["verdicts"] = verdicts_json(vs);
        out["flat"] = flat;
        return flat ? 0 : 1;
    }
    if (mode != "inadmissible")
        throw task_error("kappa is 'classified' or 'inadmissible'", k->line, k->column);
    const auto cls = classify_kappa(act);
    std::mt19937_64 rng(c.seed());
    const auto trials = c.count("trials", 1, 1);
    json rows = json::array();
    bool all_flat = true;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto kappa = base + random_inadmissible_perturbation(act, cls, rng);
        const auto v = pbw_check(act, kappa, n).back();
        rows.push_back({{"trial", i}, {"generic_dim", v.generic_dim}, {"special_dim", v.special_dim},
                        {"flat", v.flat}, {"admissible", is_admissible(cls, kappa)}});
        all_flat = all_flat && v.flat;
    }
    out["kappa"] = mode;
    out["degree"] = n;
    out["trials"] = rows;
    out["flat"] = all_flat;
    return all_flat ? 0 : 1;
}

inline json localized_json(const LocalizedPoly& f)
{
    return {{"numerator", f.num.to_string()}, {"delta_power", f.den_power}};
}

inline int run_dunkl(const Context& c, json& out)
{
    const Arrangement arr(c.group());
    const auto params = DunklParams::balanced(arr);
    const auto n = c.degree("degree", 3, 1);
    std::set<std::string> names;
    for (const auto& m : params.c)
        for (const auto& [g, v] : m)
            for (auto s : v.symbols())
                names.insert(symbol_name(s));
    out["group_order"] = arr.group().order();
    out["hyperplanes"] = arr.data().size();
    out["parameters"] = names;
    auto report = [&](const DunklCheck& r, const char* key) {
        json j = {{"ok", r.ok()}, {"evaluations", r.evaluations}, {"max_delta_power", r.max_den_power}};
        if (r.counterexample)
            j["counterexample"] = {{"a", r.counterexample->a},
                                   {"b", r.counterexample->b},
                                   {"monomial", to_json(r.counterexample->monomial)},
                                   {"residual", localized_json(r.counterexample->residual)}};
        out[key] = j;
        return r.ok();
    };
    bool ok = report(commutator_check(arr, params, n), "commutator");
    if (c.flag("equivariance", false))
        ok = report(equivariance_check(arr, params, n), "equivariance") && ok;
    out["commute"] = ok;
    return ok ? 0 : 1;
}

inline int run_hecke_classify(const Context& c, json& out)
{
    const auto [p, q, r] = c.triple();
    const auto t = classify_triangle(p, q, r);
    out["S"] = to_string(t.S);
    out["geometry"] = to_string(t.geometry);
    out["group_order"] = t.group_order ? json(*t.group_order) : json(nullptr);
    json tau = json::array();
    for (const auto& blk : t.tau) {
        json b = json::array();
        for (auto s : blk)
            b.push_back(symbol_name(s));
        tau.push_back(b);
    }
    out["tau"] = tau;
    // spherical triples carry the determinant obstruction; the others are
    // the flat side
    out["determinant_obstruction"] = t.geometry == Geometry::sphere;
    return 0;
}

inline int run_hecke_obstruction(const Context& c, json& out)
{
    const auto [p, q, r] = c.triple();
    const auto rep = det_obstruction(p, q, r);
    out["group_order"] = rep.group_order;
    out["root_factor"] = rep.root_factor.to_string();
    out["linear_form"] = rep.linear_form;
    std::string text;
    for (std::size_t b = 0; b < rep.linear_form.size(); ++b)
        for (std::size_t j = 0; j < rep.linear_form[b].size(); ++j) {
            if (!text.empty())
                text += " + ";
            text += std::to_string(rep.linear_form[b][j]) + "*tau" + std::to_string(b + 1) + "_" +
                    std::to_string(j + 1);
        }
    out["linear_form_text"] = text;
    out["nontrivial"] = rep.nontrivial;
    if (c.flag("oracle", false)) {
        const auto o = regular_rep_determinant(p, q, r);
        const bool agree =
            o.group_order == rep.group_order && o.linear_form == rep.linear_form && o.root_factor == rep.root_factor;
        out["oracle_agrees"] = agree;
        if (!agree)
            throw internal_error("determinant obstruction disagrees with the regular representation");
    }
    return 0;
}

inline int run_coxeter_even(const Context& c, json& out)
{
    const auto M = c.coxeter();
    const auto v = er_criterion(M);
    out["er_criterion"] = v.ok;
    if (v.failing_triple)
        out["failing_triple"] = {(*v.failing_triple)[0] + 1, (*v.failing_triple)[1] + 1, (*v.failing_triple)[2] + 1};
    const auto H = build_even_hecke(M);
    const auto L = c.degree("wordlen", 4, 1);
    DimOptions generic{RankMode::specialize(c.seed(), 1)};
    generic.slack = c.count("slack", 0);
    DimOptions roots = generic;
    roots.mode = RankMode();
    roots.at = H.roots_of_unity();
    out["generators"] = H.pairs.size();
    out["relations"] = H.presentation.relations.size();
    out["ranks_generic"] = to_json(bounded_span_rank(H, L, generic));
    out["ranks_roots_of_unity"] = to_json(bounded_span_rank(H, L, roots));
    return v.ok ? 0 : 1;
}

inline int run_group_order(const Context& c, json& out)
{
    if (c.group_kind() == "triangle") {
        const auto [p, q, r] = c.triple();
        const auto order = stabilized_group_order(triangle_presentation(p, q, r), 64);
        out["order"] = order ? json(*order) : json(nullptr);
        const Rational S = Rational(1, p) + Rational(1, q) + Rational(1, r);
        if (S > 1) {
            const Rational closed = Rational(2) / (S - 1);
            out["closed_form"] = to_string(closed);
            out["matches_closed_form"] = order && Rational(static_cast<long>(*order)) == closed;
        }
        return 0;
    }
    const auto G = c.group();
    out["order"] = G.order();
    out["conjugacy_classes"] = conjugacy_classes(G).size();
    return 0;
}

inline int run_orbifold_dims(const Context& c, json& out)
{
    const auto G = c.group();
    const auto dims = orbifold_cohomology_dims(G);
    out["dims"] = to_json(dims);
    if (G.dim() % 2 == 0) {
        const auto act = c.action();
        const auto n = symplectic_reflection_classes(act.group, act.form).size();
        out["symplectic_reflection_classes"] = n;
        out["matches_reflection_count"] = dims.size() > 2 && dims[2] == n;
    }
    return 0;
}

} // namespace detail

/// Dispatches the task and collects its results; module errors propagate.
inline Report run_task(const TaskFile& t, const RunOptions& opt = {})
{
    const auto start = std::chrono::steady_clock::now();
    detail::Context c(t, opt);
    Report r;
    r.command = t.command();
    r.seed = c.seed();
    for (const auto& s : t.sections)
        for (const auto& e : s.entries)
            r.inputs[s.name][e.key] = e.value;
    using Fn = int (*)(const detail::Context&, nlohmann::json&);
    static const std::map<std::string, Fn> table{
        {"hochschild", detail::run_hochschild},
        {"deform", detail::run_deform},
        {"poisson", detail::run_poisson},
        {"flat", detail::run_flat},
        {"torsion", detail::run_torsion},
        {"sra-classify", detail::run_sra_classify},
        {"sra-pbw", detail::run_sra_pbw},
        {"dunkl-commute", detail::run_dunkl},
        {"hecke-classify", detail::run_hecke_classify},
        {"hecke-obstruction", detail::run_hecke_obstruction},
        {"coxeter-even", detail::run_coxeter_even},
        {"group-order", detail::run_group_order},
        {"orbifold-dims", detail::run_orbifold_dims},
    };
    r.exit_code = table.at(r.command)(c, r.results);
    r.elapsed_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
    return r;
}

} // namespace deformlab::cli
