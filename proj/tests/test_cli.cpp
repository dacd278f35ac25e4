#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deformlab/cli/run.hpp"

using namespace deformlab;
using namespace deformlab::cli;

namespace {

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::filesystem::path> corpus()
{
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(DEFORMLAB_TASK_DIR))
        if (e.path().extension() == ".task")
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

Report run_text(const std::string& text, RunOptions opt = {}) { return run_task(parse_task(text), opt); }

bool has_float(const nlohmann::json& j)
{
    if (j.is_number_float())
        return true;
    if (j.is_structured())
        for (const auto& x : j)
            if (has_float(x))
                return true;
    return false;
}

std::size_t error_line(const std::string& text)
{
    try {
        parse_task(text);
    } catch (const task_error& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST(ParseTask, ValidFile)
{
    const auto t = parse_task("# comment\n[group]\nkind = cyclic\nn = 3\n\n[task]\ncommand = sra-classify\n");
    EXPECT_EQ(t.command(), "sra-classify");
    ASSERT_EQ(t.sections.size(), 2u);
    EXPECT_EQ(t.section("group")->find("n")->value, "3");
    EXPECT_EQ(t.section("group")->find("n")->line, 4u);
}

TEST(ParseTask, DuplicateTask)
{
    try {
        parse_task("[task]\ncommand = poisson\n[task]\ncommand = flat\n");
        FAIL();
    } catch (const task_error& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate task"), std::string::npos);
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ParseTask, ZeroDenominatorHasLocation)
{
    try {
        parse_task("[group]\nkind = matrices\ngenerators = [[[1/0, 0], [0, 1]]]\n[task]\ncommand = group-order\n");
        FAIL();
    } catch (const task_error& e) {
        EXPECT_NE(std::string(e.what()).find("zero denominator"), std::string::npos);
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 19u);
    }
}

TEST(ParseTask, Errors)
{
    EXPECT_EQ(error_line("[task]\ncommand = frobnicate\n"), 2u);
    EXPECT_THROW(parse_task("[group]\nkind = cyclic\nn = 2\n"), task_error);             // no task
    EXPECT_THROW(parse_task("[task]\ncommand = sra-classify\n"), task_error);            // no group
    EXPECT_EQ(error_line("[task]\ncommand = hochschild\nalgebra = truncated 2\nn_max = x\n"), 4u);
    EXPECT_EQ(error_line("[task]\ncommand = hochschild\nalgebra = truncated 2\nn_max = 2\ncolour = 3\n"), 5u);
    EXPECT_EQ(error_line("[task]\ncommand = flat\nletters = x y\nrelations = xw\ndegree = 2\n"), 4u);
    EXPECT_EQ(error_line("[task]\ncommand = flat\nletters = x y\nrelations = xy - z\ndegree = 2\n"), 4u);
    EXPECT_EQ(error_line("[space]\ndim = 2\nthis is not a pair\n[task]\ncommand = poisson\n"), 3u);
    EXPECT_EQ(error_line("[group]\nkind = blob\n[task]\ncommand = group-order\n"), 2u);
    EXPECT_EQ(error_line("[group]\nkind = matrices\ngenerators = [[[1, 0], [0]]]\n[task]\ncommand = group-order\n"),
              3u);
}

TEST(ParseTask, MissingOptionReportsCommand)
{
    try {
        parse_task("[task]\ncommand = hochschild\nalgebra = truncated 2\n");
        FAIL();
    } catch (const task_error& e) {
        EXPECT_NE(std::string(e.what()).find("n_max"), std::string::npos);
    }
}

TEST(Expressions, RelationsAndScalars)
{
    ExprContext ctx;
    ctx.letters = {"x", "y"};
    ctx.params.emplace("hbar", symbol("hbar"));
    const auto r = parse_expression("yx - xy - hbar", ctx, 1, 1);
    EXPECT_EQ(r, SmashElement::monomial({1, 0}) - SmashElement::monomial({0, 1}) -
                     SmashElement(ParamPoly::variable("hbar")));
    EXPECT_EQ(parse_expression("(x + y)^2", ctx, 1, 1),
              SmashElement::monomial({0, 0}) + SmashElement::monomial({0, 1}) + SmashElement::monomial({1, 0}) +
                  SmashElement::monomial({1, 1}));
    EXPECT_EQ(parse_expression("2 x*y/4", ctx, 1, 1), SmashElement::monomial({0, 1}, ParamPoly(Rational(1, 2))));

    ExprContext z;
    z.zeta_order = 4;
    EXPECT_TRUE(parse_scalar("(1 - z)/2", z, 1, 1) == (Cyclotomic(1) - Cyclotomic::zeta(4)) / Cyclotomic(2));
    EXPECT_TRUE(parse_scalar("z^2", z, 1, 1) == Cyclotomic(-1));
    EXPECT_TRUE(parse_scalar("-3/6", z, 1, 1) == Cyclotomic(Rational(-1, 2)));
    EXPECT_THROW(parse_scalar("z", ExprContext{}, 1, 1), task_error);
    EXPECT_THROW(parse_scalar("1/(z - z)", z, 1, 1), task_error);
}

TEST(RunTask, HochschildDualNumbers)
{
    const auto r = run_text("[task]\ncommand = hochschild\nalgebra = truncated 2\nn_max = 3\n");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.results["dims"], nlohmann::json({2, 1, 1, 1}));
}

TEST(RunTask, WeylIsFlat)
{
    const auto r = run_text(
        "[task]\ncommand = flat\nletters = x y\nrelations = yx - xy - hbar\nparameters = hbar\ndegree = 3\n");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.results["flat"], true);
    EXPECT_EQ(r.results["verdicts"][3]["generic_dim"], 10);
}

TEST(RunTask, TetrahedralObstruction)
{
    const auto r = run_text("[group]\nkind = triangle\ntriple = 2, 3, 3\n[task]\ncommand = hecke-obstruction\n");
    EXPECT_EQ(r.results["linear_form"], nlohmann::json({{6, 6}, {4, 4, 4}, {4, 4, 4}}));
    EXPECT_EQ(r.results["root_factor"], "1");
    // parameters appear in the order tau1_1 < tau1_2 < tau2_1 < ...
    const std::string text = r.results["linear_form_text"];
    EXPECT_EQ(text.rfind("6*tau1_1 + 6*tau1_2 + 4*tau2_1", 0), 0u);
    EXPECT_LT(text.find("tau2_3"), text.find("tau3_1"));
}

TEST(RunTask, DegreeBudget)
{
    const std::string text = "[task]\ncommand = hochschild\nalgebra = truncated 2\nn_max = 3\n";
    EXPECT_THROW(run_text(text, RunOptions{std::nullopt, 2}), task_error);
    EXPECT_NO_THROW(run_text(text, RunOptions{std::nullopt, 3}));
}

TEST(RunTask, SeedOverride)
{
    const std::string text = "[scalars]\nseed = 5\n[task]\ncommand = hochschild\nalgebra = cyclic 2\nn_max = 1\n";
    EXPECT_EQ(run_text(text).seed, 5u);
    EXPECT_EQ(run_text(text, RunOptions{9, std::nullopt}).seed, 9u);
}

TEST(EmitReport, CyclotomicRendering)
{
    Report r;
    r.command = "x";
    r.results["value"] = Cyclotomic::zeta(4).to_string();
    const auto s = emit_report(r, Format::structured);
    EXPECT_NE(s.find("\"zeta_4\""), std::string::npos);
    EXPECT_EQ(s, emit_report(r, Format::structured));
}

TEST(EmitReport, TimingOnlyInText)
{
    auto r = run_text("[task]\ncommand = hochschild\nalgebra = cyclic 2\nn_max = 2\n");
    r.elapsed_ms = 1234;
    EXPECT_NE(emit_report(r, Format::text).find("time: 1234 ms"), std::string::npos);
    EXPECT_EQ(emit_report(r, Format::structured).find("1234"), std::string::npos);
}

TEST(Corpus, RoundTrips)
{
    const auto files = corpus();
    ASSERT_FALSE(files.empty());
    for (const auto& f : files) {
        const auto t = parse_task(slurp(f));
        const auto again = parse_task(t.to_text());
        EXPECT_TRUE(t == again) << f;
        EXPECT_EQ(again.to_text(), t.to_text()) << f;
    }
}

TEST(Corpus, DeterministicStructuredReports)
{
    for (const auto& f : corpus()) {
        const auto t = parse_task(slurp(f));
        const auto a = run_task(t);
        const auto b = run_task(t);
        EXPECT_EQ(emit_report(a, Format::structured), emit_report(b, Format::structured)) << f;
        EXPECT_FALSE(has_float(nlohmann::json::parse(emit_report(a, Format::structured)))) << f;
    }
}

TEST(Corpus, ExitCodes)
{
    const std::set<std::string> negative{"coxeter_even_h3", "deform_obstructed", "flat_nonflat",
                                         "poisson_broken",  "sra_pbw_inadmissible", "torsion_nonflat"};
    for (const auto& f : corpus()) {
        const auto r = run_task(parse_task(slurp(f)));
        EXPECT_EQ(r.exit_code, negative.count(f.stem().string()) ? 1 : 0) << f;
    }
}
