#include "weierkern/correlator.hpp"
#include "weierkern/diffbasis.hpp"
#include "weierkern/errors.hpp"
#include "weierkern/jsonio.hpp"
#include "weierkern/selfcheck.hpp"

#include "CLI11.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace wk = weierkern;
using wk::Complex;
using wk::json;
using wk::Triple;

namespace {

Complex parse_complex_arg(const std::string& text) {
    long commas = std::count(text.begin(), text.end(), ',');
    if (commas == 0) return wk::parse_scalar(text);
    if (commas == 1) {
        size_t pos = text.find(',');
        Complex re = wk::parse_scalar(text.substr(0, pos));
        Complex im = wk::parse_scalar(text.substr(pos + 1));
        if (re.imag() != 0.0 || im.imag() != 0.0)
            wk::throw_usage("re,im components must be real: " + text);
        return {re.real(), im.real()};
    }
    wk::throw_usage("expected a complex value re[,im]: " + text);
}

wk::Chart parse_chart(const std::string& name) {
    if (name == "affine") return wk::Chart::Affine;
    if (name == "inf") return wk::Chart::Infinity;
    wk::throw_usage("chart must be affine or inf");
}

wk::SpaceCurve& require_space(wk::CurveFile& file) {
    if (!file.space) wk::throw_usage("this command needs a three-variable curve file");
    return *file.space;
}

wk::SingularitySet branch_exclusions(const wk::SpaceCurve& curve) {
    wk::SingularitySet out;
    for (const auto& b : curve.branch_points()) out.affine.push_back(b.x1);
    return out;
}

void emit(const std::string& output, const json& j) {
    std::string text = wk::dump_json(j);
    if (output.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(output);
    if (!out) wk::throw_usage("cannot write " + output);
    out << text << "\n";
}

// gram of the weight-1 basis with branch points excised
std::pair<Eigen::Matrix4cd, double> weight1_gram(const wk::SpaceCurve& curve,
                                                 const wk::GridConfig& config) {
    std::vector<wk::BasisElement> basis = wk::holomorphic_basis(curve, 1);
    std::vector<wk::FormFn> forms;
    for (int i = 0; i < 4; ++i)
        forms.push_back([&curve, &basis, i](const wk::CurvePoint& p) {
            return wk::basis_eval(curve, basis[size_t(i)], p.x);
        });
    std::vector<std::pair<int, int>> pairs;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) pairs.emplace_back(j, i);
    wk::SingularitySet excl = branch_exclusions(curve);
    auto ints = wk::surface_integral_multi(curve, forms, forms, pairs, excl, config);
    Eigen::Matrix4cd gram;
    double err = 0.0;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            gram(i, j) = ints[size_t(4 * j + i)].value;
            err = std::max(err, ints[size_t(4 * j + i)].est_error);
        }
    return {gram, err};
}

struct ContourArgs {
    std::string center, anchor, chart = "affine";
    double radius = 1e-2;
    int nodes = 64;
};

wk::ContourSpec to_spec(const ContourArgs& args) {
    wk::ContourSpec spec;
    spec.center = parse_complex_arg(args.center);
    spec.radius = args.radius;
    spec.nodes = args.nodes;
    spec.chart = parse_chart(args.chart);
    spec.anchor = wk::parse_triple(args.anchor);
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernels, differentials and determinants on intersection curves"};
    app.require_subcommand(1);

    std::string curve_path, output;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("curve", curve_path, "curve file (JSON)")->required();
        cmd->add_option("--output", output, "write the JSON result to a file");
    };

    // curve check / curve fiber
    auto* curve_cmd = app.add_subcommand("curve", "curve geometry");
    curve_cmd->require_subcommand(1);
    auto* check_cmd = curve_cmd->add_subcommand("check", "smoothness, genus, branch data");
    add_common(check_cmd);
    check_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        if (file.plane) {
            json j{{"type", "plane"}, {"degree", file.plane->f().total_degree()}};
            emit(output, j);
            return;
        }
        wk::SpaceCurve& c = require_space(file);
        wk::SmoothnessReport rep = c.smoothness_check();
        json branches = json::array();
        int btotal = 0;
        for (const auto& b : c.branch_points()) {
            branches.push_back(
                {{"x1", wk::complex_json(b.x1)}, {"multiplicity", b.multiplicity}});
            btotal += b.multiplicity;
        }
        json inf = json::array();
        int itotal = 0;
        for (const auto& p : c.points_at_infinity()) {
            json xi = json::array();
            for (const auto& z : p.xi) xi.push_back(wk::complex_json(z));
            inf.push_back({{"xi", xi}, {"multiplicity", p.multiplicity}});
            itotal += p.multiplicity;
        }
        json j{{"degrees", {c.deg_f(), c.deg_g()}},
               {"genus", c.genus()},
               {"smooth", rep.passed},
               {"smoothness_samples", rep.samples},
               {"worst_jacobian_ratio", rep.worst_ratio},
               {"branch_points", branches},
               {"branch_total", btotal},
               {"points_at_infinity", inf},
               {"infinity_total", itotal}};
        emit(output, j);
    });

    std::string x1_arg, chart_arg = "affine";
    auto* fiber_cmd = curve_cmd->add_subcommand("fiber", "points above a base value");
    add_common(fiber_cmd);
    fiber_cmd->add_option("--x1", x1_arg, "base coordinate re[,im]")->required();
    fiber_cmd->add_option("--chart", chart_arg, "affine or inf")
        ->check(CLI::IsMember({"affine", "inf"}));
    fiber_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        Complex a = parse_complex_arg(x1_arg);
        if (file.plane) {
            json roots = json::array();
            for (Complex r : file.plane->fiber(a)) roots.push_back(wk::complex_json(r));
            emit(output, json{{"x2", roots}});
            return;
        }
        wk::SpaceCurve& c = require_space(file);
        wk::FiberResult fib = c.fiber(a, parse_chart(chart_arg));
        json pts = json::array();
        for (const auto& p : fib.points) pts.push_back(wk::triple_json(p.x));
        json j{{"points", pts}, {"count", int(fib.points.size())},
               {"degenerate", fib.degenerate}};
        emit(output, j);
    });

    // kernel eval / residue / laurent
    auto* kernel_cmd = app.add_subcommand("kernel", "kernel evaluation and local analysis");
    kernel_cmd->require_subcommand(1);
    std::string variant_arg, x_arg, y_arg;
    auto add_variant = [&](CLI::App* cmd) {
        cmd->add_option("--variant", variant_arg, "sym, compact, cover, or g4")
            ->required()
            ->check(CLI::IsMember({"sym", "compact", "cover", "g4"}));
    };

    auto* eval_cmd = kernel_cmd->add_subcommand("eval", "kernel coefficient at a pair");
    add_common(eval_cmd);
    add_variant(eval_cmd);
    eval_cmd->add_option("--x", x_arg, "first point triple")->required();
    eval_cmd->add_option("--y", y_arg, "second point triple")->required();
    eval_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        wk::SpaceCurve& c = require_space(file);
        wk::DifferentialValue v = wk::kernel_eval(c, wk::parse_variant(variant_arg),
                                                  wk::parse_triple(x_arg),
                                                  wk::parse_triple(y_arg));
        emit(output, json{{"coeff", wk::complex_json(v.coeff)}, {"weight", v.weight}});
    });

    ContourArgs cargs;
    int laurent_k = -1;
    auto add_contour = [&](CLI::App* cmd) {
        cmd->add_option("--center", cargs.center, "contour center re[,im]")->required();
        cmd->add_option("--radius", cargs.radius, "contour radius");
        cmd->add_option("--nodes", cargs.nodes, "trapezoid nodes");
        cmd->add_option("--chart", cargs.chart, "affine or inf")
            ->check(CLI::IsMember({"affine", "inf"}));
        cmd->add_option("--anchor", cargs.anchor, "sheet-selecting curve point")->required();
        cmd->add_option("--y", y_arg, "kernel source point triple")->required();
    };

    auto* residue_cmd = kernel_cmd->add_subcommand("residue", "contour residue of K(., y)");
    add_common(residue_cmd);
    add_variant(residue_cmd);
    add_contour(residue_cmd);
    residue_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        wk::SpaceCurve& c = require_space(file);
        wk::KernelVariant variant = wk::parse_variant(variant_arg);
        Triple y = wk::parse_triple(y_arg);
        wk::FormFn form = [&](const wk::CurvePoint& p) {
            return wk::kernel_eval(c, variant, p.x, y);
        };
        wk::ContourSpec spec = to_spec(cargs);
        Complex res = wk::contour_residue(c, form, spec);
        wk::ContourSpec half = spec;
        half.nodes = std::max(8, spec.nodes / 2);
        Complex coarse = wk::contour_residue(c, form, half);
        json j{{"residue", wk::complex_json(res)},
               {"est_error", std::abs(res - coarse)},
               {"nodes", spec.nodes}};
        emit(output, j);
    });

    auto* laurent_cmd = kernel_cmd->add_subcommand("laurent", "Laurent coefficient of K(., y)");
    add_common(laurent_cmd);
    add_variant(laurent_cmd);
    add_contour(laurent_cmd);
    laurent_cmd->add_option("--k", laurent_k, "Laurent index")->required();
    laurent_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        wk::SpaceCurve& c = require_space(file);
        wk::KernelVariant variant = wk::parse_variant(variant_arg);
        Triple y = wk::parse_triple(y_arg);
        wk::FormFn form = [&](const wk::CurvePoint& p) {
            return wk::kernel_eval(c, variant, p.x, y);
        };
        Complex ck = wk::laurent_coeff(c, form, to_spec(cargs), laurent_k);
        emit(output, json{{"k", laurent_k}, {"coeff", wk::complex_json(ck)}});
    });

    // basis
    int weight_arg = 1;
    auto* basis_cmd = app.add_subcommand("basis", "holomorphic differential basis");
    add_common(basis_cmd);
    basis_cmd->add_option("--weight", weight_arg, "1 or 2")->required();
    basis_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        wk::SpaceCurve& c = require_space(file);
        std::vector<wk::BasisElement> basis = wk::holomorphic_basis(c, weight_arg);
        json elems = json::array();
        for (const auto& e : basis)
            elems.push_back({{"numerator", e.numerator.print({"x1", "x2", "x3"})},
                             {"weight", e.weight}});
        emit(output, json{{"weight", weight_arg}, {"count", int(basis.size())},
                          {"elements", elems}});
    });

    // periods
    double tol_arg = 1e-4;
    auto* periods_cmd = app.add_subcommand("periods", "Gram matrix of the weight-1 basis");
    add_common(periods_cmd);
    periods_cmd->add_option("--tol", tol_arg, "target relative error");
    periods_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        wk::SpaceCurve& c = require_space(file);
        wk::GridConfig config;
        config.target_rel_error = tol_arg;
        auto [gram, err] = weight1_gram(c, config);
        double defect = (gram - gram.adjoint()).cwiseAbs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(
            0.5 * (gram + gram.adjoint()));
        json rows = json::array();
        for (int i = 0; i < 4; ++i) {
            json row = json::array();
            for (int j = 0; j < 4; ++j) row.push_back(wk::complex_json(gram(i, j)));
            rows.push_back(row);
        }
        json eig = json::array();
        for (int i = 0; i < 4; ++i) eig.push_back(es.eigenvalues()(i));
        emit(output, json{{"gram", rows},
                          {"eigenvalues", eig},
                          {"hermitian_defect", defect},
                          {"est_error", err}});
    });

    // correlator
    int lambda_arg = 2;
    std::string b_path, c_path;
    auto* corr_cmd = app.add_subcommand("correlator", "determinant correlator");
    add_common(corr_cmd);
    corr_cmd->add_option("--lambda", lambda_arg, "weight 1 or 2")->required();
    corr_cmd->add_option("--b", b_path, "b insertion points (JSON)")->required();
    corr_cmd->add_option("--c", c_path, "c insertion points (JSON)")->required();
    corr_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        wk::SpaceCurve& c = require_space(file);
        std::vector<Triple> bp = wk::load_points_file(b_path);
        std::vector<Triple> cp = wk::load_points_file(c_path);
        wk::CorrelatorResult res = wk::bc_correlator(c, lambda_arg, bp, cp);
        json j{{"det", wk::complex_json(res.det)},
               {"condition", res.condition},
               {"size", res.size}};
        if (wk::genus4_view(c)) {
            const std::array<Complex, 4> shift{Complex(0.31, 0.17), Complex(-0.42, 0.05),
                                               Complex(0.13, -0.29), Complex(0.27, 0.11)};
            j["spurious_delta"] = wk::spurious_invariance_delta(c, lambda_arg, bp, cp, shift);
        }
        emit(output, j);
    });

    // green
    std::string p_arg, q_arg, qp_arg;
    auto* green_cmd = app.add_subcommand("green", "scalar Green function determinant");
    add_common(green_cmd);
    green_cmd->add_option("--p", p_arg, "field point triple")->required();
    green_cmd->add_option("--q", q_arg, "source point triple")->required();
    green_cmd->add_option("--qp", qp_arg, "second source point triple")->required();
    green_cmd->add_option("--tol", tol_arg, "target relative error");
    green_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        wk::SpaceCurve& c = require_space(file);
        wk::GridConfig config;
        config.target_rel_error = tol_arg;
        wk::GreenResult res =
            wk::green_function(c, wk::parse_triple(p_arg), wk::parse_triple(q_arg),
                               wk::parse_triple(qp_arg), config);
        json periods = json::array();
        for (double v : res.period_residuals) periods.push_back(v);
        emit(output, json{{"raw_det", wk::complex_json(res.raw_det)},
                          {"gram_det", wk::complex_json(res.gram_det)},
                          {"normalized", wk::complex_json(res.normalized)},
                          {"residue_ratio", wk::complex_json(res.residue_ratio)},
                          {"period_residuals", periods},
                          {"condition", res.condition}});
    });

    // selftest
    unsigned seed_arg = 0;
    auto* self_cmd = app.add_subcommand("selftest", "seeded invariant suite");
    add_common(self_cmd);
    self_cmd->add_option("--seed", seed_arg, "seed for the randomized checks");
    self_cmd->callback([&]() {
        wk::CurveFile file = wk::load_curve_file(curve_path);
        wk::SpaceCurve& c = require_space(file);
        std::vector<wk::CheckResult> checks = wk::selftest(c, seed_arg);
        json rows = json::array();
        bool all = true;
        for (const auto& r : checks) {
            rows.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
            all = all && r.passed;
        }
        emit(output, json{{"checks", rows}, {"all_passed", all}});
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json err{{"error", json{{"kind", "usage"}, {"detail", e.what()}}}};
        std::cout << wk::dump_json(err) << "\n";
        return 2;
    } catch (const wk::Error& e) {
        json err{{"error", json{{"kind", e.kind_name()}, {"detail", e.what()}}}};
        std::cout << wk::dump_json(err) << "\n";
        switch (e.kind()) {
            case wk::ErrorKind::usage: return 2;
            case wk::ErrorKind::math_domain: return 3;
            case wk::ErrorKind::convergence: return 4;
        }
        return 4;
    } catch (const std::exception& e) {
        json err{{"error", json{{"kind", "convergence"}, {"detail", e.what()}}}};
        std::cout << wk::dump_json(err) << "\n";
        return 4;
    }
    return 0;
}
