#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "histopush/bounds.hpp"
#include "histopush/errors.hpp"
#include "histopush/io.hpp"
#include "histopush/pieces.hpp"
#include "histopush/pushforward.hpp"
#include "histopush/transport.hpp"

namespace {

using namespace histopush;
using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json report_json(const BuildReport& r) {
    return json{{"n", r.n},         {"epsilon", r.epsilon}, {"s", r.s},
                {"size", r.size},   {"depth", r.depth},     {"W", r.width},
                {"guarantee", r.guarantee}, {"variant", r.variant}};
}

int cmd_gen(int n, std::uint64_t seed, double spread, const std::string& out) {
    write_text_file(out, serialize_histogram2d(random_histogram(n, seed, spread)) + "\n");
    return 0;
}

int cmd_build(const std::string& hist_path, double epsilon, const std::string& variant,
              std::optional<int> width, const std::string& out_net,
              const std::string& out_report, const std::string& dump_splines) {
    const Histogram2D p = deserialize_histogram2d(read_text_file(hist_path));
    BuildResult built = variant == "baseline" ? build_phi_baseline(p, epsilon)
                                              : build_phi(p, epsilon, width);
    write_text_file(out_net, serialize_net(built.net) + "\n");
    write_text_file(out_report, report_json(built.report).dump() + "\n");
    if (!dump_splines.empty()) {
        std::filesystem::create_directories(dump_splines);
        write_text_file(dump_splines + "/marginal.json",
                        serialize_pwl(inverse_cdf(marginal_first(p))) + "\n");
        for (int i = 0; i < p.n; ++i) {
            write_text_file(dump_splines + "/conditional_" + std::to_string(i) + ".json",
                            serialize_pwl(inverse_cdf(conditional_second(p, i))) + "\n");
        }
    }
    return 0;
}

int cmd_eval(const std::string& net_path, std::optional<double> x, int grid, double a, double b) {
    const ReluNet net = deserialize_net(read_text_file(net_path));
    auto print_row = [&](double v) {
        const auto y = eval_net(net, std::vector<double>{v});
        std::string line;
        for (std::size_t k = 0; k < y.size(); ++k) {
            if (k) line += ",";
            line += fmt17(y[k]);
        }
        std::printf("%s\n", line.c_str());
    };
    if (x) {
        print_row(*x);
    } else {
        for (int i = 0; i < grid; ++i) {
            print_row(grid == 1 ? a : a + (b - a) * i / (grid - 1));
        }
    }
    return 0;
}

int cmd_sample(const std::string& hist_path, int count, std::uint64_t seed) {
    const Histogram2D p = deserialize_histogram2d(read_text_file(hist_path));
    for (const auto& pt : sample(p, count, seed)) {
        std::printf("%s,%s\n", fmt17(pt[0]).c_str(), fmt17(pt[1]).c_str());
    }
    return 0;
}

int cmd_pieces(const std::string& net_path, double a, double b) {
    const ReluNet net = deserialize_net(read_text_file(net_path));
    const char* exact_env = std::getenv("HISTOPUSH_EXACT");
    const bool exact = exact_env && std::string(exact_env) == "1";
    const PieceDecomposition dec = extract_pieces(net, a, b, exact);
    json out;
    out["breakpoints"] = dec.breakpoints;
    json coeffs = json::array();
    for (const auto& per_out : dec.coeffs) {
        json rows = json::array();
        for (const auto& [slope, inter] : per_out) rows.push_back(json::array({slope, inter}));
        coeffs.push_back(std::move(rows));
    }
    out["pieces"] = std::move(coeffs);
    out["zeta"] = dec.piece_count();
    if (dec.out_dim() == 2) out["zeta_lines"] = zeta_lines(dec);
    out["zeta_cap"] = zeta_cap(net_size(net), net_depth(net));
    out["log_zeta_cap"] = log_zeta_cap(net_size(net), net_depth(net));
    out["exact_mode"] = exact;
    std::printf("%s\n", out.dump().c_str());
    return 0;
}

int cmd_distance(const std::string& hist_path, const std::string& net_path, int r, int m,
                 const std::string& report_path) {
    const Histogram2D p = deserialize_histogram2d(read_text_file(hist_path));
    const ReluNet net = deserialize_net(read_text_file(net_path));
    const WEstimate est = estimate_w(p, net, r, m);
    json out{{"estimate", est.estimate}, {"slack", est.slack}, {"lower", est.lower()},
             {"upper", est.upper()},     {"r", est.r},         {"m", est.m},
             {"method", est.method}};
    if (!report_path.empty()) {
        json rep;
        try {
            rep = json::parse(read_text_file(report_path));
        } catch (const json::exception& e) {
            throw ParseError(std::string("report: ") + e.what());
        }
        const double guarantee = rep.at("guarantee").get<double>();
        const int net_n = rep.at("n").get<int>();
        if (net_n != p.n) {
            std::fprintf(stderr, "warning: histogram n=%d but net was built for n=%d\n", p.n,
                         net_n);
        }
        out["guarantee"] = guarantee;
        out["pass"] = est.lower() <= guarantee;
    }
    std::printf("%s\n", out.dump().c_str());
    return 0;
}

int cmd_bounds(int n, double epsilon, int l_depth, int d) {
    const BoundsReport rep = make_bounds_report(n, epsilon, l_depth, d);
    const json out{{"n", rep.n},
                   {"epsilon", rep.epsilon},
                   {"L", rep.l_depth},
                   {"d", rep.d},
                   {"upper_size", rep.upper_size},
                   {"upper_depth", rep.upper_depth},
                   {"lower_size", rep.lower_size},
                   {"zeta_cap", rep.zeta_cap_value},
                   {"log_zeta_cap", rep.log_zeta_cap_value},
                   {"w_floor", rep.w_floor_value},
                   {"c_d", rep.c_d}};
    std::printf("%s\n", out.dump().c_str());
    return 0;
}

int cmd_table(const std::string& cases_path, const std::string& out_path) {
    std::vector<std::pair<int, double>> cases;
    const std::string text = read_text_file(cases_path);
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("table: expected 'n,epsilon' rows");
        try {
            cases.emplace_back(std::stoi(line.substr(0, comma)),
                               std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ParseError("table: bad row '" + line + "'");
        }
    }
    if (cases.empty()) throw ParseError("table: no cases");
    std::string csv = "n,epsilon,deep_N,deep_L,base_N,base_L,lb_at_deep_L,lb_at_base_L,guarantee\n";
    for (const auto& row : regime_table(cases)) {
        csv += std::to_string(row.n) + "," + fmt17(row.epsilon) + "," +
               std::to_string(row.deep_size) + "," + std::to_string(row.deep_depth) + "," +
               std::to_string(row.base_size) + "," + std::to_string(row.base_depth) + "," +
               fmt17(row.lb_at_deep_depth) + "," + fmt17(row.lb_at_base_depth) + "," +
               fmt17(row.guarantee) + "\n";
    }
    if (out_path.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_text_file(out_path, csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"histopush: explicit ReLU generators for tiled histogram targets"};
    app.require_subcommand(1);

    int n = 4, count = 100, grid = 1, r = 4, m = 400, l_depth = 2, d = 2;
    std::uint64_t seed = 0;
    double spread = 0.5, epsilon = 0.1, a = 0.0, b = 1.0;
    std::optional<double> x;
    std::optional<int> width;
    std::string hist_path, net_path, out_path, out_net, out_report, report_path;
    std::string variant = "deep", cases_path, dump_splines;
    int only = 0;

    auto* gen = app.add_subcommand("gen", "write a random histogram file");
    gen->add_option("--n", n)->required();
    gen->add_option("--seed", seed);
    gen->add_option("--spread", spread);
    gen->add_option("--out", out_path)->required();

    auto* build = app.add_subcommand("build", "compile a histogram into a generator net");
    build->add_option("--hist", hist_path)->required();
    build->add_option("--epsilon", epsilon)->required();
    build->add_option("--variant", variant)->check(CLI::IsMember({"deep", "baseline"}));
    int width_flag = 0;
    build->add_option("--W", width_flag);
    build->add_option("--out-net", out_net)->required();
    build->add_option("--out-report", out_report)->required();
    build->add_option("--dump-splines", dump_splines);

    auto* eval = app.add_subcommand("eval", "evaluate a net");
    eval->add_option("--net", net_path)->required();
    double xval = 0.0;
    auto* xopt = eval->add_option("--x", xval);
    eval->add_option("--grid", grid);
    eval->add_option("--a", a);
    eval->add_option("--b", b);

    auto* smp = app.add_subcommand("sample", "draw points from a histogram file");
    smp->add_option("--hist", hist_path)->required();
    smp->add_option("--count", count);
    smp->add_option("--seed", seed);

    auto* pieces = app.add_subcommand("pieces", "affine-piece decomposition of a net");
    pieces->add_option("--net", net_path)->required();
    pieces->add_option("--a", a);
    pieces->add_option("--b", b);

    auto* dist = app.add_subcommand("distance", "bracketed distance between histogram and net");
    dist->add_option("--hist", hist_path)->required();
    dist->add_option("--net", net_path)->required();
    dist->add_option("--r", r);
    dist->add_option("--m", m);
    dist->add_option("--report", report_path);

    auto* bnd = app.add_subcommand("bounds", "evaluate the size and distance bounds");
    bnd->add_option("--n", n)->required();
    bnd->add_option("--epsilon", epsilon)->required();
    bnd->add_option("--L", l_depth)->required();
    bnd->add_option("--d", d);

    auto* tbl = app.add_subcommand("table", "regime table over (n, epsilon) cases");
    tbl->add_option("--cases", cases_path)->required();
    tbl->add_option("--out", out_path);

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--only", only);

    try {
        app.parse(argc, argv);
        if (*xopt) x = xval;
        if (width_flag > 0) width = width_flag;
        if (gen->parsed()) return cmd_gen(n, seed, spread, out_path);
        if (build->parsed())
            return cmd_build(hist_path, epsilon, variant, width, out_net, out_report, dump_splines);
        if (eval->parsed()) return cmd_eval(net_path, x, grid, a, b);
        if (smp->parsed()) return cmd_sample(hist_path, count, seed);
        if (pieces->parsed()) return cmd_pieces(net_path, a, b);
        if (dist->parsed()) return cmd_distance(hist_path, net_path, r, m, report_path);
        if (bnd->parsed()) return cmd_bounds(n, epsilon, l_depth, d);
        if (tbl->parsed()) return cmd_table(cases_path, out_path);
        if (verify->parsed()) {
            histopush::acceptance::Options opt;
            opt.cli_path = std::filesystem::read_symlink("/proc/self/exe").string();
            opt.only = only;
            return histopush::acceptance::run(opt) ? 0 : 1;
        }
        return 3;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
}
