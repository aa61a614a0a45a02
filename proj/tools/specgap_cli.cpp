// specgap command-line front end. Talks to the library exclusively through
// the C API in specgap/specgap.h; all array/struct data crosses the boundary
// as JSON and is reshaped here into csv/json/svg outputs.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <specgap/specgap.h>

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumeric = 3;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& msg) {
    throw CliError{code, msg};
}

void check(int rc, const std::string& where) {
    if (rc != SG_OK) fail(rc, where + ": " + sg_last_error());
}

// shortest round-trip decimal, identical to the JSON serializer's choice
std::string fmt(double v) { return json(v).dump(); }

std::string take_string(char* s) {
    std::string out(s);
    sg_string_free(s);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kExitInvalid, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) fail(kExitInvalid, "cannot open output file: " + out_path);
    out << content;
}

class Measure {
public:
    explicit Measure(const std::string& path) {
        check(sg_measure_parse(read_file(path).c_str(), &m_), "measure");
        char* info = nullptr;
        check(sg_measure_info(m_, &info), "measure info");
        info_ = json::parse(take_string(info));
    }
    ~Measure() { sg_measure_free(m_); }
    Measure(const Measure&) = delete;
    Measure& operator=(const Measure&) = delete;

    sg_measure* get() const { return m_; }
    const json& info() const { return info_; }
    double admissible_gap() const { return info_.at("admissible_gap"); }
    double support_radius() const { return info_.at("support_radius"); }

private:
    sg_measure* m_ = nullptr;
    json info_;
};

struct Options {
    std::string measure_path;
    double L = 1.0;
    double step = 0.0; // 0 = default rule
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    double delta = 0.0; // 0 = admissible gap of the measure
    double c_pp = 0.5;
    int n = 8;
    double C = 0.0; // 0 = not provided
    double R = 0.0; // 0 = support radius of the measure
    std::string out_path;
    std::string format = "json";
    bool discrete = false;
    std::string Ls;
    int threads = 0;
};

double default_step(const Measure& m, double L) {
    double gap = m.info().at("gap_radius");
    double s = L > 0.0 ? L / 1000.0 : 1.0;
    if (gap > 0.0 && std::isfinite(gap)) s = std::min(s, 0.01 / gap);
    return s;
}

std::vector<double> parse_L_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail(kExitInvalid, "bad L value in --Ls: " + item);
        }
    }
    if (out.empty()) fail(kExitInvalid, "--Ls needs at least one value");
    return out;
}

json run_estimate(const Measure& m, const Options& o) {
    double step = o.step > 0.0 ? o.step : default_step(m, o.L);
    char* s = nullptr;
    check(sg_mc_persistence(m.get(), o.L, step, o.trials, o.seed, o.threads,
                            &s),
          "estimate");
    return json::parse(take_string(s));
}

json run_certify(const Measure& m, const Options& o) {
    double delta = o.delta > 0.0 ? o.delta : m.admissible_gap();
    char* s = nullptr;
    check(sg_certify(m.get(), delta, o.L, o.c_pp, o.discrete ? 1 : 0, &s),
          "certify");
    return json::parse(take_string(s));
}

json run_lower(const Options& o, double R_default) {
    if (o.C <= 0.0) fail(kExitInvalid, "lower: --C must be given and > 0");
    double R = o.R > 0.0 ? o.R : R_default;
    if (R <= 0.0) fail(kExitInvalid, "lower: --R must be > 0");
    char* s = nullptr;
    check(sg_lower_bound(o.C, o.L, R, &s), "lower");
    return json::parse(take_string(s));
}

json run_rho(const Measure& m, const Options& o) {
    char* s = nullptr;
    check(sg_rho_table(m.get(), o.n, &s), "rho");
    return json::parse(take_string(s));
}

json run_sigma(const Measure& m, const Options& o) {
    char* s = nullptr;
    check(sg_sigma_table(m.get(), o.n, &s), "sigma");
    return json::parse(take_string(s));
}

json run_sample(const Measure& m, const Options& o) {
    double step = o.step > 0.0 ? o.step : default_step(m, o.L);
    auto count = static_cast<std::int64_t>(std::floor(o.L / step + 1e-9)) + 1;
    std::vector<double> values(static_cast<std::size_t>(count));
    check(sg_sample_path(m.get(), 0.0, step, count, o.seed, values.data()),
          "sample");
    json rows = json::array();
    for (std::int64_t j = 0; j < count; ++j)
        rows.push_back({{"x", step * static_cast<double>(j)},
                        {"f", values[static_cast<std::size_t>(j)]}});
    return {{"step", step}, {"seed", o.seed}, {"rows", rows}};
}

// least-squares fit of log p against 1, L, L^2 (rows with successes > 0)
json fit_log_decay(const json& rows) {
    std::vector<double> Ls, ys;
    for (const auto& r : rows) {
        double p = r.at("p_hat");
        if (p > 0.0) {
            Ls.push_back(r.at("L"));
            ys.push_back(std::log(p));
        }
    }
    json fit;
    fit["points_used"] = Ls.size();
    if (Ls.size() < 3) {
        fit["intercept"] = nullptr;
        fit["slope_L"] = nullptr;
        fit["slope_L2"] = nullptr;
        fit["rms_residual"] = nullptr;
        return fit;
    }
    double a[3][4] = {};
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        double x[3] = {1.0, Ls[i], Ls[i] * Ls[i]};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] += x[r] * x[c];
            a[r][3] += x[r] * ys[i];
        }
    }
    for (int col = 0; col < 3; ++col) { // Gaussian elimination with pivoting
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        for (int c = 0; c < 4; ++c) std::swap(a[col][c], a[piv][c]);
        if (a[col][col] == 0.0) {
            fit["intercept"] = nullptr;
            fit["slope_L"] = nullptr;
            fit["slope_L2"] = nullptr;
            fit["rms_residual"] = nullptr;
            return fit;
        }
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    double b0 = a[0][3] / a[0][0];
    double b1 = a[1][3] / a[1][1];
    double b2 = a[2][3] / a[2][2];
    double ss = 0.0;
    for (std::size_t i = 0; i < Ls.size(); ++i) {
        double resid = ys[i] - (b0 + b1 * Ls[i] + b2 * Ls[i] * Ls[i]);
        ss += resid * resid;
    }
    fit["intercept"] = b0;
    fit["slope_L"] = b1;
    fit["slope_L2"] = b2;
    fit["rms_residual"] = std::sqrt(ss / static_cast<double>(Ls.size()));
    return fit;
}

json run_sweep(const Measure& m, const Options& o) {
    std::vector<double> Ls = parse_L_list(o.Ls);
    double L_max = 0.0;
    for (double L : Ls) L_max = std::max(L_max, L);
    double step = o.step > 0.0 ? o.step : default_step(m, L_max);
    char* s = nullptr;
    check(sg_mc_sweep(m.get(), Ls.data(), static_cast<int>(Ls.size()), step,
                      o.trials, o.seed, o.threads, &s),
          "sweep");
    json mc = json::parse(take_string(s));
    double delta = o.delta > 0.0 ? o.delta : m.admissible_gap();
    json rows = json::array();
    for (const auto& r : mc.at("rows")) {
        json row = r;
        double L = r.at("L");
        if (L > 0.0) {
            char* c = nullptr;
            check(sg_certify(m.get(), delta, L, o.c_pp, o.discrete ? 1 : 0,
                             &c),
                  "sweep certify");
            json cert = json::parse(take_string(c));
            row["upper_bound"] = cert.at("total_bound");
        } else {
            row["upper_bound"] = 0.5;
        }
        if (o.C > 0.0 && L >= 1.0) {
            double R = o.R > 0.0 ? o.R : m.support_radius();
            char* lb = nullptr;
            check(sg_lower_bound(o.C, L, R, &lb), "sweep lower");
            row["lower_bound_log10"] =
                json::parse(take_string(lb)).at("log10_bound");
        } else {
            row["lower_bound_log10"] = nullptr;
        }
        rows.push_back(row);
    }
    json out;
    out["step"] = step;
    out["seed"] = o.seed;
    out["rows"] = rows;
    out["fit"] = fit_log_decay(rows);
    return out;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string to_csv_estimate(const json& j, const Options& o) {
    std::ostringstream out;
    out << "L,step,trials,seed,successes,p_hat,ci_lo,ci_hi,stderr\n";
    out << csv_cell(j.at("L")) << ',' << csv_cell(j.at("step")) << ','
        << o.trials << ',' << o.seed << ',' << csv_cell(j.at("successes"))
        << ',' << csv_cell(j.at("p_hat")) << ',' << csv_cell(j.at("ci_lo"))
        << ',' << csv_cell(j.at("ci_hi")) << ',' << csv_cell(j.at("stderr"))
        << '\n';
    return out.str();
}

std::string to_csv_keyvalue(const json& j) {
    std::ostringstream out;
    out << "key,value\n";
    std::function<void(const std::string&, const json&)> walk =
        [&](const std::string& prefix, const json& node) {
            if (node.is_object()) {
                for (const auto& item : node.items())
                    walk(prefix.empty() ? item.key()
                                        : prefix + "." + item.key(),
                         item.value());
            } else if (node.is_array()) {
                for (std::size_t i = 0; i < node.size(); ++i)
                    walk(prefix + "[" + std::to_string(i) + "]", node[i]);
            } else {
                out << prefix << ',' << csv_cell(node) << '\n';
            }
        };
    walk("", j);
    return out.str();
}

std::string to_csv_rows(const json& rows,
                        const std::vector<std::string>& cols) {
    std::ostringstream out;
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            out << (r.contains(cols[i]) ? csv_cell(r.at(cols[i])) : "");
            out << (i + 1 < cols.size() ? "," : "\n");
        }
    }
    return out.str();
}

std::string to_csv_sweep(const json& j) {
    std::ostringstream out;
    out << "L,p_hat,stderr,upper_bound,lower_bound_log10\n";
    for (const auto& r : j.at("rows")) {
        out << csv_cell(r.at("L")) << ',' << csv_cell(r.at("p_hat")) << ','
            << csv_cell(r.at("stderr")) << ',' << csv_cell(r.at("upper_bound"))
            << ',' << csv_cell(r.at("lower_bound_log10")) << '\n';
    }
    const json& fit = j.at("fit");
    out << "fit," << csv_cell(fit.at("slope_L")) << ','
        << csv_cell(fit.at("slope_L2")) << ',' << csv_cell(fit.at("intercept"))
        << ',' << csv_cell(fit.at("rms_residual")) << '\n';
    return out.str();
}

std::string to_svg_sweep(const json& j) {
    const json& rows = j.at("rows");
    double L_max = 1e-12, p_max = 1e-12;
    for (const auto& r : rows) {
        L_max = std::max(L_max, r.at("L").get<double>());
        p_max = std::max(p_max, r.at("p_hat").get<double>());
    }
    const double x0 = 50, x1 = 620, y0 = 370, y1 = 20;
    std::ostringstream pts;
    bool first = true;
    for (const auto& r : rows) {
        double x = x0 + (x1 - x0) * r.at("L").get<double>() / L_max;
        double y = y0 - (y0 - y1) * r.at("p_hat").get<double>() / p_max;
        if (!first) pts << ' ';
        pts << fmt(x) << ',' << fmt(y);
        first = false;
    }
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
           "height=\"400\" viewBox=\"0 0 640 400\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" "
           "fill=\"white\"/>\n"
        << "<line x1=\"50\" y1=\"370\" x2=\"620\" y2=\"370\" "
           "stroke=\"black\"/>\n"
        << "<line x1=\"50\" y1=\"370\" x2=\"50\" y2=\"20\" "
           "stroke=\"black\"/>\n"
        << "<text x=\"600\" y=\"392\" font-size=\"12\">L=" << fmt(L_max)
        << "</text>\n"
        << "<text x=\"4\" y=\"20\" font-size=\"12\">p=" << fmt(p_max)
        << "</text>\n"
        << "<polyline fill=\"none\" stroke=\"black\" points=\"" << pts.str()
        << "\"/>\n</svg>\n";
    return out.str();
}

int dispatch(const std::string& command, const Options& o) {
    std::string content;
    if (command == "lower") {
        json j = run_lower(o, o.R);
        if (o.format == "json") {
            content = j.dump() + "\n";
        } else if (o.format == "csv") {
            content = to_csv_keyvalue(j);
        } else {
            fail(kExitInvalid, "lower: unsupported format " + o.format);
        }
        write_output(o.out_path, content);
        return kExitOk;
    }

    if (o.measure_path.empty())
        fail(kExitInvalid, command + ": --measure is required");
    Measure m(o.measure_path);

    if (command == "estimate") {
        json j = run_estimate(m, o);
        if (o.format == "json")
            content = j.dump() + "\n";
        else if (o.format == "csv")
            content = to_csv_estimate(j, o);
        else
            fail(kExitInvalid, "estimate: unsupported format " + o.format);
    } else if (command == "certify") {
        json j = run_certify(m, o);
        if (o.format == "json")
            content = j.dump() + "\n";
        else if (o.format == "csv")
            content = to_csv_keyvalue(j);
        else
            fail(kExitInvalid, "certify: unsupported format " + o.format);
    } else if (command == "rho") {
        json j = run_rho(m, o);
        if (o.format == "json")
            content = j.dump() + "\n";
        else if (o.format == "csv")
            content = to_csv_rows(j.at("rows"),
                                  {"n", "rho2", "condition_estimate",
                                   "status"});
        else
            fail(kExitInvalid, "rho: unsupported format " + o.format);
    } else if (command == "sigma") {
        json j = run_sigma(m, o);
        if (o.format == "json")
            content = j.dump() + "\n";
        else if (o.format == "csv")
            content = to_csv_rows(j.at("rows"), {"N", "sigma2"});
        else
            fail(kExitInvalid, "sigma: unsupported format " + o.format);
    } else if (command == "sample") {
        json j = run_sample(m, o);
        if (o.format == "json")
            content = j.dump() + "\n";
        else if (o.format == "csv")
            content = to_csv_rows(j.at("rows"), {"x", "f"});
        else
            fail(kExitInvalid, "sample: unsupported format " + o.format);
    } else if (command == "sweep") {
        json j = run_sweep(m, o);
        if (o.format == "json")
            content = j.dump() + "\n";
        else if (o.format == "csv")
            content = to_csv_sweep(j);
        else if (o.format == "svg")
            content = to_svg_sweep(j);
        else
            fail(kExitInvalid, "sweep: unsupported format " + o.format);
    } else if (command == "report") {
        json j;
        j["measure"] = m.info();
        j["estimate"] = run_estimate(m, o);
        j["certify"] = run_certify(m, o);
        j["rho"] = run_rho(m, o);
        double lo = m.info().at("gap_radius");
        double hi = m.info().at("support_radius");
        if (lo >= 0.25 - 1e-12 && hi <= 0.5 + 1e-12) {
            j["sigma"] = run_sigma(m, o);
        } else {
            j["sigma"] = {{"skipped",
                           "measure is not supported in the unit band "
                           "(1/4, 1/2]"}};
        }
        if (o.C > 0.0) j["lower"] = run_lower(o, m.support_radius());
        if (!o.Ls.empty()) j["sweep"] = run_sweep(m, o);
        if (o.format != "json")
            fail(kExitInvalid, "report: only json format is supported");
        content = j.dump() + "\n";
    } else {
        fail(kExitInvalid, "unknown command: " + command);
    }
    write_output(o.out_path, content);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"persistence probabilities of stationary Gaussian processes "
                 "with a spectral gap"};
    app.require_subcommand(1);

    Options o;
    std::vector<CLI::App*> subs;
    for (const char* name : {"estimate", "certify", "lower", "rho", "sigma",
                             "sample", "sweep", "report"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--measure", o.measure_path, "measure JSON file");
        sub->add_option("--L", o.L, "interval length");
        sub->add_option("--step", o.step, "grid step (default: rule-based)");
        sub->add_option("--trials", o.trials, "Monte Carlo trials");
        sub->add_option("--seed", o.seed, "master seed (all randomness)");
        sub->add_option("--delta", o.delta,
                        "spectral gap radius (default: from the measure)");
        sub->add_option("--cpp", o.c_pp, "band-sizing constant c''");
        sub->add_option("--n", o.n, "table size / certificate n");
        sub->add_option("--C", o.C, "lower-bound constant C");
        sub->add_option("--R", o.R, "support radius for the lower bound");
        sub->add_option("--out", o.out_path, "output file (default: stdout)");
        sub->add_option("--format", o.format, "csv | json | svg");
        sub->add_flag("--discrete", o.discrete,
                      "restrict bands to a <= 1 (process on Z)");
        sub->add_option("--Ls", o.Ls, "comma-separated L values for sweep");
        sub->add_option("--threads", o.threads, "worker count (0 = auto)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalid;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), o);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
