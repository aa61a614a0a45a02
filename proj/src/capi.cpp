#include "specgap/specgap.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include <json.hpp>

#include "assembly.hpp"
#include "certificate.hpp"
#include "errors.hpp"
#include "sampler.hpp"
#include "sharpness.hpp"
#include "spectral_measure.hpp"
#include "toeplitz.hpp"

using namespace specgap;

struct sg_measure {
    SpectralMeasure m;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return SG_OK;
    } catch (const ValidationError& e) {
        g_last_error = e.what();
        return SG_ERR_INVALID;
    } catch (const NumericError& e) {
        g_last_error = e.what();
        return SG_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SG_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

nlohmann::json estimate_json(const McEstimate& e) {
    return {{"successes", e.successes}, {"trials", e.trials},
            {"p_hat", e.p_hat},         {"ci_lo", e.ci_lo},
            {"ci_hi", e.ci_hi},         {"stderr", e.stderr_est()}};
}

} // namespace

extern "C" {

const char* sg_version(void) { return "0.1.0"; }

const char* sg_last_error(void) { return g_last_error.c_str(); }

void sg_string_free(char* s) { delete[] s; }

int sg_measure_parse(const char* json_text, sg_measure** out) {
    return guarded([&] {
        if (!json_text || !out)
            throw ValidationError("sg_measure_parse: null argument");
        *out = new sg_measure{SpectralMeasure::parse(json_text)};
    });
}

int sg_measure_example(int n_max, sg_measure** out) {
    return guarded([&] {
        if (!out) throw ValidationError("sg_measure_example: null output");
        *out = new sg_measure{example_measure(n_max)};
    });
}

void sg_measure_free(sg_measure* m) { delete m; }

int sg_measure_info(const sg_measure* m, char** json_out) {
    return guarded([&] {
        if (!m || !json_out)
            throw ValidationError("sg_measure_info: null argument");
        nlohmann::json j;
        j["total_mass"] = m->m.total_mass();
        j["gap_radius"] = m->m.gap_radius();
        j["admissible_gap"] = m->m.admissible_gap();
        j["support_radius"] = m->m.max_freq();
        j["atom_count"] = m->m.atoms().size();
        j["density_piece_count"] = m->m.pieces().size();
        *json_out = dup_string(j.dump());
    });
}

int sg_measure_to_json(const sg_measure* m, char** json_out) {
    return guarded([&] {
        if (!m || !json_out)
            throw ValidationError("sg_measure_to_json: null argument");
        *json_out = dup_string(m->m.to_json());
    });
}

int sg_covariance(const sg_measure* m, double x, double* out) {
    return guarded([&] {
        if (!m || !out) throw ValidationError("sg_covariance: null argument");
        *out = m->m.covariance(x);
    });
}

int sg_gap_radius(const sg_measure* m, double* out) {
    return guarded([&] {
        if (!m || !out) throw ValidationError("sg_gap_radius: null argument");
        *out = m->m.gap_radius();
    });
}

int sg_orthant_probability(double rho, double* out) {
    return guarded([&] {
        if (!out)
            throw ValidationError("sg_orthant_probability: null output");
        *out = orthant_probability(rho);
    });
}

int sg_sample_path(const sg_measure* m, double x0, double step, int64_t count,
                   uint64_t seed, double* values_out) {
    return guarded([&] {
        if (!m || !values_out)
            throw ValidationError("sg_sample_path: null argument");
        if (count <= 0) throw ValidationError("sg_sample_path: count <= 0");
        SamplePath p = sample_path(m->m, x0, step,
                                   static_cast<std::uint64_t>(count), seed);
        std::memcpy(values_out, p.values.data(),
                    p.values.size() * sizeof(double));
    });
}

int sg_mc_persistence(const sg_measure* m, double L, double step,
                      int64_t trials, uint64_t seed, int threads,
                      char** json_out) {
    return guarded([&] {
        if (!m || !json_out)
            throw ValidationError("sg_mc_persistence: null argument");
        if (trials <= 0) throw ValidationError("trials must be > 0");
        McEstimate e = mc_persistence(m->m, L, step,
                                      static_cast<std::uint64_t>(trials),
                                      seed, threads);
        nlohmann::json j = estimate_json(e);
        j["L"] = L;
        j["step"] = step;
        j["seed"] = seed;
        j["grid_points"] =
            static_cast<std::uint64_t>(std::floor(L / step + 1e-9)) + 1;
        j["note"] = "grid event: upper-approximates continuous persistence";
        SamplingModel model(m->m);
        j["cov_discretization_error"] =
            model.max_covariance_error(m->m, {0.0, L / 2.0, L});
        *json_out = dup_string(j.dump());
    });
}

int sg_mc_sweep(const sg_measure* m, const double* L_values, int count,
                double step, int64_t trials, uint64_t seed, int threads,
                char** json_out) {
    return guarded([&] {
        if (!m || !json_out || !L_values)
            throw ValidationError("sg_mc_sweep: null argument");
        if (count <= 0) throw ValidationError("sg_mc_sweep: count <= 0");
        if (trials <= 0) throw ValidationError("trials must be > 0");
        std::vector<double> Ls(L_values, L_values + count);
        auto est = mc_sweep(m->m, Ls, step,
                            static_cast<std::uint64_t>(trials), seed, threads);
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < est.size(); ++i) {
            nlohmann::json r = estimate_json(est[i]);
            r["L"] = Ls[i];
            rows.push_back(r);
        }
        nlohmann::json j;
        j["step"] = step;
        j["seed"] = seed;
        j["rows"] = rows;
        *json_out = dup_string(j.dump());
    });
}

int sg_certify_band(const sg_measure* m_unit, int n, char** json_out) {
    return guarded([&] {
        if (!m_unit || !json_out)
            throw ValidationError("sg_certify_band: null argument");
        Certificate cert = certify_band(m_unit->m, n);
        *json_out = dup_string(cert.to_json());
    });
}

int sg_certify(const sg_measure* m, double delta, double L, double c_pp,
               int discrete, char** json_out) {
    return guarded([&] {
        if (!m || !json_out)
            throw ValidationError("sg_certify: null argument");
        AssembledBound b =
            certified_upper_bound(m->m, delta, L, c_pp, discrete != 0);
        *json_out = dup_string(b.to_json());
    });
}

int sg_lower_bound(double C, double L, double R, char** json_out) {
    return guarded([&] {
        if (!json_out) throw ValidationError("sg_lower_bound: null output");
        LowerBoundTrace t = lower_bound(C, L, R);
        *json_out = dup_string(t.to_json());
    });
}

int sg_rho_table(const sg_measure* m, int n_max, char** json_out) {
    return guarded([&] {
        if (!m || !json_out)
            throw ValidationError("sg_rho_table: null argument");
        if (n_max < 0) throw ValidationError("sg_rho_table: n_max < 0");
        nlohmann::json rows = nlohmann::json::array();
        for (int n = 0; n <= n_max; ++n) {
            nlohmann::json r;
            r["n"] = n;
            try {
                RhoValue rv = rho(m->m, n);
                r["rho2"] = rv.rho2;
                r["condition_estimate"] = rv.condition_estimate;
                r["status"] = "ok";
            } catch (const std::exception& e) {
                r["rho2"] = nullptr;
                r["status"] = std::string("failed: ") + e.what();
            }
            rows.push_back(r);
        }
        nlohmann::json j;
        j["rows"] = rows;
        *json_out = dup_string(j.dump());
    });
}

int sg_sigma_table(const sg_measure* m, int N_max, char** json_out) {
    return guarded([&] {
        if (!m || !json_out)
            throw ValidationError("sg_sigma_table: null argument");
        if (N_max < 0) throw ValidationError("sg_sigma_table: N_max < 0");
        nlohmann::json rows = nlohmann::json::array();
        for (int N = 0; N <= N_max; ++N) {
            ToeplitzSpectrum s =
                sigma_for_band(m->m, static_cast<std::size_t>(N));
            rows.push_back({{"N", N}, {"sigma2", s.sigma2}});
        }
        nlohmann::json j;
        j["rows"] = rows;
        *json_out = dup_string(j.dump());
    });
}

int sg_lagrange_report(int n, int n_max, char** json_out) {
    return guarded([&] {
        if (!json_out)
            throw ValidationError("sg_lagrange_report: null output");
        LagrangeReport rep = verify_lagrange_bound(n, n_max);
        *json_out = dup_string(rep.to_json());
    });
}

} // extern "C"
