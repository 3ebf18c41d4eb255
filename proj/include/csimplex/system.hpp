#ifndef CSIMPLEX_SYSTEM_HPP
#define CSIMPLEX_SYSTEM_HPP

#include <map>
#include <string>
#include <vector>

#include "csimplex/types.hpp"

namespace csimplex {

/// Real trigonometric polynomial  c0 + sum_k ( a_k cos(k w t) + b_k sin(k w t) ),
/// with w = 2*pi/T supplied at evaluation time.
struct TrigPoly {
    double c0 = 0.0;
    std::vector<double> cos_c;  // a_1, a_2, ...
    std::vector<double> sin_c;  // b_1, b_2, ...

    TrigPoly() = default;
    explicit TrigPoly(double c) : c0(c) {}

    bool is_constant() const { return cos_c.empty() && sin_c.empty(); }

    double value(double t, double omega) const {
        double v = c0;
        for (size_t k = 0; k < cos_c.size(); ++k)
            v += cos_c[k] * std::cos(static_cast<double>(k + 1) * omega * t);
        for (size_t k = 0; k < sin_c.size(); ++k)
            v += sin_c[k] * std::sin(static_cast<double>(k + 1) * omega * t);
        return v;
    }

    // Exact antiderivative evaluated over [a, b].
    double integral(double a, double b, double omega) const {
        double v = c0 * (b - a);
        for (size_t k = 0; k < cos_c.size(); ++k) {
            const double kw = static_cast<double>(k + 1) * omega;
            v += cos_c[k] * (std::sin(kw * b) - std::sin(kw * a)) / kw;
        }
        for (size_t k = 0; k < sin_c.size(); ++k) {
            const double kw = static_cast<double>(k + 1) * omega;
            v += sin_c[k] * (std::cos(kw * a) - std::cos(kw * b)) / kw;
        }
        return v;
    }
};

/// One smooth-in-(t,x) piece of a Kolmogorov right-hand side in Lotka-Volterra
/// form:  g_i(t,x) = r_i(t) - sum_j a_ij(t) x_j.
struct Piece {
    std::vector<TrigPoly> r;                 // d entries
    std::vector<std::vector<TrigPoly>> a;    // d x d
};

enum class Family { lv_smooth, lv_seasonal, custom_piecewise };

std::string family_name(Family f);

/// A d-species T-periodic Kolmogorov system with finitely many time
/// breakpoints per period.  Immutable after construction; all operations on it
/// are pure, so instances can be shared freely across threads.
class SystemSpec {
  public:
    SystemSpec(int d, double T, std::vector<double> interior_breakpoints,
               std::vector<Piece> pieces, Family family,
               std::map<std::string, double> params = {});

    int dim() const { return d_; }
    double period() const { return T_; }
    double omega() const { return omega_; }
    Family family() const { return family_; }
    bool normalized() const { return normalized_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }  // 0 = tau_0 < ... < tau_m = T
    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::map<std::string, double>& params() const { return params_; }

    /// Reduce t to its canonical representative in [0, T).  fmod is exact, so
    /// the reduction (and hence eval_g) is bit-exactly T-periodic in t.
    double reduce_time(double t) const {
        double s = std::fmod(t, T_);
        if (s < 0.0) s += T_;
        if (s >= T_) s = 0.0;  // guards s = T from the rounding of the += above
        return s;
    }

    /// Index of the piece whose interval [tau_k, tau_{k+1}) contains s in [0,T).
    int piece_index(double s) const;

    /// Per-capita growth rates g(t mod T, x).
    Vec eval_g(double t, const Vec& x) const;

    /// Full right-hand side G_i = x_i g_i(t,x); exactly zero where x_i = 0.
    Vec eval_G(double t, const Vec& x) const;

    /// g_i for a single species, without allocating.
    double eval_g_i(int i, double s_reduced, const Vec& x) const;

    /// State rescaling x -> diag(xhat) x so that each axis fixed point becomes 1.
    SystemSpec rescaled(const Vec& axis_fixed_points) const;

  private:
    void validate_xt(double t, const Vec& x) const;

    int d_;
    double T_;
    double omega_;
    std::vector<double> breakpoints_;
    std::vector<Piece> pieces_;
    Family family_;
    std::map<std::string, double> params_;
    bool normalized_ = false;
};

/// normalize per the axis-fixed-point rescaling; errors if any xhat_i <= 0.
SystemSpec normalize(const SystemSpec& spec, const Vec& axis_fixed_points);

// ---------------------------------------------------------------- built-in families

/// Smooth periodic Lotka-Volterra: one piece, trig-polynomial coefficients.
SystemSpec make_lv_smooth(double T, std::vector<TrigPoly> r,
                          std::vector<std::vector<TrigPoly>> a);

/// Seasonal succession: dormant season [0,(1-phi)T) with pure decay
/// g_i = -lambda_i, growth season [(1-phi)T, T) with constant LV coefficients.
SystemSpec make_lv_seasonal(double T, const Vec& lambda, double phi, const Vec& r,
                            const std::vector<Vec>& a);

SystemSpec make_custom_piecewise(double T, std::vector<double> interior_breakpoints,
                                 std::vector<Piece> pieces);

/// d decoupled logistic species g_i = 1 - x_i (a common test system).
SystemSpec make_decoupled_logistic(int d, double T = 1.0);

/// Autonomous LV with constant coefficients.
SystemSpec make_lv_constant(double T, const Vec& r, const std::vector<Vec>& a);

// ---------------------------------------------------------------- JSON spec files

/// Parse the spec-file schema {"d":..,"T":..,"family":..,"params":{..}}.
SystemSpec load_system_json(const std::string& json_text);
SystemSpec load_system_file(const std::string& path);
std::string system_to_json(const SystemSpec& spec);

}  // namespace csimplex

#endif
