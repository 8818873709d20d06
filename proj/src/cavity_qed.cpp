#include "bdsid/cavity_qed.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace bdsid {

namespace {

constexpr int kLevelA = 0, kLevelB = 1, kLevelE = 2;

void require_nonzero(double value, const char* term) {
    if (value == 0.0 || !std::isfinite(1.0 / value))
        throw std::invalid_argument(std::string("cavity_qed: division by zero in term ") + term);
}

double stark_denominator(const CavityParams& p, StepId step) {
    // delta_a - Delta_b + g_a^2/delta_a for the xx/yy frames,
    // delta_a - Delta_a + g_a^2/delta_a for the zz frame.
    require_nonzero(p.delta_a, "delta_a");
    double d = (step == StepId::Step3) ? p.delta_a - p.Delta_a + p.g_a * p.g_a / p.delta_a
                                       : p.delta_a - p.Delta_b + p.g_a * p.g_a / p.delta_a;
    require_nonzero(d, step == StepId::Step3 ? "delta_a - Delta_a + g_a^2/delta_a"
                                             : "delta_a - Delta_b + g_a^2/delta_a");
    return d;
}

void check_params(const CavityParams& p) {
    if (p.n_ph < 2) throw std::invalid_argument("cavity_qed: n_ph must be >= 2");
    require_nonzero(p.delta_a, "delta_a");
    require_nonzero(p.delta_b, "delta_b");
    const double match_a = p.g_a * p.g_a / p.delta_a;
    const double match_b = p.g_b * p.g_b / p.delta_b;
    if (std::abs(match_a - match_b) > 1e-9 * std::max(std::abs(match_a), 1e-300))
        throw std::invalid_argument(
            "cavity_qed: matching condition g_a^2/delta_a = g_b^2/delta_b violated");
}

// Sparse description of the rotating-frame generator: four driven/coupled
// hopping families plus the diagonal delta_1 term. Entries hold the lower
// triangle (|e><a| style); the Hermitian conjugate is applied on the fly.
struct Generator {
    struct Entry {
        int r, c;
        double v;
    };
    int dim = 0;
    std::array<std::vector<Entry>, 4> terms;  // Omega_a, g_a, Omega_b, g_b
    std::array<double, 4> amps{};
    std::array<double, 4> freqs{};
    std::vector<double> nb;  // number of atoms in |b>, per basis state
    double delta_1 = 0.0;

    void apply(double t, const ComplexVector& x, ComplexVector& out) const {
        for (int i = 0; i < dim; ++i) out(i) = delta_1 * nb[i] * x(i);
        for (int k = 0; k < 4; ++k) {
            const cxd phase = amps[k] * std::exp(cxd(0.0, freqs[k] * t));
            const cxd phase_c = std::conj(phase);
            for (const Entry& e : terms[k]) {
                out(e.r) += phase * e.v * x(e.c);
                out(e.c) += phase_c * e.v * x(e.r);
            }
        }
    }

    ComplexMatrix to_dense(double t) const {
        ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) h(i, i) = delta_1 * nb[i];
        for (int k = 0; k < 4; ++k) {
            const cxd phase = amps[k] * std::exp(cxd(0.0, freqs[k] * t));
            for (const Entry& e : terms[k]) {
                h(e.r, e.c) += phase * e.v;
                h(e.c, e.r) += std::conj(phase) * e.v;
            }
        }
        return h;
    }
};

int state_index(int a1, int a3, int n, int n_ph) { return (a1 * 3 + a3) * n_ph + n; }

Generator build_generator(const CavityParams& p) {
    Generator g;
    g.dim = 9 * p.n_ph;
    g.delta_1 = p.delta_1;
    g.amps = {p.omega_ra, p.g_a, p.omega_rb, p.g_b};
    g.freqs = {p.Delta_a, p.delta_a, p.Delta_b, p.delta_b};
    g.nb.assign(g.dim, 0.0);
    for (int a1 = 0; a1 < 3; ++a1)
        for (int a3 = 0; a3 < 3; ++a3)
            for (int n = 0; n < p.n_ph; ++n)
                g.nb[state_index(a1, a3, n, p.n_ph)] =
                    double(a1 == kLevelB) + double(a3 == kLevelB);

    auto add_atom_terms = [&](int lower_level, std::vector<Generator::Entry>& drive,
                              std::vector<Generator::Entry>& cavity) {
        for (int other = 0; other < 3; ++other) {
            for (int n = 0; n < p.n_ph; ++n) {
                // atom 1
                drive.push_back({state_index(kLevelE, other, n, p.n_ph),
                                 state_index(lower_level, other, n, p.n_ph), 1.0});
                // atom 3
                drive.push_back({state_index(other, kLevelE, n, p.n_ph),
                                 state_index(other, lower_level, n, p.n_ph), 1.0});
                if (n >= 1) {  // photon absorbed while the atom is excited
                    cavity.push_back({state_index(kLevelE, other, n - 1, p.n_ph),
                                      state_index(lower_level, other, n, p.n_ph),
                                      std::sqrt(double(n))});
                    cavity.push_back({state_index(other, kLevelE, n - 1, p.n_ph),
                                      state_index(other, lower_level, n, p.n_ph),
                                      std::sqrt(double(n))});
                }
            }
        }
    };
    add_atom_terms(kLevelA, g.terms[0], g.terms[1]);
    add_atom_terms(kLevelB, g.terms[2], g.terms[3]);
    return g;
}

double max_detuning(const CavityParams& p) {
    return std::max({std::abs(p.delta_a), std::abs(p.delta_b), std::abs(p.Delta_a),
                     std::abs(p.Delta_b), std::abs(p.delta_1)});
}

// Embed a two-qubit basis state (atoms in |a>/|b>, cavity vacuum).
ComplexVector embed_qubit_vector(const ComplexVector& v4, int n_ph) {
    ComplexVector out = ComplexVector::Zero(9 * n_ph);
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b3 = 0; b3 < 2; ++b3)
            out(state_index(b1, b3, 0, n_ph)) = v4(b1 * 2 + b3);
    return out;
}

ComplexMatrix pauli_for_step(StepId step) {
    switch (step) {
        case StepId::Step1: return pauli_x();
        case StepId::Step2: return pauli_y();
        case StepId::Step3: return pauli_z();
    }
    throw std::invalid_argument("cavity_qed: bad step");
}

struct Populations {
    double observable;
    double excited;
    double photon;
    double outside_qubit_vacuum;
};

Populations analyze_state(const ComplexVector& psi, StepId step, int n_ph) {
    Populations pop{0.0, 0.0, 0.0, 0.0};
    double inside = 0.0;
    for (int a1 = 0; a1 < 3; ++a1) {
        for (int a3 = 0; a3 < 3; ++a3) {
            for (int n = 0; n < n_ph; ++n) {
                const double w = std::norm(psi(state_index(a1, a3, n, n_ph)));
                if (a1 == kLevelE || a3 == kLevelE) pop.excited += w;
                if (n >= 1) pop.photon += w;
                if (a1 != kLevelE && a3 != kLevelE && n == 0) inside += w;
            }
        }
    }
    pop.outside_qubit_vacuum = 1.0 - inside;
    if (step == StepId::Step3) {
        // <sigma^x> of atom 3 on its (a,b) levels
        cxd acc{0.0, 0.0};
        for (int a1 = 0; a1 < 3; ++a1)
            for (int n = 0; n < n_ph; ++n)
                acc += std::conj(psi(state_index(a1, kLevelA, n, n_ph))) *
                       psi(state_index(a1, kLevelB, n, n_ph));
        pop.observable = 2.0 * acc.real();
    } else {
        // <sigma^z> of atom 3, +1 on |b>
        double acc = 0.0;
        for (int a1 = 0; a1 < 3; ++a1)
            for (int n = 0; n < n_ph; ++n)
                acc += std::norm(psi(state_index(a1, kLevelB, n, n_ph))) -
                       std::norm(psi(state_index(a1, kLevelA, n, n_ph)));
        pop.observable = acc;
    }
    return pop;
}

struct Branch {
    double weight;
    ComplexVector state;  // 4-dim, on (atom1 qubit x probe qubit)
};

std::vector<Branch> eigenbranches(const ComplexMatrix& init) {
    check_density_matrix(init, "simulate_comparison(init)");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(init);
    std::vector<Branch> branches;
    for (Eigen::Index k = 0; k < init.rows(); ++k) {
        if (es.eigenvalues()(k) > 1e-14)
            branches.push_back({es.eigenvalues()(k), es.eigenvectors().col(k)});
    }
    return branches;
}

}  // namespace

double omega_b_for_step(StepId step, const CavityParams& base) {
    for (auto [v, name] : {std::pair{base.delta_a, "delta_a"}, {base.delta_b, "delta_b"},
                           {base.Delta_a, "Delta_a"}, {base.Delta_b, "Delta_b"}})
        require_nonzero(v, name);
    if (step == StepId::Step3) {
        double num = base.omega_ra * base.g_a * (1.0 / base.Delta_a + 1.0 / base.delta_a);
        double den = base.g_b * (1.0 / base.Delta_b + 1.0 / base.delta_b);
        require_nonzero(den, "g_b*(1/Delta_b + 1/delta_b)");
        return -num / den;
    }
    double num = base.g_b * base.omega_ra * (1.0 / base.Delta_a + 1.0 / base.delta_b);
    double den = base.g_a * (1.0 / base.delta_a + 1.0 / base.Delta_b);
    require_nonzero(den, "g_a*(1/delta_a + 1/Delta_b)");
    double value = num / den;
    return (step == StepId::Step2) ? -value : value;
}

CavityParams make_cavity_params(const CavityBaseConfig& config, StepId step) {
    if (config.n_ph < 2) throw std::invalid_argument("cavity_qed: n_ph must be >= 2");
    CavityParams p;
    p.g_a = config.g_a;
    p.omega_ra = config.omega_ra;
    p.delta_a = config.delta_a;
    p.delta_b = config.delta_b0 + config.delta_1;
    p.Delta_a = config.Delta_a;
    p.Delta_b = config.Delta_b0 + config.delta_1;
    p.delta_1 = config.delta_1;
    p.n_ph = config.n_ph;
    p.lab = config.lab;
    require_nonzero(p.delta_a, "delta_a");
    const double ratio = p.delta_b / p.delta_a;
    if (!(ratio > 0.0))
        throw std::invalid_argument(
            "cavity_qed: matching condition requires delta_b/delta_a > 0");
    p.g_b = p.g_a * std::sqrt(ratio);
    p.omega_rb = omega_b_for_step(step, p);
    return p;
}

CavityParams with_delta1(const CavityParams& params, double delta_1, StepId step) {
    CavityBaseConfig base;
    base.g_a = params.g_a;
    base.omega_ra = params.omega_ra;
    base.delta_a = params.delta_a;
    base.delta_b0 = params.delta_b - params.delta_1;
    base.Delta_a = params.Delta_a;
    base.Delta_b0 = params.Delta_b - params.delta_1;
    base.delta_1 = delta_1;
    base.n_ph = params.n_ph;
    base.lab = params.lab;
    return make_cavity_params(base, step);
}

EffectiveCoefficients coefficients_for_step(StepId step, const CavityParams& p) {
    const double ga2 = p.g_a * p.g_a;
    const double oa2 = p.omega_ra * p.omega_ra;
    const double ob2 = p.omega_rb * p.omega_rb;
    const double gb2 = p.g_b * p.g_b;
    for (auto [v, name] : {std::pair{p.delta_a, "delta_a"}, {p.delta_b, "delta_b"},
                           {p.Delta_a, "Delta_a"}, {p.Delta_b, "Delta_b"}})
        require_nonzero(v, name);

    EffectiveCoefficients out;
    out.step = step;
    const double denom = stark_denominator(p, step);
    if (step == StepId::Step3) {
        out.j1 = p.omega_ra * p.g_a / 2.0 * (1.0 / p.Delta_a + 1.0 / p.delta_a);
        out.j2 = p.omega_rb * p.g_b / 2.0 * (1.0 / p.Delta_b + 1.0 / p.delta_b);
        require_nonzero(p.Delta_a - p.Delta_b, "Delta_a - Delta_b");
        const double d2 = p.delta_a - p.Delta_b + ga2 / p.delta_a;
        const double d3 = p.delta_b - p.Delta_a + ga2 / p.delta_a;
        require_nonzero(d2, "delta_a - Delta_b + g_a^2/delta_a");
        require_nonzero(d3, "delta_b - Delta_a + g_a^2/delta_a");
        out.b_field =
            0.5 * (ob2 / p.Delta_b + p.delta_1 - oa2 / p.Delta_a) +
            0.5 * ((ob2 * ga2 / 4.0) / d2 * std::pow(1.0 / p.delta_a + 1.0 / p.Delta_b, 2) -
                   (oa2 * gb2 / 4.0) / d3 * std::pow(1.0 / p.delta_b + 1.0 / p.Delta_a, 2)) +
            (oa2 * ob2 / 4.0) / (p.Delta_a - p.Delta_b) *
                std::pow(1.0 / p.Delta_a + 1.0 / p.Delta_b, 2);
        // The sigma^z sigma^z coupling is quadratic in the exchange amplitude,
        // 2*J1~^2 / (delta_a - Delta_a + g_a^2/delta_a).
        out.lam = 2.0 * out.j1 * out.j1 / denom;
        return out;
    }

    out.j1 = p.g_a * p.omega_rb / 2.0 * (1.0 / p.delta_a + 1.0 / p.Delta_b);
    out.j2 = p.g_b * p.omega_ra / 2.0 * (1.0 / p.delta_b + 1.0 / p.Delta_a);
    require_nonzero(p.delta_a - p.delta_b, "delta_a - delta_b");
    const double d2 = p.delta_b - p.Delta_a + ga2 / p.delta_a;
    const double d3 = p.delta_a - p.Delta_a + ga2 / p.delta_a;
    require_nonzero(d2, "delta_b - Delta_a + g_a^2/delta_a");
    require_nonzero(d3, "delta_a - Delta_a + g_a^2/delta_a");
    out.b_field =
        (oa2 * ob2 / 4.0) / (p.delta_a - p.delta_b) *
            std::pow(1.0 / p.Delta_a + 1.0 / p.Delta_b, 2) +
        (ob2 * gb2 / 4.0) / d2 * std::pow(1.0 / p.Delta_b + 1.0 / p.delta_b, 2) -
        (oa2 * ga2 / 4.0) / d3 * std::pow(1.0 / p.Delta_a + 1.0 / p.delta_a, 2) +
        0.5 * (ob2 / p.Delta_b - oa2 / p.Delta_a + p.delta_1);
    out.lam = 2.0 * out.j1 * out.j1 / denom;
    return out;
}

std::vector<std::string> validity_warnings(StepId step, const CavityParams& p) {
    std::vector<std::string> warnings;
    const double detuning_min = std::min({std::abs(p.delta_a), std::abs(p.delta_b),
                                          std::abs(p.Delta_a), std::abs(p.Delta_b)});
    const double coupling_max = std::max({std::abs(p.g_a), std::abs(p.g_b),
                                          std::abs(p.omega_ra), std::abs(p.omega_rb)});
    if (detuning_min < 10.0 * coupling_max)
        warnings.push_back("large-detuning condition violated: min detuning " +
                           std::to_string(detuning_min) + " < 10 * max coupling " +
                           std::to_string(coupling_max));
    const double ga2da = p.g_a * p.g_a / p.delta_a;
    double lhs_min, rhs_max;
    if (step == StepId::Step3) {
        lhs_min = std::min(std::abs(p.delta_a - p.Delta_a + ga2da),
                           std::abs(p.delta_b - p.Delta_b + ga2da));
        rhs_max = std::max(std::abs(p.omega_ra * p.g_a / p.Delta_a),
                           std::abs(p.omega_rb * p.g_b / p.Delta_b));
    } else {
        lhs_min = std::min(std::abs(p.delta_a - p.Delta_b + ga2da),
                           std::abs(p.delta_b - p.Delta_a + ga2da));
        rhs_max = std::max(std::abs(p.omega_ra * p.g_b / p.Delta_a),
                           std::abs(p.omega_rb * p.g_a / p.Delta_b));
    }
    if (lhs_min < 10.0 * rhs_max)
        warnings.push_back("second-order detuning condition violated: " +
                           std::to_string(lhs_min) + " < 10 * " + std::to_string(rhs_max));
    return warnings;
}

TuneResult tune_delta1(const CavityParams& params, StepId step) {
    check_params(params);
    auto b_at = [&](double x) {
        return coefficients_for_step(step, with_delta1(params, x, step)).b_field;
    };
    double lo = params.delta_1 - params.g_a;
    double hi = params.delta_1 + params.g_a;
    double b_lo = b_at(lo), b_hi = b_at(hi);
    if ((b_lo < 0.0) == (b_hi < 0.0))
        throw std::runtime_error("tune_delta1: no sign change on bracket [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "], B = " +
                                 std::to_string(b_lo) + " / " + std::to_string(b_hi));
    double best_x = lo, best_b = std::abs(b_lo);
    if (std::abs(b_hi) < best_b) { best_x = hi; best_b = std::abs(b_hi); }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        double b_mid = b_at(mid);
        if (std::abs(b_mid) < best_b) { best_x = mid; best_b = std::abs(b_mid); }
        if (b_mid == 0.0) break;
        if ((b_mid < 0.0) == (b_lo < 0.0)) { lo = mid; b_lo = b_mid; }
        else hi = mid;
    }
    if (best_b > 1e-10 * std::abs(params.g_a))
        throw std::runtime_error("tune_delta1: residual |B| = " + std::to_string(best_b) +
                                 " did not reach 1e-10 * g_a");
    return {best_x, with_delta1(params, best_x, step)};
}

ComplexMatrix full_hamiltonian(const CavityParams& params, StepId /*step_frame*/, double t) {
    // The rotating-frame generator has the same structure in every frame;
    // the frames differ only through the parameter values.
    if (params.n_ph < 2) throw std::invalid_argument("cavity_qed: n_ph must be >= 2");
    return build_generator(params).to_dense(t);
}

ComplexMatrix effective_hamiltonian(StepId step, const EffectiveCoefficients& coeffs) {
    if (coeffs.step != step)
        throw std::invalid_argument("effective_hamiltonian: coefficients belong to another step");
    ComplexMatrix s = pauli_for_step(step);
    return coeffs.lam * kron(s, s);
}

double gate_time(double lam, int n) {
    if (lam == 0.0) throw std::invalid_argument("gate_time: lam must be nonzero");
    if (n < 0) throw std::invalid_argument("gate_time: n must be >= 0");
    return (2.0 * n + 1.0) * M_PI / (4.0 * lam);
}

SimulationComparison simulate_comparison(const CavityParams& params, StepId step,
                                         const ComplexMatrix& init, double t_max,
                                         int n_samples, double dt_request) {
    check_params(params);
    if (!(t_max > 0.0)) throw std::invalid_argument("simulate_comparison: t_max must be > 0");
    if (n_samples < 2) throw std::invalid_argument("simulate_comparison: n_samples must be >= 2");
    if (init.rows() != 4 || init.cols() != 4)
        throw std::invalid_argument("simulate_comparison: init must be 4x4 (two qubits)");

    const std::vector<Branch> branches = eigenbranches(init);
    const std::vector<double> grid = linspace(0.0, t_max, n_samples);
    const double dt = integration_step(max_detuning(params), dt_request);
    const Generator gen = build_generator(params);
    const EffectiveCoefficients coeffs = coefficients_for_step(step, params);

    // Full dynamics, one pure branch per task.
    std::vector<std::future<Trajectory>> futures;
    futures.reserve(branches.size());
    for (const Branch& br : branches) {
        futures.push_back(std::async(std::launch::async, [&gen, &grid, dt, &br, &params] {
            GeneratorApply apply = [&gen](double t, const ComplexVector& x, ComplexVector& o) {
                gen.apply(t, x, o);
            };
            return evolve_timedep(apply, embed_qubit_vector(br.state, params.n_ph), grid, dt);
        }));
    }

    SimulationComparison out;
    out.series.times = grid;
    out.series.observable = (step == StepId::Step3) ? ProbeBasis::SigmaX : ProbeBasis::SigmaZ;
    out.series.full_values.assign(grid.size(), 0.0);
    out.series.effective_values.assign(grid.size(), 0.0);
    out.max_norm_drift = 0.0;
    double sum_excited = 0.0, sum_photon = 0.0, sum_leak = 0.0;

    for (std::size_t b = 0; b < branches.size(); ++b) {
        Trajectory traj = futures[b].get();
        out.max_norm_drift = std::max(out.max_norm_drift, traj.max_norm_drift);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            Populations pop = analyze_state(traj.states[k], step, params.n_ph);
            out.series.full_values[k] += branches[b].weight * pop.observable;
            sum_excited += branches[b].weight * pop.excited;
            sum_photon += branches[b].weight * pop.photon;
            sum_leak += branches[b].weight * pop.outside_qubit_vacuum;
        }
    }
    out.mean_excited_population = sum_excited / double(grid.size());
    out.mean_photon_population = sum_photon / double(grid.size());
    out.mean_leakage = sum_leak / double(grid.size());

    // Effective dynamics: exact evolution under lam * sigma x sigma.
    const ComplexMatrix sigma2 = kron(pauli_for_step(step), pauli_for_step(step));
    const ComplexMatrix obs2 = kron(identity(2), probe_observable(step));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double angle = coeffs.lam * grid[k];
        const ComplexMatrix u = std::cos(angle) * identity(4) - kImag * std::sin(angle) * sigma2;
        double value = 0.0;
        for (const Branch& br : branches) {
            ComplexVector psi = u * br.state;
            value += br.weight * (psi.adjoint() * obs2 * psi)(0, 0).real();
        }
        out.series.effective_values[k] = value;
    }

    out.max_deviation = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        out.max_deviation = std::max(out.max_deviation,
                                     std::abs(out.series.full_values[k] -
                                              out.series.effective_values[k]));
    return out;
}

GateFidelityResult full_gate_fidelity(const CavityParams& params, StepId step, int n,
                                      double dt_request, Dynamics dynamics) {
    check_params(params);
    const EffectiveCoefficients coeffs = coefficients_for_step(step, params);
    const double t_star = gate_time(coeffs.lam, n);
    const ComplexMatrix target = build_bipartite_factors(step).first;

    GateFidelityResult out;
    out.gate_time = t_star;
    out.lambda_used = coeffs.lam;

    if (dynamics == Dynamics::Effective) {
        const ComplexMatrix u = matexp_unitary(effective_hamiltonian(step, coeffs), t_star);
        out.fidelity = gate_fidelity_phase_invariant(target, u);
        out.leakage = 0.0;
        out.outside_adiabatic_validity = false;
        return out;
    }

    const double dt = integration_step(max_detuning(params), dt_request);
    const Generator gen = build_generator(params);
    const std::vector<double> grid{t_star};

    std::vector<std::future<Trajectory>> futures;
    for (int col = 0; col < 4; ++col) {
        futures.push_back(std::async(std::launch::async, [&gen, &grid, dt, col, &params] {
            ComplexVector v4 = ComplexVector::Zero(4);
            v4(col) = 1.0;
            GeneratorApply apply = [&gen](double t, const ComplexVector& x, ComplexVector& o) {
                gen.apply(t, x, o);
            };
            return evolve_timedep(apply, embed_qubit_vector(v4, params.n_ph), grid, dt);
        }));
    }

    ComplexMatrix propagator(4, 4);
    double inside = 0.0;
    for (int col = 0; col < 4; ++col) {
        const Trajectory traj = futures[col].get();
        const ComplexVector& psi = traj.states.back();
        for (int b1 = 0; b1 < 2; ++b1)
            for (int b3 = 0; b3 < 2; ++b3)
                propagator(b1 * 2 + b3, col) = psi(state_index(b1, b3, 0, params.n_ph));
        inside += propagator.col(col).squaredNorm();
    }
    out.fidelity = std::abs((target.adjoint() * propagator).trace()) / 4.0;
    out.leakage = 1.0 - inside / 4.0;
    out.outside_adiabatic_validity = out.leakage > 0.05;
    return out;
}

}  // namespace bdsid
