#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blochobs/tolerances.hpp"
#include "blochobs/types.hpp"

namespace blochobs {

/// One term of the Fourier sum H(k) = sum_R exp(2 pi i k.R) H_R.
/// (H_R)_{ab} couples orbital b in cell R to orbital a in cell 0.
struct Hopping {
    LatticeVector r;
    CMatrix h;
};

/// Antiunitary time reversal Theta = u_theta o (complex conjugation) with the
/// frame reshuffling matrix epsilon of Phi(-k) = Theta Phi(k) epsilon.
struct TimeReversal {
    CMatrix u_theta;
    CMatrix epsilon;
};

/// The m x m block-diagonal normal form diag(J, ..., J), J = [[0, 1], [-1, 0]].
CMatrix symplectic_normal_form(int m);

/// Bloch Hamiltonian family with lattice and symmetry data.
///
/// Hopping data is a periodic-gauge Fourier series. A non-trivial tau
/// represents a non-periodic gauge: with L_j the principal logarithms of the
/// commuting unitaries tau_j, the model evaluates
///     H(k) = D(k) H_per(k) D(k)^dag,   D(k) = exp(i (k1 L_1 + k2 L_2)),
/// so that H(k + e_j) = tau_j H(k) tau_j^{-1}.
class BlochModel {
public:
    BlochModel(int n, int m, std::vector<Hopping> hoppings,
               Eigen::Matrix2d lattice = Eigen::Matrix2d::Identity(),
               std::optional<std::array<CMatrix, 2>> tau = std::nullopt,
               std::optional<TimeReversal> trs = std::nullopt);

    int bands() const noexcept { return n_; }
    int occupied() const noexcept { return m_; }
    const std::vector<Hopping>& hoppings() const noexcept { return hoppings_; }
    const Eigen::Matrix2d& lattice() const noexcept { return lattice_; }
    const std::optional<TimeReversal>& trs() const noexcept { return trs_; }
    bool periodic_gauge() const noexcept { return !tau_.has_value(); }

    /// tau_{e_j}, j in {0, 1}; identity in the periodic gauge.
    CMatrix tau_generator(int j) const;
    /// tau_lambda = tau_1^{l1} tau_2^{l2}.
    CMatrix tau(LatticeVector lambda) const;

    CMatrix hamiltonian(Momentum k) const;

    /// Theta applied columnwise to a frame: u_theta * conj(frame).
    CMatrix apply_theta(const CMatrix& frame) const;

    /// Checks every structural invariant; throws HermiticityViolation,
    /// TrsInconsistent or InvalidArgument on the first violation. With
    /// check_epsilon = false the reshuffling matrix is only shape-checked.
    void validate(bool check_epsilon = true) const;

    /// Same data with a different time-reversal block (used to inject faults).
    BlochModel with_trs(std::optional<TimeReversal> trs) const;

private:
    int n_;
    int m_;
    std::vector<Hopping> hoppings_;
    Eigen::Matrix2d lattice_;
    std::optional<std::array<CMatrix, 2>> tau_;
    std::array<CMatrix, 2> tau_log_;
    std::optional<TimeReversal> trs_;
};

// Built-in models. All are stored in the periodic gauge.

/// Two-band honeycomb model with nearest-neighbour t1, complex next-nearest
/// t2 exp(+-i phi) and sublattice mass +-M. Dirac points at (1/3, 1/3), (2/3, 2/3).
BlochModel haldane(double t1, double t2, double phi, double mass);

/// Four-band honeycomb model, basis (A up, A down, B up, B down): hopping t,
/// intrinsic spin-orbit lso, Rashba lr, staggered potential lv.
BlochModel kane_mele(double t, double lso, double lr, double lv);

/// Constant H = diag(-1 (m times), +1 (n - m times)); with trs the time reversal
/// is 1 (x) [[0, -1], [1, 0]], under which the standard basis is a Kramers frame.
BlochModel atomic_insulator(int n, int m, bool with_trs = false);

/// Two-band H = d(k).sigma with d = (Re f^p, Im f^p, mu + cos 2pi k1 + cos 2pi k2),
/// f = sin 2pi k1 + i s sin 2pi k2. The lower band has Chern number w for
/// w in [-2, 2] (p = |w|, mu = 1; w = 0 uses mu = 3).
BlochModel two_band_winding(int w);

/// d-vector of two_band_winding, for oracles that bypass the Hamiltonian.
Eigen::Vector3d two_band_winding_d(int w, Momentum k);

/// Hopping-file IO (JSON syntax). Complex matrices are {"re": rows, "im": rows}.
nlohmann::json complex_to_json(const CMatrix& m);
CMatrix complex_from_json(const nlohmann::json& obj, Eigen::Index rows, Eigen::Index cols,
                          const std::string& where);
BlochModel model_from_json(const nlohmann::json& doc, bool strict = true);
nlohmann::json model_to_json(const BlochModel& model);
BlochModel load_model(const std::filesystem::path& path, bool strict = true);

struct ProjectorSample {
    Momentum k;
    CMatrix p;                  // Fermi projector on the m lowest bands
    CMatrix states;             // n x m occupied eigenvectors
    double gap;                 // E_{m+1} - E_m
    RVector occupied_energies;
};

/// Throws GapClosed when E_{m+1} - E_m <= tol.gap.
ProjectorSample fermi_projector(const BlochModel& model, Momentum k, const Tolerances& tol = {});

struct SymmetryReport {
    int grid_n;
    double hermiticity_residual;           // max ||H(k) - H(k)^dag||
    double covariance_residual;            // (P2): max ||P(k+l) - tau P(k) tau^-1||
    std::optional<double> trs_residual;    // (P3): max ||P(-k) - Theta P(k) Theta^-1||
    std::optional<double> fermionic_residual;  // ||u conj(u) + 1||
    double threshold;
    bool pass;
};

SymmetryReport verify_symmetries(const BlochModel& model, int grid_n, const Tolerances& tol = {});

}  // namespace blochobs
