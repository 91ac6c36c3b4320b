#pragma once

namespace mesoamp {

/// Occupation of a bosonic mode together with a flag marking arguments that
/// were clamped to the degeneracy cutoff.
struct BoseOccupancy {
    double value;
    bool clamped;
};

/// Arguments below this cutoff (in kT) are clamped before evaluating the
/// Bose-Einstein occupation, which diverges at zero.
inline constexpr double bose_argument_min = 1e-6;

/// Fermi-Dirac occupation 1/(exp(x - mu) + 1), overflow-safe for |x - mu|
/// up to several hundred kT. Throws std::domain_error on non-finite input.
[[nodiscard]] double fermi_dirac(double energy_kt, double mu_kt);

/// Bose-Einstein occupation 1/(exp(x) - 1) with clamping below
/// bose_argument_min. Throws std::domain_error on non-finite input.
[[nodiscard]] BoseOccupancy bose_einstein(double x_kt);

/// Relative residual |k_fwd/k_bwd - exp(-(e_to - e_from))| /
/// exp(-(e_to - e_from)) of the local detailed-balance relation for the
/// transition from -> to. Throws std::domain_error on non-positive rates.
[[nodiscard]] double detailed_balance_residual(double k_forward, double k_backward,
                                               double e_from_kt, double e_to_kt);

}
