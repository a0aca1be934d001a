//! Matrix-exponential reference propagator on a truncated Fock space.
//!
//! The Hamiltonian is assembled term by term from the normally ordered
//! series
//!
//! ```text
//! H = ½ Σⱼ Ωⱼ σ₊ⱼ e^{-ηⱼ²/2 - iφⱼ} Σₙ (iηⱼ)^{2n+k} a†ⁿ a^{n+k} / (n!(n+k)!) + h.c.
//! ```
//!
//! by applying the ladder operators to Fock states directly. Nothing here
//! touches the coupling series or the closed-form amplitudes, so agreement
//! between the two is a genuine check. Time evolution uses the spectral
//! decomposition `H = V diag(E) V†`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coupling::{effective_rabi, LaserDrive, SidebandColor, SidebandSpec};
use crate::dynamics::{computational_labels, ConditionalDynamics, JointLabel, PulsePair, Spin, SpectrumFlags};
use crate::error::{Error, Result};

/// Joint basis `|n⟩|s₁⟩|s₂⟩` with `n ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSpace {
    pub n_max: u32,
    pub basis: Vec<JointLabel>,
}

impl TruncatedSpace {
    /// All bus states `0..=n_max`.
    pub fn new(n_max: u32) -> Self {
        let basis = (0..=n_max)
            .flat_map(|n| {
                [Spin::Ground, Spin::Excited].into_iter().flat_map(move |s1| {
                    [Spin::Ground, Spin::Excited]
                        .into_iter()
                        .map(move |s2| JointLabel::new(n, s1, s2))
                })
            })
            .collect();
        Self { n_max, basis }
    }

    /// The smallest full space that holds every sector reached from bus `m`.
    pub fn for_spec(spec: &SidebandSpec) -> Self {
        Self::new(spec.bus_occupation + 2 * spec.order)
    }

    /// Only the bus sectors `m`, `m+k`, `m+2k`.
    pub fn pruned(spec: &SidebandSpec) -> Self {
        let (m, k) = (spec.bus_occupation, spec.order);
        let mut space = Self::new(m + 2 * k);
        space.basis.retain(|l| l.bus == m || l.bus == m + k || l.bus == m + 2 * k);
        space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, label: JointLabel) -> Option<usize> {
        self.basis.iter().position(|l| *l == label)
    }
}

/// A dense Hermitian operator on a [`TruncatedSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    pub matrix: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// `max|H − H†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Diagonalizes once; the result evolves states to any time.
    pub fn spectral(&self) -> Result<SpectralPropagator> {
        let dim = self.matrix.nrows();
        let eig = SymmetricEigen::try_new(self.matrix.clone(), 1e-15, 10_000).ok_or_else(|| {
            Error::EigenFailure {
                dim,
                dump: format!("{:.6e}", self.matrix),
            }
        })?;
        Ok(SpectralPropagator {
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &DVector<Complex64>) -> f64 {
        psi.dotc(&(&self.matrix * psi)).re
    }
}

/// Eigenbasis of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    pub energies: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl SpectralPropagator {
    /// `exp(−iHt)|ψ₀⟩` in units with ħ = 1.
    pub fn evolve(&self, psi0: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let mut coeffs = self.vectors.adjoint() * psi0;
        for (c, &e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        &self.vectors * coeffs
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `⟨n| a†ˡ a^{l+k} |n+k⟩`, zero when `l > n`.
fn ladder_element(n: u32, l: u32, k: u32) -> f64 {
    if l > n {
        return 0.0;
    }
    // a^{l+k}|n+k⟩ = √((n+k)!/(n−l)!) |n−l⟩,  a†ˡ|n−l⟩ = √(n!/(n−l)!) |n⟩
    (factorial(n + k) / factorial(n - l)).sqrt() * (factorial(n) / factorial(n - l)).sqrt()
}

/// `⟨n, e| H_j |n+k, g⟩` for one ion (ħ = 1).
fn raising_element(drive: &LaserDrive, n: u32, k: u32) -> Complex64 {
    let eta = drive.lamb_dicke;
    let prefactor = 0.5 * drive.carrier_rabi * (-0.5 * eta * eta).exp();
    let i_eta = Complex64::new(0.0, eta);
    let series: Complex64 = (0..=n)
        .map(|l| i_eta.powu(2 * l + k) * ladder_element(n, l, k) / (factorial(l) * factorial(l + k)))
        .sum();
    prefactor * Complex64::from_polar(1.0, -drive.phase) * series
}

/// Builds the red-sideband effective Hamiltonian (ħ = 1) on `space`.
pub fn build_effective_hamiltonian(
    pulses: &PulsePair,
    spec: &SidebandSpec,
    space: &TruncatedSpace,
) -> Result<HermitianMatrix> {
    let (m, k) = (spec.bus_occupation, spec.order);
    if k == 0 {
        return Err(Error::InvalidOrder(k));
    }
    if space.n_max < m + 2 * k {
        return Err(Error::TruncationTooSmall {
            n_max: space.n_max,
            required: m + 2 * k,
        });
    }
    if spec.color == SidebandColor::Blue {
        return Err(Error::Unsupported(
            "the reference propagator models red sidebands; map blue tables with blue_sideband_map",
        ));
    }
    let dim = space.dim();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (ion, drive) in [(0usize, &pulses.first), (1usize, &pulses.second)] {
        for n in 0..=space.n_max.saturating_sub(k) {
            let element = raising_element(drive, n, k);
            for other in [Spin::Ground, Spin::Excited] {
                let (from, to) = if ion == 0 {
                    (
                        JointLabel::new(n + k, Spin::Ground, other),
                        JointLabel::new(n, Spin::Excited, other),
                    )
                } else {
                    (
                        JointLabel::new(n + k, other, Spin::Ground),
                        JointLabel::new(n, other, Spin::Excited),
                    )
                };
                if let (Some(i), Some(j)) = (space.index_of(to), space.index_of(from)) {
                    h[(i, j)] += element;
                    h[(j, i)] += element.conj();
                }
            }
        }
    }
    Ok(HermitianMatrix { matrix: h })
}

/// `exp(−iHt)|initial⟩`.
pub fn propagate_exact(
    h: &HermitianMatrix,
    space: &TruncatedSpace,
    t: f64,
    initial: JointLabel,
) -> Result<DVector<Complex64>> {
    let idx = space.index_of(initial).ok_or(Error::InvalidParameter {
        name: "initial",
        reason: format!("{initial} is outside the truncated space"),
    })?;
    let mut psi0 = DVector::<Complex64>::zeros(space.dim());
    psi0[idx] = Complex64::new(1.0, 0.0);
    Ok(h.spectral()?.evolve(&psi0, t))
}

/// Per-basis-state discrepancies between the closed form and the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    /// `(initial, basis state, |oracle − closed form|)`.
    pub entries: Vec<(JointLabel, JointLabel, f64)>,
    pub max_abs_error: f64,
    pub flags: SpectrumFlags,
}

/// Propagates every computational input with both routes and compares all
/// amplitudes over the full truncated space.
pub fn compare_to_closed_form(
    pulses: &PulsePair,
    spec: &SidebandSpec,
    t: f64,
) -> Result<DiscrepancyReport> {
    let space = TruncatedSpace::for_spec(spec);
    let h = build_effective_hamiltonian(pulses, spec, &space)?;
    let prop = h.spectral()?;
    let closed = ConditionalDynamics::new(pulses, spec)?;
    let table = closed.propagator(t);
    let mut entries = Vec::with_capacity(4 * space.dim());
    let mut max_abs_error: f64 = 0.0;
    for (initial, row) in computational_labels(spec.bus_occupation).into_iter().zip(&table.rows) {
        let mut psi0 = DVector::<Complex64>::zeros(space.dim());
        psi0[space.index_of(initial).expect("computational state in space")] = Complex64::new(1.0, 0.0);
        let psi = prop.evolve(&psi0, t);
        for (i, label) in space.basis.iter().enumerate() {
            let err = (psi[i] - row.amplitude(*label)).norm();
            max_abs_error = max_abs_error.max(err);
            entries.push((initial, *label, err));
        }
    }
    Ok(DiscrepancyReport {
        entries,
        max_abs_error,
        flags: table.flags,
    })
}

/// One randomized parameter set for the oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDraw {
    pub spec: SidebandSpec,
    pub pulses: PulsePair,
    /// Dimensionless time `Ω₁t`.
    pub t: f64,
}

impl OracleDraw {
    pub const CSV_HEADER: &'static str =
        "draw,k,m,eta1,eta2,ratio,phi1,phi2,t,max_abs_error,spectrum_degenerate,lower_frequency_zero";

    pub fn csv_row(&self, index: usize, report: &DiscrepancyReport) -> String {
        use crate::report::fmt_sig;
        let p = &self.pulses;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            index,
            self.spec.order,
            self.spec.bus_occupation,
            fmt_sig(p.first.lamb_dicke),
            fmt_sig(p.second.lamb_dicke),
            fmt_sig(p.second.carrier_rabi / p.first.carrier_rabi),
            fmt_sig(p.first.phase),
            fmt_sig(p.second.phase),
            fmt_sig(self.t),
            fmt_sig(report.max_abs_error),
            report.flags.spectrum_degenerate,
            report.flags.lower_frequency_vanishes,
        )
    }

    pub fn compare(&self) -> Result<DiscrepancyReport> {
        compare_to_closed_form(&self.pulses, &self.spec, self.t)
    }
}

/// Seeded draws: `k ∈ {1,2,3}`, `m < k`, `η ∈ [0.05, 3]`, `Ω₂/Ω₁ ∈ [0.2, 5]`,
/// `Ω₁t ∈ [0, 150]`, phases in `[0, 2π)`, with `Ω₁ = 1`.
pub fn random_draws(count: usize, seed: u64) -> Vec<OracleDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=3u32);
            let m = rng.gen_range(0..k);
            let eta1 = rng.gen_range(0.05..=3.0);
            let eta2 = rng.gen_range(0.05..=3.0);
            let ratio = rng.gen_range(0.2..=5.0);
            let phi1 = rng.gen_range(0.0..std::f64::consts::TAU);
            let phi2 = rng.gen_range(0.0..std::f64::consts::TAU);
            let t = rng.gen_range(0.0..=150.0);
            OracleDraw {
                spec: SidebandSpec::red(k, m).expect("m < k"),
                pulses: PulsePair::new(
                    LaserDrive::new(1.0, phi1, eta1).expect("valid drive"),
                    LaserDrive::new(ratio, phi2, eta2).expect("valid drive"),
                ),
                t,
            }
        })
        .collect()
}

/// Which degenerate corner a forced draw sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// `Δ = 0`: `β₁ = α₁`, `β₂ = −α₂` (or the mirrored signs).
    Splitting,
    /// `λ₋ = 0`: identical drives, so `α₁β₁ = α₂β₂`.
    LowerFrequency,
}

/// Positive `η` where `Ω_{m+k,k}(η) = target · Ω_{m,k}(η)`, by sign-change
/// bracketing on `(0, 4]` and bisection.
pub fn coupling_ratio_roots(m: u32, k: u32, target: f64) -> Vec<f64> {
    let defect = |eta: f64| {
        let d = LaserDrive {
            carrier_rabi: 1.0,
            phase: 0.0,
            lamb_dicke: eta,
        };
        let a = effective_rabi(&d, m, k).map(|c| c.reduced).unwrap_or(0.0);
        let b = effective_rabi(&d, m + k, k).map(|c| c.reduced).unwrap_or(0.0);
        // divide out the common η^k e^{-η²/2} to keep the defect O(1)
        let scale = eta.abs().powi(k as i32) * (-0.5 * eta * eta).exp();
        (b - target * a) / scale
    };
    crate::roots::bracket_roots(defect, 1e-3, 4.0, 4000, 1e-14)
}

/// Draws that sit exactly on a degenerate corner of the spectrum.
pub fn degenerate_draws(count: usize, seed: u64, kind: Degeneracy) -> Vec<OracleDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates: Vec<(u32, u32)> = (1..=3u32).flat_map(|k| (0..k).map(move |m| (k, m))).collect();
    let splitting: Vec<(u32, u32, Vec<f64>, Vec<f64>)> = candidates
        .iter()
        .map(|&(k, m)| (k, m, coupling_ratio_roots(m, k, 1.0), coupling_ratio_roots(m, k, -1.0)))
        .filter(|(_, _, plus, minus)| !plus.is_empty() && !minus.is_empty())
        .collect();
    (0..count)
        .map(|_| {
            let phi1 = rng.gen_range(0.0..std::f64::consts::TAU);
            let phi2 = rng.gen_range(0.0..std::f64::consts::TAU);
            let t = rng.gen_range(0.0..=150.0);
            let ratio = rng.gen_range(0.2..=5.0);
            let (spec, eta1, eta2, ratio) = match kind {
                Degeneracy::Splitting => {
                    let (k, m, plus, minus) = &splitting[rng.gen_range(0..splitting.len())];
                    let e_plus = plus[rng.gen_range(0..plus.len())];
                    let e_minus = minus[rng.gen_range(0..minus.len())];
                    let (eta1, eta2) = if rng.gen_bool(0.5) { (e_plus, e_minus) } else { (e_minus, e_plus) };
                    (SidebandSpec::red(*k, *m).expect("m < k"), eta1, eta2, ratio)
                }
                Degeneracy::LowerFrequency => {
                    let (k, m) = candidates[rng.gen_range(0..candidates.len())];
                    let eta = rng.gen_range(0.05..=3.0);
                    (SidebandSpec::red(k, m).expect("m < k"), eta, eta, 1.0)
                }
            };
            OracleDraw {
                spec,
                pulses: PulsePair::new(
                    LaserDrive::new(1.0, phi1, eta1).expect("valid drive"),
                    LaserDrive::new(ratio, phi2, eta2).expect("valid drive"),
                ),
                t,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pulses() -> PulsePair {
        PulsePair::new(
            LaserDrive::new(1.0, 0.4, 1.2).unwrap(),
            LaserDrive::new(2.3, -0.7, 0.6).unwrap(),
        )
    }

    #[test]
    fn basis_layout() {
        let space = TruncatedSpace::new(2);
        assert_eq!(space.dim(), 12);
        assert_eq!(space.basis[5], JointLabel::new(1, Spin::Ground, Spin::Excited));
        let spec = SidebandSpec::red(2, 1).unwrap();
        assert_eq!(TruncatedSpace::for_spec(&spec).n_max, 5);
        assert_eq!(TruncatedSpace::pruned(&spec).dim(), 12);
    }

    #[test]
    fn no_motional_coupling_gives_zero_matrix() {
        let p = PulsePair::symmetric(1.0, 2.0, 0.0).unwrap();
        let spec = SidebandSpec::red(1, 0).unwrap();
        let h = build_effective_hamiltonian(&p, &spec, &TruncatedSpace::for_spec(&spec)).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn element_matches_documented_action() {
        // H|m⟩|e₁⟩|g₂⟩ = (−i)^k e^{iφ₁} α₁ |m+k⟩|g₁⟩|g₂⟩
        for (k, m) in [(1, 0), (2, 1), (3, 2)] {
            let spec = SidebandSpec::red(k, m).unwrap();
            let space = TruncatedSpace::for_spec(&spec);
            let p = pulses();
            let h = build_effective_hamiltonian(&p, &spec, &space).unwrap();
            let from = space.index_of(JointLabel::new(m, Spin::Excited, Spin::Ground)).unwrap();
            let to = space.index_of(JointLabel::new(m + k, Spin::Ground, Spin::Ground)).unwrap();
            let alpha = effective_rabi(&p.first, m, k).unwrap().reduced;
            let expected = crate::coupling::neg_i_pow(k) * Complex64::from_polar(1.0, p.first.phase) * alpha;
            assert!((h.matrix[(to, from)] - expected).norm() < 1e-15, "k={k} m={m}");
        }
    }

    #[test]
    fn hermitian_by_construction() {
        let spec = SidebandSpec::red(3, 1).unwrap();
        let h = build_effective_hamiltonian(&pulses(), &spec, &TruncatedSpace::new(9)).unwrap();
        assert!(h.hermiticity_residual() <= 1e-14 * h.max_abs());
    }

    #[test]
    fn rejects_small_truncation_and_blue() {
        let spec = SidebandSpec::red(2, 1).unwrap();
        assert!(matches!(
            build_effective_hamiltonian(&pulses(), &spec, &TruncatedSpace::new(4)),
            Err(Error::TruncationTooSmall { n_max: 4, required: 5 })
        ));
        let blue = SidebandSpec::new(2, SidebandColor::Blue, 1).unwrap();
        assert!(build_effective_hamiltonian(&pulses(), &blue, &TruncatedSpace::new(5)).is_err());
    }

    #[test]
    fn trivial_propagations() {
        let spec = SidebandSpec::red(1, 0).unwrap();
        let space = TruncatedSpace::for_spec(&spec);
        let ee = JointLabel::new(0, Spin::Excited, Spin::Excited);
        let h = build_effective_hamiltonian(&pulses(), &spec, &space).unwrap();
        let psi = propagate_exact(&h, &space, 0.0, ee).unwrap();
        let idx = space.index_of(ee).unwrap();
        assert!((psi[idx] - 1.0).norm() < 1e-14);

        let zero = HermitianMatrix {
            matrix: DMatrix::zeros(space.dim(), space.dim()),
        };
        let psi = propagate_exact(&zero, &space, 17.0, ee).unwrap();
        assert_eq!(psi[idx], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unitarity_and_energy_conservation() {
        let spec = SidebandSpec::red(2, 0).unwrap();
        let space = TruncatedSpace::for_spec(&spec);
        let h = build_effective_hamiltonian(&pulses(), &spec, &space).unwrap();
        let prop = h.spectral().unwrap();
        let mut psi0 = DVector::<Complex64>::zeros(space.dim());
        psi0[space.index_of(JointLabel::new(0, Spin::Excited, Spin::Excited)).unwrap()] = Complex64::new(0.6, 0.0);
        psi0[space.index_of(JointLabel::new(0, Spin::Excited, Spin::Ground)).unwrap()] = Complex64::new(0.0, 0.8);
        let e0 = h.expectation(&psi0);
        for t in [0.5, 3.0, 40.0, 150.0] {
            let psi = prop.evolve(&psi0, t);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            assert!((h.expectation(&psi) - e0).abs() <= 1e-12 * h.max_abs() * space.dim() as f64);
        }
    }

    #[test]
    fn larger_truncation_changes_nothing() {
        let spec = SidebandSpec::red(2, 1).unwrap();
        let ee = JointLabel::new(1, Spin::Excited, Spin::Excited);
        let small = TruncatedSpace::for_spec(&spec);
        let big = TruncatedSpace::new(small.n_max + 4);
        let pruned = TruncatedSpace::pruned(&spec);
        let t = 9.1;
        let psi_small = propagate_exact(&build_effective_hamiltonian(&pulses(), &spec, &small).unwrap(), &small, t, ee).unwrap();
        let psi_big = propagate_exact(&build_effective_hamiltonian(&pulses(), &spec, &big).unwrap(), &big, t, ee).unwrap();
        let psi_pruned =
            propagate_exact(&build_effective_hamiltonian(&pulses(), &spec, &pruned).unwrap(), &pruned, t, ee).unwrap();
        for (i, label) in small.basis.iter().enumerate() {
            assert!((psi_small[i] - psi_big[big.index_of(*label).unwrap()]).norm() < 1e-14);
            if let Some(j) = pruned.index_of(*label) {
                assert!((psi_small[i] - psi_pruned[j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn comparison_at_zero_time_is_exact() {
        let spec = SidebandSpec::red(3, 2).unwrap();
        let report = compare_to_closed_form(&pulses(), &spec, 0.0).unwrap();
        assert!(report.max_abs_error < 1e-14);
        assert_eq!(report.entries.len(), 4 * TruncatedSpace::for_spec(&spec).dim());
    }

    #[test]
    fn draws_are_reproducible() {
        assert_eq!(random_draws(5, 42), random_draws(5, 42));
        assert_ne!(random_draws(5, 42), random_draws(5, 43));
        for d in random_draws(50, 0) {
            assert!(d.spec.bus_occupation < d.spec.order);
            assert!((0.0..=150.0).contains(&d.t));
        }
    }

    #[test]
    fn ratio_roots_first_sideband() {
        // Ω_{1,1}/Ω_{0,1} = √2 (1 − η²/2)
        let plus = coupling_ratio_roots(0, 1, 1.0);
        let minus = coupling_ratio_roots(0, 1, -1.0);
        assert_eq!(plus.len(), 1);
        assert_eq!(minus.len(), 1);
        assert!((plus[0] - (2.0 - 2f64.sqrt()).sqrt()).abs() < 1e-12);
        assert!((minus[0] - (2.0 + 2f64.sqrt()).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn forced_draws_are_degenerate() {
        for d in degenerate_draws(10, 7, Degeneracy::Splitting) {
            let c = crate::dynamics::derive_couplings(&d.pulses, &d.spec).unwrap();
            assert!(c.delta < 1e-9 * c.lambda_sum, "{d:?} delta={}", c.delta);
        }
        for d in degenerate_draws(10, 7, Degeneracy::LowerFrequency) {
            let c = crate::dynamics::derive_couplings(&d.pulses, &d.spec).unwrap();
            assert!(c.lower_frequency_vanishes());
        }
    }
}
