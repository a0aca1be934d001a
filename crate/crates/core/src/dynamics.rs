//! Closed-form conditional evolution of two ions sharing one bus mode.
//!
//! With the bus prepared in `|m⟩`, `m < k`, the effective Hamiltonian leaves
//! four small invariant subspaces, one per computational input:
//!
//! | input        | reachable states                                            |
//! |--------------|-------------------------------------------------------------|
//! | `|m,g,g⟩`    | itself (dark)                                               |
//! | `|m,g,e⟩`    | `|m+k,g,g⟩`, `|m,g,e⟩`, `|m,e,g⟩`                           |
//! | `|m,e,g⟩`    | `|m+k,g,g⟩`, `|m,g,e⟩`, `|m,e,g⟩`                           |
//! | `|m,e,e⟩`    | `|m+2k,g,g⟩`, `|m+k,e,g⟩`, `|m+k,g,e⟩`, `|m,e,e⟩`           |
//!
//! Writing `αⱼ` for the signed coupling of ion `j` between `|m⟩|e⟩` and
//! `|m+k⟩|g⟩` and `βⱼ` for the one between `|m+k⟩|e⟩` and `|m+2k⟩|g⟩`, the
//! single-excitation block oscillates at `χ = √(α₁²+α₂²)` and the
//! double-excitation block at the two frequencies `λ±`, the square roots of
//! the eigenvalues of
//!
//! ```text
//! M = [ β₁²+β₂²     ρ     ]      ρ = α₁β₂ + α₂β₁
//!     [    ρ     α₁²+α₂²  ]
//! ```
//!
//! so `Λ = tr M`, `Δ = λ₊² − λ₋² = √((α₁²+α₂²−β₁²−β₂²)² + 4ρ²)` and
//! `λ₊λ₋ = |α₁β₁ − α₂β₂|`. These are exactly `(Λ ± Δ)/2` with
//! `Δ² = Λ² − 4(α₁β₁−α₂β₂)²`, just evaluated without cancellation.
//!
//! The double-excitation amplitudes are evaluated through divided
//! differences of `cos(λt)` and `sin(λt)/λ`, which stay finite at `λ₋ = 0`
//! (equal drives) and at `Δ = 0`; the textbook expressions with `1/ζ±` and
//! `1/λ₋` factors are algebraically identical wherever they are defined.

use num_complex::Complex64;

use crate::coupling::{effective_rabi, neg_i_pow, LaserDrive, SidebandSpec};
use crate::error::{Error, Result};

/// `Δ < DEGENERATE_SPLITTING · Λ` marks a degenerate double-excitation spectrum.
pub const DEGENERATE_SPLITTING: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Ground,
    Excited,
}

impl Spin {
    pub fn flipped(self) -> Self {
        match self {
            Spin::Ground => Spin::Excited,
            Spin::Excited => Spin::Ground,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Spin::Ground => 'g',
            Spin::Excited => 'e',
        }
    }
}

/// A joint basis ket `|n⟩|s₁⟩|s₂⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointLabel {
    pub bus: u32,
    pub spin1: Spin,
    pub spin2: Spin,
}

impl JointLabel {
    pub const fn new(bus: u32, spin1: Spin, spin2: Spin) -> Self {
        Self { bus, spin1, spin2 }
    }

    pub fn spins(&self) -> String {
        format!("{}{}", self.spin1.symbol(), self.spin2.symbol())
    }
}

impl std::fmt::Display for JointLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|{},{},{}>", self.bus, self.spin1.symbol(), self.spin2.symbol())
    }
}

use Spin::{Excited as E, Ground as G};

/// The two synchronous drives, one per ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePair {
    pub first: LaserDrive,
    pub second: LaserDrive,
}

impl PulsePair {
    pub fn new(first: LaserDrive, second: LaserDrive) -> Self {
        Self { first, second }
    }

    /// Both ions share `η`, the first drive has Rabi frequency `rabi1` and the
    /// second `ratio · rabi1`.
    pub fn symmetric(rabi1: f64, ratio: f64, eta: f64) -> Result<Self> {
        Ok(Self {
            first: LaserDrive::new(rabi1, 0.0, eta)?,
            second: LaserDrive::new(ratio * rabi1, 0.0, eta)?,
        })
    }

    pub fn phases(&self) -> [f64; 2] {
        [self.first.phase, self.second.phase]
    }

    /// Multiplies both Rabi frequencies by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = *self;
        out.first.carrier_rabi *= s;
        out.second.carrier_rabi *= s;
        out
    }
}

/// Effective couplings and the spectral quantities derived from them.
///
/// `alpha` and `beta` are the signed reduced couplings; `gamma` in some
/// write-ups is the same quantity as `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub chi: f64,
    pub rho: f64,
    pub lambda_sum: f64,
    pub delta: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
}

impl CouplingSet {
    pub fn from_couplings(alpha: [f64; 2], beta: [f64; 2]) -> Self {
        let chi2 = alpha[0] * alpha[0] + alpha[1] * alpha[1];
        let b2 = beta[0] * beta[0] + beta[1] * beta[1];
        let rho = alpha[0] * beta[1] + alpha[1] * beta[0];
        let det = (alpha[0] * beta[0] - alpha[1] * beta[1]).abs();
        let lambda_sum = chi2 + b2;
        let delta = (chi2 - b2).hypot(2.0 * rho);
        let lambda_plus = (0.5 * (lambda_sum + delta)).sqrt();
        let lambda_minus = if lambda_plus > 0.0 { det / lambda_plus } else { 0.0 };
        // ζ± = ((B² − χ²) ± Δ)/2 with ζ₊ζ₋ = −ρ²; take the non-cancelling one.
        let half_gap = 0.5 * (b2 - chi2);
        let (zeta_plus, zeta_minus) = if half_gap >= 0.0 {
            let zp = half_gap + 0.5 * delta;
            (zp, if zp > 0.0 { -rho * rho / zp } else { 0.0 })
        } else {
            let zm = half_gap - 0.5 * delta;
            (if zm < 0.0 { -rho * rho / zm } else { 0.0 }, zm)
        };
        Self {
            alpha,
            beta,
            chi: chi2.sqrt(),
            rho,
            lambda_sum,
            delta,
            lambda_plus,
            lambda_minus,
            zeta_plus,
            zeta_minus,
        }
    }

    /// `(α₁²+α₂²+β₁²+β₂²)`-relative test for `Δ ≈ 0`.
    pub fn spectrum_degenerate(&self) -> bool {
        self.delta <= DEGENERATE_SPLITTING * self.lambda_sum
    }

    /// `λ₋ ≈ 0`, reached when `α₁β₁ = α₂β₂` (for instance equal drives).
    pub fn lower_frequency_vanishes(&self) -> bool {
        self.lambda_minus <= DEGENERATE_SPLITTING * self.lambda_plus
    }

    pub fn flags(&self) -> SpectrumFlags {
        SpectrumFlags {
            single_excitation_dark: self.chi == 0.0,
            spectrum_degenerate: self.spectrum_degenerate(),
            lower_frequency_vanishes: self.lower_frequency_vanishes(),
        }
    }
}

/// Which limiting forms of the closed-form amplitudes are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpectrumFlags {
    /// `χ = 0`: both first-sector couplings vanish, single excitations are frozen.
    pub single_excitation_dark: bool,
    /// `Δ ≈ 0`.
    pub spectrum_degenerate: bool,
    /// `λ₋ ≈ 0`.
    pub lower_frequency_vanishes: bool,
}

/// Computes `α` and `β` for both ions and the spectral quantities.
pub fn derive_couplings(pulses: &PulsePair, spec: &SidebandSpec) -> Result<CouplingSet> {
    let spec = SidebandSpec::new(spec.order, spec.color, spec.bus_occupation)?;
    let (m, k) = (spec.bus_occupation, spec.order);
    let alpha = [
        effective_rabi(&pulses.first, m, k)?.reduced,
        effective_rabi(&pulses.second, m, k)?.reduced,
    ];
    let beta = [
        effective_rabi(&pulses.first, m + k, k)?.reduced,
        effective_rabi(&pulses.second, m + k, k)?.reduced,
    ];
    Ok(CouplingSet::from_couplings(alpha, beta))
}

/// The state evolved from one basis input, listed over its invariant subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeRow {
    pub initial: JointLabel,
    pub entries: Vec<(JointLabel, Complex64)>,
}

impl AmplitudeRow {
    pub fn amplitude(&self, label: JointLabel) -> Complex64 {
        self.entries
            .iter()
            .find(|(l, _)| *l == label)
            .map_or(Complex64::new(0.0, 0.0), |(_, a)| *a)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩` over the joint basis.
    pub fn inner(&self, other: &AmplitudeRow) -> Complex64 {
        self.entries
            .iter()
            .map(|(l, a)| a.conj() * other.amplitude(*l))
            .sum()
    }

    /// Population left in bus state `|n⟩`.
    pub fn bus_population(&self, n: u32) -> f64 {
        self.entries
            .iter()
            .filter(|(l, _)| l.bus == n)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Evolution of all four computational inputs at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalAmplitudes {
    /// Rows for `|m,g,g⟩`, `|m,g,e⟩`, `|m,e,g⟩`, `|m,e,e⟩` in that order.
    pub rows: [AmplitudeRow; 4],
    pub flags: SpectrumFlags,
}

impl ConditionalAmplitudes {
    pub fn row(&self, initial: JointLabel) -> Option<&AmplitudeRow> {
        self.rows.iter().find(|r| r.initial == initial)
    }

    /// Largest entry of `|G − I|`, where `G` is the Gram matrix of the rows.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in self.rows.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }

    /// 4×4 block `⟨m,s'|U|m,s⟩` on the computational states, row-major over
    /// `gg, ge, eg, ee`.
    pub fn spin_block(&self, m: u32) -> [[Complex64; 4]; 4] {
        let labels = computational_labels(m);
        let mut block = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (col, row) in self.rows.iter().enumerate() {
            for (r, label) in labels.iter().enumerate() {
                block[r][col] = row.amplitude(*label);
            }
        }
        block
    }
}

pub fn computational_labels(m: u32) -> [JointLabel; 4] {
    [
        JointLabel::new(m, G, G),
        JointLabel::new(m, G, E),
        JointLabel::new(m, E, G),
        JointLabel::new(m, E, E),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleExcitation {
    /// Initial `|m,g,e⟩`, amplitudes `B₁, B₂, B₃`.
    SecondExcited,
    /// Initial `|m,e,g⟩`, amplitudes `C₁, C₂, C₃`.
    FirstExcited,
}

/// `sin(x)/x` with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// `sin(λt)/λ`, equal to `t` at `λ = 0`.
fn sin_over(lambda: f64, t: f64) -> f64 {
    t * sinc(lambda * t)
}

/// `(cos(χt) − 1)/χ²`.
fn cos_minus_one_over(chi: f64, t: f64) -> f64 {
    let s = sinc(0.5 * chi * t);
    -0.5 * t * t * s * s
}

fn cis(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// Closed-form propagator for fixed couplings, phases, order and bus state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalDynamics {
    pub couplings: CouplingSet,
    pub phases: [f64; 2],
    pub order: u32,
    pub bus: u32,
}

impl ConditionalDynamics {
    pub fn new(pulses: &PulsePair, spec: &SidebandSpec) -> Result<Self> {
        Ok(Self {
            couplings: derive_couplings(pulses, spec)?,
            phases: pulses.phases(),
            order: spec.order,
            bus: spec.bus_occupation,
        })
    }

    /// `|m,g,g⟩` is annihilated by the Hamiltonian and never moves.
    pub fn amplitudes_gg(&self, _t: f64) -> AmplitudeRow {
        let initial = JointLabel::new(self.bus, G, G);
        AmplitudeRow {
            initial,
            entries: vec![(initial, Complex64::new(1.0, 0.0))],
        }
    }

    /// Evolution of `|m,g,e⟩` (`B`) or `|m,e,g⟩` (`C`), listed over
    /// `|m+k,g,g⟩, |m,g,e⟩, |m,e,g⟩`.
    pub fn amplitudes_single_excitation(&self, t: f64, which: SingleExcitation) -> AmplitudeRow {
        let c = &self.couplings;
        let (m, k) = (self.bus, self.order);
        let [a1, a2] = c.alpha;
        let [phi1, phi2] = self.phases;
        let lead = neg_i_pow(k + 1);
        let s = sin_over(c.chi, t);
        let w = cos_minus_one_over(c.chi, t);
        let top = JointLabel::new(m + k, G, G);
        let ge = JointLabel::new(m, G, E);
        let eg = JointLabel::new(m, E, G);
        match which {
            SingleExcitation::SecondExcited => AmplitudeRow {
                initial: ge,
                entries: vec![
                    (top, lead * cis(phi2) * (a2 * s)),
                    (ge, Complex64::new(1.0 + a2 * a2 * w, 0.0)),
                    (eg, cis(-(phi1 - phi2)) * (a1 * a2 * w)),
                ],
            },
            SingleExcitation::FirstExcited => AmplitudeRow {
                initial: eg,
                entries: vec![
                    (top, lead * cis(phi1) * (a1 * s)),
                    (ge, cis(phi1 - phi2) * (a1 * a2 * w)),
                    (eg, Complex64::new(1.0 + a1 * a1 * w, 0.0)),
                ],
            },
        }
    }

    /// Evolution of `|m,e,e⟩` listed over `|m+2k,g,g⟩, |m+k,e,g⟩, |m+k,g,e⟩, |m,e,e⟩`.
    pub fn amplitudes_double_excitation(&self, t: f64) -> AmplitudeRow {
        let c = &self.couplings;
        let (m, k) = (self.bus, self.order);
        let [a1, a2] = c.alpha;
        let [b1, b2] = c.beta;
        let [phi1, phi2] = self.phases;
        let labels = [
            JointLabel::new(m + 2 * k, G, G),
            JointLabel::new(m + k, E, G),
            JointLabel::new(m + k, G, E),
            JointLabel::new(m, E, E),
        ];
        if c.lambda_plus == 0.0 {
            let zero = Complex64::new(0.0, 0.0);
            return AmplitudeRow {
                initial: labels[3],
                entries: vec![
                    (labels[0], zero),
                    (labels[1], zero),
                    (labels[2], zero),
                    (labels[3], Complex64::new(1.0, 0.0)),
                ],
            };
        }

        let (lp, lm) = (c.lambda_plus, c.lambda_minus);
        let sum = lp + lm;
        let diff = c.delta / sum;
        let mid = 0.5 * sum;
        // (cos λ₋t − cos λ₊t)/Δ
        let cos_dd = 0.5 * t * t * sinc(mid * t) * sinc(0.5 * diff * t);
        // (sin(λ₊t)/λ₊ − sin(λ₋t)/λ₋)/Δ
        let sin_dd = sin_over_divided_difference(lm, lp, t) / sum;
        let sin_mean = 0.5 * (sin_over(lp, t) + sin_over(lm, t));
        let cos_mean = 0.5 * ((lp * t).cos() + (lm * t).cos());
        let half_gap = 0.5 * (c.beta[0].powi(2) + c.beta[1].powi(2) - c.chi * c.chi);

        let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
        let d1 = cis(phi1 + phi2) * (-sign_k * c.rho * cos_dd);
        let lead = neg_i_pow(k + 1);
        let d2 = lead * cis(phi2) * ((b1 * c.rho - a2 * half_gap) * sin_dd + a2 * sin_mean);
        let d3 = lead * cis(phi1) * ((b2 * c.rho - a1 * half_gap) * sin_dd + a1 * sin_mean);
        let d4 = cos_mean + half_gap * cos_dd;
        AmplitudeRow {
            initial: labels[3],
            entries: vec![
                (labels[0], d1),
                (labels[1], d2),
                (labels[2], d3),
                (labels[3], Complex64::new(d4, 0.0)),
            ],
        }
    }

    /// All four conditional rows at time `t`.
    pub fn propagator(&self, t: f64) -> ConditionalAmplitudes {
        ConditionalAmplitudes {
            rows: [
                self.amplitudes_gg(t),
                self.amplitudes_single_excitation(t, SingleExcitation::SecondExcited),
                self.amplitudes_single_excitation(t, SingleExcitation::FirstExcited),
                self.amplitudes_double_excitation(t),
            ],
            flags: self.couplings.flags(),
        }
    }
}

/// `(f(b) − f(a))/(b − a)` for `f(λ) = sin(λt)/λ`, `0 ≤ a ≤ b`, `b > 0`.
fn sin_over_divided_difference(a: f64, b: f64, t: f64) -> f64 {
    let delta = b - a;
    if delta > 0.25 * b {
        return (sin_over(b, t) - sin_over(a, t)) / delta;
    }
    // a sin(bt) − b sin(at) = 2a cos(λ̄t) sin(δt/2) − δ sin(at)
    let mid = 0.5 * (a + b);
    (a * t * (mid * t).cos() * sinc(0.5 * delta * t) - (a * t).sin()) / (a * b)
}

/// Builds the full four-row table for a red-sideband spec.
pub fn conditional_propagator(
    pulses: &PulsePair,
    spec: &SidebandSpec,
    t: f64,
) -> Result<ConditionalAmplitudes> {
    if !(t >= 0.0) {
        return Err(crate::error::invalid("t", "time must be non-negative"));
    }
    Ok(ConditionalDynamics::new(pulses, spec)?.propagator(t))
}

/// Relabels a red-sideband table as the corresponding blue-sideband one:
/// every `|e⟩` becomes `|g⟩` and vice versa, bus numbers are kept so that
/// the `+k`, `+2k` offsets become phonon excitations, and amplitudes are
/// unchanged. Applying the map twice restores the input.
pub fn blue_sideband_map(table: &ConditionalAmplitudes, m: u32) -> Result<ConditionalAmplitudes> {
    let flip = |l: JointLabel| -> Result<JointLabel> {
        if l.bus < m {
            return Err(Error::BusBelowOccupation { m, bus: l.bus });
        }
        Ok(JointLabel::new(l.bus, l.spin1.flipped(), l.spin2.flipped()))
    };
    let mut rows = Vec::with_capacity(4);
    for row in &table.rows {
        let entries = row
            .entries
            .iter()
            .map(|(l, a)| flip(*l).map(|l| (l, *a)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(AmplitudeRow {
            initial: flip(row.initial)?,
            entries,
        });
    }
    rows.sort_by_key(|r| (r.initial.spin1, r.initial.spin2));
    let rows: [AmplitudeRow; 4] = rows.try_into().expect("four rows");
    Ok(ConditionalAmplitudes {
        rows,
        flags: table.flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ConditionalDynamics {
        let pulses = PulsePair::new(
            LaserDrive::new(1.0, 0.3, 0.9).unwrap(),
            LaserDrive::new(1.7, -1.1, 2.1).unwrap(),
        );
        ConditionalDynamics::new(&pulses, &SidebandSpec::red(2, 1).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_degenerate_couplings() {
        let a = 0.7;
        let c = CouplingSet::from_couplings([a, a], [a, a]);
        assert!((c.chi - 2f64.sqrt() * a).abs() < 1e-15);
        assert!((c.rho - 2.0 * a * a).abs() < 1e-15);
        assert!((c.lambda_sum - 4.0 * a * a).abs() < 1e-15);
        assert!((c.delta - 4.0 * a * a).abs() < 1e-15);
        assert!((c.lambda_plus - 2.0 * a).abs() < 1e-15);
        assert_eq!(c.lambda_minus, 0.0);
        assert!(c.lower_frequency_vanishes());
        assert!(!c.spectrum_degenerate());
    }

    #[test]
    fn single_ion_reduction() {
        let (a, b) = (0.4, 0.9);
        let c = CouplingSet::from_couplings([a, 0.0], [b, 0.0]);
        assert_eq!(c.chi, a);
        assert_eq!(c.rho, 0.0);
        assert!((c.delta - (a * a - b * b).abs()).abs() < 1e-15);
        assert!((c.zeta_plus - c.zeta_minus - c.delta).abs() < 1e-15);
    }

    #[test]
    fn zeta_gap_is_delta() {
        let c = sample().couplings;
        assert!((c.zeta_plus - c.zeta_minus - c.delta).abs() < 1e-14);
        assert!((c.zeta_plus * c.zeta_minus + c.rho * c.rho).abs() < 1e-14);
        assert!(c.lambda_plus >= c.lambda_minus);
        let d2 = c.lambda_sum.powi(2)
            - 4.0 * (c.alpha[0] * c.beta[0] - c.alpha[1] * c.beta[1]).powi(2);
        assert!((c.delta * c.delta - d2).abs() < 1e-13);
    }

    #[test]
    fn ground_state_is_dark() {
        let d = sample();
        for t in [0.0, 1.3, 1e6 / d.couplings.chi] {
            let row = d.amplitudes_gg(t);
            assert_eq!(row.entries, vec![(JointLabel::new(1, G, G), Complex64::new(1.0, 0.0))]);
        }
    }

    #[test]
    fn identity_at_zero() {
        let table = sample().propagator(0.0);
        for row in &table.rows {
            assert_eq!(row.amplitude(row.initial), Complex64::new(1.0, 0.0));
            assert!((row.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_excitation_full_revival() {
        let d = sample();
        let t = 2.0 * std::f64::consts::PI / d.couplings.chi;
        let row = d.amplitudes_single_excitation(t, SingleExcitation::SecondExcited);
        assert!(row.entries[0].1.norm() < 1e-14);
        assert!((row.entries[1].1 - 1.0).norm() < 1e-14);
        assert!(row.entries[2].1.norm() < 1e-14);
    }

    #[test]
    fn dark_single_excitation_block() {
        let mut d = sample();
        d.couplings = CouplingSet::from_couplings([0.0, 0.0], [0.3, 0.2]);
        assert!(d.couplings.flags().single_excitation_dark);
        let row = d.amplitudes_single_excitation(4.0, SingleExcitation::FirstExcited);
        assert_eq!(row.amplitude(JointLabel::new(1, E, G)), Complex64::new(1.0, 0.0));
        assert_eq!(row.norm_sqr(), 1.0);
    }

    #[test]
    fn double_excitation_matches_textbook_form() {
        let d = sample();
        let c = d.couplings;
        let t = 3.7;
        let row = d.amplitudes_double_excitation(t);
        let (p, q) = ((c.lambda_plus * t).cos(), (c.lambda_minus * t).cos());
        let d4 = (c.zeta_plus * q - c.zeta_minus * p) / c.delta;
        let d1 = c.rho / c.delta * (p - q);
        assert!((row.entries[3].1.re - d4).abs() < 1e-13);
        let phase = cis(d.phases[0] + d.phases[1]);
        assert!((row.entries[0].1 - phase * d1).norm() < 1e-13);
        assert!((row.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn all_zero_couplings_freeze_everything() {
        let d = ConditionalDynamics {
            couplings: CouplingSet::from_couplings([0.0; 2], [0.0; 2]),
            phases: [0.0; 2],
            order: 1,
            bus: 0,
        };
        let table = d.propagator(3.0);
        for row in &table.rows {
            assert_eq!(row.amplitude(row.initial), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn divided_difference_branches_agree() {
        let t = 7.3;
        for &(a, b) in &[(0.9, 1.0), (0.99, 1.0), (0.7, 0.9)] {
            let direct = (sin_over(b, t) - sin_over(a, t)) / (b - a);
            let stable = sin_over_divided_difference(a, b, t);
            assert!((direct - stable).abs() < 1e-12, "{a} {b}: {direct} vs {stable}");
        }
        // coincident limit equals d/dλ [sin(λt)/λ] = (λt cos λt − sin λt)/λ²
        let l: f64 = 1.1;
        let deriv = (l * t * (l * t).cos() - (l * t).sin()) / (l * l);
        assert!((sin_over_divided_difference(l, l, t) - deriv).abs() < 1e-13);
    }

    #[test]
    fn blue_map_is_an_involution() {
        let table = sample().propagator(2.2);
        let blue = blue_sideband_map(&table, 1).unwrap();
        // red |m,e,e⟩ row becomes the blue |m,g,g⟩ row with excitations upward
        let ee = &table.rows[3];
        let gg = blue.row(JointLabel::new(1, G, G)).unwrap();
        assert_eq!(gg.amplitude(JointLabel::new(5, E, E)), ee.amplitude(JointLabel::new(5, G, G)));
        assert_eq!(gg.amplitude(JointLabel::new(3, G, E)), ee.amplitude(JointLabel::new(3, E, G)));
        let back = blue_sideband_map(&blue, 1).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn blue_map_of_identity() {
        let table = sample().propagator(0.0);
        let blue = blue_sideband_map(&table, 1).unwrap();
        for row in &blue.rows {
            assert_eq!(row.amplitude(row.initial), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn blue_map_rejects_foreign_rows() {
        let table = sample().propagator(1.0);
        assert!(matches!(
            blue_sideband_map(&table, 2),
            Err(Error::BusBelowOccupation { m: 2, bus: 1 })
        ));
    }
}
