//! Controlled-Z gates from a single synchronous pulse pair.
//!
//! At time `τ` the conditional propagator restricted to the computational
//! states is exactly `diag(1, 1, 1, −1)` when
//!
//! ```text
//! cos χτ = 1,    cos λ₊τ = −1,    cos λ₋τ = −1,
//! ```
//!
//! i.e. `χτ = 2πp`, `λ₊τ = (2q+1)π`, `λ₋τ = (2r+1)π`. For equal Lamb-Dicke
//! parameters and a fixed ratio `Ω₂/Ω₁` the three frequencies are
//! proportional to `Ω₁`, so the conditions become two commensurability
//! constraints on `η` plus a choice of pulse area `Ω₁τ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::coupling::SidebandSpec;
use crate::dynamics::{derive_couplings, ConditionalDynamics, CouplingSet, PulsePair};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid;
use crate::report::fmt_sig;

pub type SpinMatrix = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `diag(1, 1, 1, −1)` over `gg, ge, eg, ee`.
pub fn ideal_cz() -> SpinMatrix {
    let mut u = [[ZERO; 4]; 4];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = if i == 3 { -ONE } else { ONE };
    }
    u
}

/// Largest entry of `|a − b|`.
pub fn max_entry_distance(a: &SpinMatrix, b: &SpinMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

fn matmul(a: &SpinMatrix, b: &SpinMatrix) -> SpinMatrix {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConditionResidual {
    /// `|cos χτ − 1|`
    pub r_chi: f64,
    /// `|cos λ₊τ + 1|`
    pub r_plus: f64,
    /// `|cos λ₋τ + 1|`
    pub r_minus: f64,
}

impl GateConditionResidual {
    pub fn max(&self) -> f64 {
        self.r_chi.max(self.r_plus).max(self.r_minus)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

/// Residuals plus the distance of the resulting spin block from the ideal gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CzCheck {
    pub residual: GateConditionResidual,
    pub distance: f64,
}

impl CzCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual.within(tol)
    }
}

/// Evaluates the three gate conditions at `tau`.
///
/// The spin-block diagonal carries no laser phase or `k`-dependent factor and
/// the off-diagonal entries only pick up phases, so the distance is computed
/// with zero phases and `k = 1` labels.
pub fn check_cz_conditions(c: &CouplingSet, tau: f64) -> CzCheck {
    let residual = GateConditionResidual {
        r_chi: ((c.chi * tau).cos() - 1.0).abs(),
        r_plus: ((c.lambda_plus * tau).cos() + 1.0).abs(),
        r_minus: ((c.lambda_minus * tau).cos() + 1.0).abs(),
    };
    let dynamics = ConditionalDynamics {
        couplings: *c,
        phases: [0.0, 0.0],
        order: 1,
        bus: 0,
    };
    let block = dynamics.propagator(tau).spin_block(0);
    CzCheck {
        residual,
        distance: max_entry_distance(&block, &ideal_cz()),
    }
}

/// A reference working point for `m = 0`, `η₁ = η₂ = η`, `Ω₁τ` as pulse area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub ratio: f64,
    pub k: u32,
    pub eta: f64,
    pub pulse_area: f64,
    /// Printed as `±η`; both signs are equivalent for even `k`.
    pub either_sign: bool,
}

impl ReferenceRow {
    pub fn pulses(&self) -> PulsePair {
        PulsePair::symmetric(1.0, self.ratio, self.eta).expect("reference rows are valid drives")
    }

    pub fn spec(&self) -> SidebandSpec {
        SidebandSpec::red(self.k, 0).expect("k ≥ 1")
    }

    pub fn couplings(&self) -> CouplingSet {
        derive_couplings(&self.pulses(), &self.spec()).expect("valid spec")
    }
}

const fn row(ratio: f64, k: u32, eta: f64, pulse_area: f64) -> ReferenceRow {
    ReferenceRow {
        ratio,
        k,
        eta,
        pulse_area,
        either_sign: k.is_multiple_of(2),
    }
}

/// Reference controlled-Z working points (six significant digits;
/// even-`k` entries were listed as `±η` and are stored with the positive sign).
#[allow(clippy::approx_constant)]
pub const REFERENCE_SOLUTIONS: [ReferenceRow; 26] = [
    row(2.03951, 1, 1.93185, 18.5069),
    row(2.03951, 1, 0.517638, 12.2197),
    row(2.03951, 2, 0.915272, 14.1979),
    row(2.03951, 2, 2.67624, 39.2315),
    row(2.03951, 3, 1.12532, 17.9115),
    row(2.03951, 3, 2.69702, 26.2324),
    row(2.03951, 3, 3.34152, 96.5506),
    row(0.658331, 1, 1.76579, 56.5182),
    row(0.658331, 1, 0.939131, 34.7414),
    row(0.658331, 2, 1.09276, 45.1673),
    row(0.658331, 2, 2.60881, 131.088),
    row(0.658331, 3, 1.23348, 58.6299),
    row(0.658331, 3, 2.55336, 80.4486),
    row(1.81182, 1, 2.30578, 37.5859),
    row(1.81182, 2, 0.253727, 137.757),
    row(1.81182, 2, 2.81702, 57.2117),
    row(1.81182, 3, 0.859544, 33.8887),
    row(1.81182, 3, 3.40669, 124.419),
    row(4.02791, 1, 1.87083, 18.6274),
    row(4.02791, 1, 0.707107, 10.9967),
    row(4.02791, 2, 0.983608, 14.3592),
    row(4.02791, 2, 2.65189, 40.9890),
    row(4.02791, 3, 1.16543, 18.4811),
    row(4.02791, 3, 2.63899, 26.2548),
    row(4.02791, 3, 3.11088, 62.2365),
    row(4.02791, 3, 3.33069, 102.936),
];

/// One working point found by [`solve_gate_parameters`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSolution {
    pub k: u32,
    pub m: u32,
    pub ratio: f64,
    pub eta: f64,
    /// `Ω₁τ`.
    pub pulse_area: f64,
    pub residual: GateConditionResidual,
    /// `(p, q, r)` with `χτ ≈ 2πp`, `λ₊τ ≈ (2q+1)π`, `λ₋τ ≈ (2r+1)π`.
    pub triplet: (u32, u32, u32),
}

impl GateSolution {
    pub const CSV_HEADER: &'static str = "k,ratio,eta,pulse_area,p,q,r,r_chi,r_plus,r_minus";

    pub fn pulses(&self) -> PulsePair {
        PulsePair::symmetric(1.0, self.ratio, self.eta).expect("solutions are valid drives")
    }

    pub fn spec(&self) -> SidebandSpec {
        SidebandSpec::red(self.k, self.m).expect("m < k")
    }

    pub fn csv_row(&self) -> String {
        let (p, q, r) = self.triplet;
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.k,
            fmt_sig(self.ratio),
            fmt_sig(self.eta),
            fmt_sig(self.pulse_area),
            p,
            q,
            r,
            fmt_sig(self.residual.r_chi),
            fmt_sig(self.residual.r_plus),
            fmt_sig(self.residual.r_minus),
        )
    }
}

impl From<&ReferenceRow> for GateSolution {
    fn from(row: &ReferenceRow) -> Self {
        let c = row.couplings();
        let tau = row.pulse_area;
        let half_turns = |w: f64| (w * tau / PI).round() as u32;
        GateSolution {
            k: row.k,
            m: 0,
            ratio: row.ratio,
            eta: row.eta,
            pulse_area: tau,
            residual: check_cz_conditions(&c, tau).residual,
            triplet: (
                half_turns(c.chi) / 2,
                half_turns(c.lambda_plus).saturating_sub(1) / 2,
                half_turns(c.lambda_minus).saturating_sub(1) / 2,
            ),
        }
    }
}

/// Search settings for [`solve_gate_parameters`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Upper bound on each of `p`, `q`, `r`.
    pub max_integers: u32,
    /// Acceptance bound on every residual.
    pub tolerance: f64,
    /// Number of `η` cells in the sign-change scan.
    pub scan_cells: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_integers: 60,
            tolerance: 1e-3,
            scan_cells: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    /// Sorted by `η`; at most one pulse area (the shortest) per `η`.
    pub solutions: Vec<GateSolution>,
    /// `λ₋ = 0` over the whole range (e.g. equal drives), so `cos λ₋τ = −1`
    /// can never hold.
    pub lower_frequency_degenerate: bool,
}

/// Reduced fractions `a/b` with `a ≤ b` both odd and `b ≤ max_den`, ascending.
fn odd_fractions(max_den: u32) -> Vec<(u32, u32)> {
    fn gcd(mut a: u32, mut b: u32) -> u32 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    let mut out: Vec<(u32, u32)> = (1..=max_den)
        .step_by(2)
        .flat_map(|b| (1..=b).step_by(2).map(move |a| (a, b)))
        .filter(|&(a, b)| gcd(a, b) == 1)
        .collect();
    out.sort_by(|x, y| (x.0 as u64 * y.1 as u64).cmp(&(y.0 as u64 * x.1 as u64)));
    out
}

/// Finds `(η, Ω₁τ)` realizing a controlled-Z gate for `η₁ = η₂ = η`.
///
/// The ratio `g(η) = λ₋/λ₊ ∈ [0, 1]` is scanned over `eta_range`; in every
/// scan cell each reduced odd fraction `a/b` crossed by `g` is refined by
/// bisection. For odd multipliers `s`, `τ = asπ/λ₋` then satisfies the two
/// `λ` conditions with `2r+1 = as`, `2q+1 = bs`; it is kept only when `χτ`
/// also lands within tolerance of a multiple of `2π`.
pub fn solve_gate_parameters(
    k: u32,
    ratio: f64,
    m: u32,
    eta_range: (f64, f64),
    options: &SolverOptions,
) -> Result<SolverOutcome> {
    let spec = SidebandSpec::red(k, m)?;
    let (lo, hi) = eta_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid("eta_range", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(invalid("ratio", "Rabi frequency ratio must be positive"));
    }
    if options.max_integers == 0 || options.scan_cells == 0 {
        return Err(invalid("options", "max_integers and scan_cells must be positive"));
    }
    let couplings = |eta: f64| {
        let pulses = PulsePair::symmetric(1.0, ratio, eta)?;
        derive_couplings(&pulses, &spec)
    };
    let g = |c: &CouplingSet| {
        if c.lambda_plus > 0.0 {
            c.lambda_minus / c.lambda_plus
        } else {
            0.0
        }
    };
    let max_den = 2 * options.max_integers + 1;
    let fractions = odd_fractions(max_den);

    let grid = Grid::new(lo, hi, options.scan_cells + 1)?;
    let samples: Vec<f64> = grid
        .points()
        .map(|eta| couplings(eta).map(|c| g(&c)))
        .collect::<Result<_>>()?;
    let lower_frequency_degenerate = samples.iter().all(|&v| v < 1e-12);

    let mut found: Vec<GateSolution> = Vec::new();
    for cell in 0..options.scan_cells {
        let (e0, e1) = (grid.point(cell), grid.point(cell + 1));
        let (g0, g1) = (samples[cell], samples[cell + 1]);
        let (gmin, gmax) = (g0.min(g1), g0.max(g1));
        let start = fractions.partition_point(|&(a, b)| (a as f64) / (b as f64) <= gmin);
        for &(a, b) in fractions[start..].iter().take_while(|&&(a, b)| (a as f64) / (b as f64) <= gmax) {
            let target = a as f64 / b as f64;
            if (g0 - target) * (g1 - target) > 0.0 || g0 == g1 {
                continue;
            }
            let defect = |eta: f64| couplings(eta).map(|c| g(&c) - target).unwrap_or(f64::NAN);
            let eta = crate::roots::bisect(defect, e0, e1, 1e-15 * hi.abs().max(1.0));
            let c = couplings(eta)?;
            if c.lambda_minus <= 0.0 {
                continue;
            }
            let mut s = 1;
            while b * s <= max_den {
                let tau = (a * s) as f64 * PI / c.lambda_minus;
                let p = (c.chi * tau / (2.0 * PI)).round();
                if p >= 1.0 && p <= options.max_integers as f64 {
                    let check = check_cz_conditions(&c, tau);
                    if check.residual.within(options.tolerance) {
                        found.push(GateSolution {
                            k,
                            m,
                            ratio,
                            eta,
                            pulse_area: tau,
                            residual: check.residual,
                            triplet: (p as u32, (b * s - 1) / 2, (a * s - 1) / 2),
                        });
                        break;
                    }
                }
                s += 2;
            }
        }
    }
    found.sort_by(|x, y| x.eta.total_cmp(&y.eta).then(x.pulse_area.total_cmp(&y.pulse_area)));
    let mut solutions: Vec<GateSolution> = Vec::with_capacity(found.len());
    for sol in found {
        match solutions.last_mut() {
            Some(prev) if (sol.eta - prev.eta).abs() <= 1e-9 * sol.eta.abs().max(1.0) => {
                if sol.pulse_area < prev.pulse_area {
                    *prev = sol;
                }
            }
            _ => solutions.push(sol),
        }
    }
    Ok(SolverOutcome {
        solutions,
        lower_frequency_degenerate,
    })
}

/// Success probabilities of the controlled-Z map for each computational input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    /// `|⟨target|U|input⟩|²` for `gg, ge, eg, ee`, bus returned to `|m⟩`.
    pub probabilities: [f64; 4],
    pub minimum: f64,
    /// `|tr(CZ† U_spin)/4|²`, sensitive to the relative phases.
    pub phase_fidelity: f64,
}

/// Evaluates the conditional propagator at `tau` against `diag(1,1,1,−1)`.
pub fn gate_fidelity(pulses: &PulsePair, spec: &SidebandSpec, tau: f64) -> Result<FidelityReport> {
    let table = crate::dynamics::conditional_propagator(pulses, spec, tau)?;
    let block = table.spin_block(spec.bus_occupation);
    let target = ideal_cz();
    let probabilities: [f64; 4] = std::array::from_fn(|i| block[i][i].norm_sqr().min(1.0));
    let trace: Complex64 = (0..4).map(|i| target[i][i].conj() * block[i][i]).sum();
    Ok(FidelityReport {
        probabilities,
        minimum: probabilities.iter().copied().fold(1.0, f64::min),
        phase_fidelity: (trace / 4.0).norm_sqr(),
    })
}

/// How the other parameters respond when one is moved off a working point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerturbationProtocol {
    /// `Ω₂` and `τ` stay put; `Ω₁` is re-set to give the new ratio.
    #[default]
    FixedSecondRabi,
    /// `Ω₁` and `Ω₁τ` stay put; `Ω₂` moves.
    FixedPulseArea,
    /// `Ω₁` stays put and `τ` is re-optimized within ±5 % of the base value.
    OptimizedDuration,
}

impl std::str::FromStr for PerturbationProtocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-second-rabi" => Ok(Self::FixedSecondRabi),
            "fixed-pulse-area" => Ok(Self::FixedPulseArea),
            "optimized-duration" => Ok(Self::OptimizedDuration),
            _ => Err(invalid(
                "protocol",
                format!("`{s}`; expected fixed-second-rabi, fixed-pulse-area or optimized-duration"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Ratio,
    Eta,
    Tau,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ratio => "ratio",
            Self::Eta => "eta",
            Self::Tau => "tau",
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(Self::Ratio),
            "eta" => Ok(Self::Eta),
            "tau" => Ok(Self::Tau),
            _ => Err(invalid("param", format!("`{s}`; expected ratio, eta or tau"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: SweepParameter,
    pub value: f64,
    pub min_probability: f64,
    pub phase_fidelity: f64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "param,value,min_probability,phase_fidelity";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.param.name(),
            fmt_sig(self.value),
            fmt_sig(self.min_probability),
            fmt_sig(self.phase_fidelity)
        )
    }
}

fn best_duration(pulses: &PulsePair, spec: &SidebandSpec, around: f64) -> Result<f64> {
    let score = |tau: f64| gate_fidelity(pulses, spec, tau).map(|f| f.minimum);
    let (lo, hi) = (0.95 * around, 1.05 * around);
    let coarse = Grid::new(lo, hi, 2001)?;
    let mut best = (around, score(around)?);
    for tau in coarse.points() {
        let v = score(tau)?;
        if v > best.1 {
            best = (tau, v);
        }
    }
    // golden-section refinement inside the neighbouring cells
    let step = (hi - lo) / 2000.0;
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - ratio * (b - a);
        let x2 = a + ratio * (b - a);
        if score(x1)? >= score(x2)? {
            b = x2;
        } else {
            a = x1;
        }
    }
    let refined = 0.5 * (a + b);
    Ok(if score(refined)? >= best.1 { refined } else { best.0 })
}

/// Pulses and duration after moving `param` to `value` under `protocol`.
pub fn perturbed_setting(
    base: &GateSolution,
    param: SweepParameter,
    value: f64,
    protocol: PerturbationProtocol,
) -> Result<(PulsePair, f64)> {
    let spec = base.spec();
    match param {
        SweepParameter::Tau => Ok((base.pulses(), value)),
        SweepParameter::Eta => {
            let pulses = PulsePair::symmetric(1.0, base.ratio, value)?;
            let tau = match protocol {
                PerturbationProtocol::OptimizedDuration => best_duration(&pulses, &spec, base.pulse_area)?,
                _ => base.pulse_area,
            };
            Ok((pulses, tau))
        }
        SweepParameter::Ratio => {
            if !(value > 0.0) {
                return Err(invalid("ratio", "Rabi frequency ratio must be positive"));
            }
            match protocol {
                PerturbationProtocol::FixedSecondRabi => {
                    let rabi1 = base.ratio / value;
                    Ok((PulsePair::symmetric(rabi1, value, base.eta)?, base.pulse_area))
                }
                PerturbationProtocol::FixedPulseArea => {
                    Ok((PulsePair::symmetric(1.0, value, base.eta)?, base.pulse_area))
                }
                PerturbationProtocol::OptimizedDuration => {
                    let pulses = PulsePair::symmetric(1.0, value, base.eta)?;
                    let tau = best_duration(&pulses, &spec, base.pulse_area)?;
                    Ok((pulses, tau))
                }
            }
        }
    }
}

/// Minimum success probability along `grid`, in grid order.
pub fn robustness_sweep(
    base: &GateSolution,
    param: SweepParameter,
    grid: &Grid,
    protocol: PerturbationProtocol,
) -> Result<Vec<SweepRow>> {
    let spec = base.spec();
    grid.points()
        .map(|value| {
            let (pulses, tau) = perturbed_setting(base, param, value, protocol)?;
            let f = gate_fidelity(&pulses, &spec, tau)?;
            Ok(SweepRow {
                param,
                value,
                min_probability: f.minimum,
                phase_fidelity: f.phase_fidelity,
            })
        })
        .collect()
}

/// Ideal single-ion carrier rotation `exp(−iθ(cos φ σx + sin φ σy)/2)` in the
/// `(g, e)` basis. `φ = π/2` gives `R_y(θ)`.
pub fn carrier_rotation(theta: f64, phase: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    let minus_i = Complex64::new(0.0, -1.0);
    [
        [Complex64::new(c, 0.0), minus_i * Complex64::from_polar(s, -phase)],
        [minus_i * Complex64::from_polar(s, phase), Complex64::new(c, 0.0)],
    ]
}

/// `I ⊗ r`, rotating the second ion.
fn on_second_ion(r: &[[Complex64; 2]; 2]) -> SpinMatrix {
    let mut out = [[ZERO; 4]; 4];
    for block in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                out[2 * block + i][2 * block + j] = r[i][j];
            }
        }
    }
    out
}

/// The textbook CNOT with the first ion as control.
pub fn ideal_cnot() -> SpinMatrix {
    let mut u = [[ZERO; 4]; 4];
    u[0][0] = ONE;
    u[1][1] = ONE;
    u[2][3] = ONE;
    u[3][2] = ONE;
    u
}

/// `R_y(π/2)₂ · CZ · R_y(−π/2)₂`: a CNOT with the first ion as control and
/// the second as target, built from a controlled-Z and two carrier pulses.
///
/// `cz` must be within `tolerance` (max entry) of `diag(1,1,1,−1)`.
pub fn compose_cnot(cz: &SpinMatrix, tolerance: f64) -> Result<SpinMatrix> {
    let distance = max_entry_distance(cz, &ideal_cz());
    if !(distance <= tolerance) {
        return Err(Error::NotControlledZ { distance, tolerance });
    }
    let before = on_second_ion(&carrier_rotation(-0.5 * PI, 0.5 * PI));
    let after = on_second_ion(&carrier_rotation(0.5 * PI, 0.5 * PI));
    Ok(matmul(&after, &matmul(cz, &before)))
}
