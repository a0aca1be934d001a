//! Deterministic two-ion entanglement from one synchronous pulse pair.
//!
//! With `αⱼ = βⱼ`, `φ₁ = φ₂`, `α₁ ≠ α₂` and `cos χτ = −1`, the single-excitation
//! inputs end with the bus back in `|m⟩` and the spins in
//!
//! ```text
//! |g,e⟩ → U|g,e⟩ − V|e,g⟩,    |e,g⟩ → −V|g,e⟩ − U|e,g⟩,
//! U = (1 − μ²)/(1 + μ²),      V = 2μ/(1 + μ²),      μ = α₂/α₁,
//! ```
//!
//! whose entanglement is `E = −U² log₂ U² − V² log₂ V²`. `E = 1` at
//! `μ = √2 ± 1`.

use std::f64::consts::{PI, SQRT_2};

use crate::coupling::{effective_rabi, LaserDrive, SidebandSpec};
use crate::dynamics::{AmplitudeRow, CouplingSet, PulsePair};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid;
use crate::oracle::coupling_ratio_roots;
use crate::report::fmt_sig;

/// `|E − 1|` below this marks a maximally entangled state.
pub const EPR_TOLERANCE: f64 = 1e-9;

/// `−p log₂ p` with `0 log 0 = 0`.
fn entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    pub u: f64,
    pub v: f64,
    /// Degree of entanglement in bits.
    pub entropy: f64,
    pub mu: f64,
    pub is_epr: bool,
}

impl EntanglementResult {
    pub const CSV_HEADER: &'static str = "mu,E,U,V,is_epr";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_sig(self.mu),
            fmt_sig(self.entropy),
            fmt_sig(self.u),
            fmt_sig(self.v),
            self.is_epr
        )
    }
}

/// `U`, `V` and `E` for the coupling ratio `μ = α₂/α₁ > 0`.
pub fn entangled_state(mu: f64) -> Result<EntanglementResult> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid("mu", format!("must be positive and finite, got {mu}")));
    }
    // written in terms of min(μ, 1/μ) so large μ does not overflow μ²
    let (x, flip) = if mu > 1.0 { (1.0 / mu, -1.0) } else { (mu, 1.0) };
    let denom = 1.0 + x * x;
    let u = flip * (1.0 - x * x) / denom;
    let v = 2.0 * x / denom;
    let entropy = entropy_term(u * u) + entropy_term(v * v);
    Ok(EntanglementResult {
        u,
        v,
        entropy,
        mu,
        is_epr: (entropy - 1.0).abs() < EPR_TOLERANCE,
    })
}

/// Rows of `E(μ)` over `grid`.
pub fn figure1_curve(grid: &Grid) -> Result<Vec<EntanglementResult>> {
    if !(grid.min > 0.0) {
        return Err(invalid("mu", "grid must be strictly positive"));
    }
    grid.points().map(entangled_state).collect()
}

/// Deviations from the entangling conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangleConditionResidual {
    /// `||αⱼ| − |βⱼ|| / |αⱼ|` per ion.
    pub coupling_mismatch: [f64; 2],
    /// `|φ₁ − φ₂|` wrapped into `[0, π]`.
    pub phase_gap: f64,
    /// `|cos χτ + 1|`
    pub r_chi: f64,
    /// `|α₁| ≠ |α₂|`; without it the state is a product.
    pub distinct_couplings: bool,
}

impl EntangleConditionResidual {
    pub fn max(&self) -> f64 {
        self.coupling_mismatch[0]
            .max(self.coupling_mismatch[1])
            .max(self.phase_gap)
            .max(self.r_chi)
    }
}

pub fn check_entangle_conditions(c: &CouplingSet, phases: [f64; 2], tau: f64) -> EntangleConditionResidual {
    let mismatch = |j: usize| {
        let (a, b) = (c.alpha[j].abs(), c.beta[j].abs());
        if a > 0.0 {
            (a - b).abs() / a
        } else if b == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    let gap = (phases[0] - phases[1]).rem_euclid(2.0 * PI);
    let (a1, a2) = (c.alpha[0].abs(), c.alpha[1].abs());
    EntangleConditionResidual {
        coupling_mismatch: [mismatch(0), mismatch(1)],
        phase_gap: gap.min(2.0 * PI - gap),
        r_chi: ((c.chi * tau).cos() + 1.0).abs(),
        distinct_couplings: (a1 - a2).abs() > 1e-12 * a1.max(a2),
    }
}

/// `|α₂|/|α₁|` from the coupling series.
pub fn mu_from_parameters(first: &LaserDrive, second: &LaserDrive, m: u32, k: u32) -> Result<f64> {
    let a1 = effective_rabi(first, m, k)?.reduced.abs();
    let a2 = effective_rabi(second, m, k)?.reduced.abs();
    if a1 == 0.0 {
        return Err(invalid("drives", "the first ion's coupling vanishes, so α₂/α₁ is undefined"));
    }
    Ok(a2 / a1)
}

/// `(Ω₂/Ω₁)(|η₂|/|η₁|)^k exp(−(η₂² − η₁²)/2)`, the `m = 0` special case of
/// [`mu_from_parameters`].
pub fn mu_ground_bus(first: &LaserDrive, second: &LaserDrive, k: u32) -> Result<f64> {
    if first.lamb_dicke == 0.0 {
        return Err(invalid("eta1", "must be nonzero"));
    }
    let (e1, e2) = (first.lamb_dicke, second.lamb_dicke);
    Ok(second.carrier_rabi / first.carrier_rabi
        * (e2.abs() / e1.abs()).powi(k as i32)
        * (-0.5 * (e2 * e2 - e1 * e1)).exp())
}

/// Which maximum of `E(μ)` to target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EprBranch {
    /// `μ = √2 + 1`
    Plus,
    /// `μ = √2 − 1`
    Minus,
}

impl EprBranch {
    pub fn mu(self) -> f64 {
        match self {
            Self::Plus => SQRT_2 + 1.0,
            Self::Minus => SQRT_2 - 1.0,
        }
    }

    /// `√(1 + μ²) = √(4 ± 2√2)`.
    pub fn chi_over_alpha1(self) -> f64 {
        match self {
            Self::Plus => (4.0 + 2.0 * SQRT_2).sqrt(),
            Self::Minus => (4.0 - 2.0 * SQRT_2).sqrt(),
        }
    }
}

impl std::str::FromStr for EprBranch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Self::Plus),
            "minus" | "-" => Ok(Self::Minus),
            _ => Err(invalid("branch", format!("`{s}`; expected plus or minus"))),
        }
    }
}

/// How the two drives are allowed to differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EprConstraint {
    /// `η₁ = η₂`; `μ` is set by `Ω₂/Ω₁`.
    EqualEta,
    /// `Ω₁ = Ω₂`; `μ` must come from two different `η`.
    EqualOmega,
}

impl std::str::FromStr for EprConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-eta" => Ok(Self::EqualEta),
            "equal-omega" => Ok(Self::EqualOmega),
            _ => Err(invalid("constraint", format!("`{s}`; expected equal-eta or equal-omega"))),
        }
    }
}

/// Drive settings that prepare an EPR state, with `Ω₁ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprParameters {
    pub k: u32,
    pub m: u32,
    pub branch: EprBranch,
    pub eta1: f64,
    pub eta2: f64,
    pub ratio: f64,
    /// `Ω₁τₑ`.
    pub pulse_area: f64,
    pub mu: f64,
}

impl EprParameters {
    pub const CSV_HEADER: &'static str = "k,m,branch,eta1,eta2,ratio,pulse_area,mu";

    pub fn pulses(&self) -> PulsePair {
        PulsePair::new(
            LaserDrive::new(1.0, 0.0, self.eta1).expect("solved drives are valid"),
            LaserDrive::new(self.ratio, 0.0, self.eta2).expect("solved drives are valid"),
        )
    }

    pub fn spec(&self) -> SidebandSpec {
        SidebandSpec::red(self.k, self.m).expect("m < k")
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.k,
            self.m,
            match self.branch {
                EprBranch::Plus => "plus",
                EprBranch::Minus => "minus",
            },
            fmt_sig(self.eta1),
            fmt_sig(self.eta2),
            fmt_sig(self.ratio),
            fmt_sig(self.pulse_area),
            fmt_sig(self.mu)
        )
    }
}

/// Upper end of the `η` interval searched for `|αⱼ| = |βⱼ|`.
pub const EPR_ETA_MAX: f64 = 4.0;

/// Positive `η ≤ 4` with `|Ω_{m,k}(η)| = |Ω_{m+k,k}(η)|`, ascending.
pub fn equal_coupling_roots(k: u32, m: u32) -> Vec<f64> {
    let mut roots = coupling_ratio_roots(m, k, 1.0);
    roots.extend(coupling_ratio_roots(m, k, -1.0));
    roots.sort_by(f64::total_cmp);
    roots
}

/// All drive settings that meet the entangling conditions at `μ = √2 ± 1`,
/// shortest pulse (`α₁τₑ = π/√(4 ± 2√2)`), smallest `η₁` first.
pub fn solve_epr_parameters(
    k: u32,
    m: u32,
    branch: EprBranch,
    constraint: EprConstraint,
) -> Result<Vec<EprParameters>> {
    SidebandSpec::red(k, m)?;
    let roots = equal_coupling_roots(k, m);
    let no_root = Error::NoRoot {
        what: "|Ω(m,k)| = |Ω(m+k,k)|",
        lo: 0.0,
        hi: EPR_ETA_MAX,
    };
    if roots.is_empty() {
        return Err(no_root);
    }
    let alpha = |eta: f64| {
        let d = LaserDrive::new(1.0, 0.0, eta)?;
        Ok::<f64, Error>(effective_rabi(&d, m, k)?.reduced.abs())
    };
    let target = branch.mu();
    let mut out = Vec::new();
    match constraint {
        EprConstraint::EqualEta => {
            for &eta in &roots {
                let a1 = alpha(eta)?;
                out.push(EprParameters {
                    k,
                    m,
                    branch,
                    eta1: eta,
                    eta2: eta,
                    ratio: target,
                    pulse_area: PI / (a1 * branch.chi_over_alpha1()),
                    mu: target,
                });
            }
        }
        EprConstraint::EqualOmega => {
            for &e1 in &roots {
                for &e2 in &roots {
                    let (a1, a2) = (alpha(e1)?, alpha(e2)?);
                    if ((a2 / a1) - target).abs() < 1e-9 {
                        out.push(EprParameters {
                            k,
                            m,
                            branch,
                            eta1: e1,
                            eta2: e2,
                            ratio: 1.0,
                            pulse_area: PI / (a1 * branch.chi_over_alpha1()),
                            mu: a2 / a1,
                        });
                    }
                }
            }
        }
    }
    if out.is_empty() {
        return Err(no_root);
    }
    for p in &mut out {
        let pulses = p.pulses();
        p.mu = mu_from_parameters(&pulses.first, &pulses.second, m, k)?;
    }
    Ok(out)
}

/// Von Neumann entropy (bits) of either ion's reduced state for a pure row,
/// tracing out the bus and the other ion.
pub fn reduced_spin_entropy(row: &AmplitudeRow) -> f64 {
    use crate::dynamics::Spin;
    let mut rho = [[num_complex::Complex64::new(0.0, 0.0); 2]; 2];
    let idx = |s: Spin| if s == Spin::Ground { 0 } else { 1 };
    for (a, amp_a) in &row.entries {
        for (b, amp_b) in &row.entries {
            if a.bus == b.bus && a.spin2 == b.spin2 {
                rho[idx(a.spin1)][idx(b.spin1)] += amp_a * amp_b.conj();
            }
        }
    }
    let trace = rho[0][0].re + rho[1][1].re;
    let det = rho[0][0].re * rho[1][1].re - rho[0][1].norm_sqr();
    let disc = (0.25 * trace * trace - det).max(0.0).sqrt();
    let p1 = 0.5 * trace + disc;
    let p2 = (det / p1).max(0.0);
    entropy_term(p1) + entropy_term(p2)
}
