//! Sideband couplings beyond the Lamb-Dicke regime.
//!
//! A laser tuned to the k-th red sideband of the centre-of-mass mode couples
//! `|m+k⟩|g⟩` to `|m⟩|e⟩` with the effective Rabi frequency
//!
//! ```text
//! Ω_{m,k} = (Ω e^{-η²/2} / 2) √((m+k)!/m!) Σ_{n=0}^{m} (-iη)^{2n+k} C(m,n) / (n+k)!
//! ```
//!
//! where `C(m,n)` is the binomial coefficient "m choose n". The sum is an
//! associated Laguerre polynomial in disguise, `m!/(m+k)! · L_m^k(η²)`,
//! multiplied by `(-i)^k η^k`.
//!
//! The binomial is sometimes typeset upside down as "n over m"; that reading
//! is zero for every `n < m` and would not reduce to the familiar
//! `η^k √((m+k)!/m!) / k!` at small `η`, so `C(m,n)` is the one used here.
//!
//! Every coupling is `(-i)^k` times a real number. That real number (the
//! [`EffectiveRabi::reduced`] value) carries the sign of the Laguerre sum and
//! is what the closed-form dynamics consume; the `(-i)^k` phase is applied
//! explicitly by the amplitude formulas and must not be applied twice.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Physical constants with their CODATA 2018 values. The kernels never read
/// these implicitly; callers pass them in.
pub mod constants {
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Unified atomic mass unit, kg.
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    /// Electron mass, kg.
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    /// Mass of a singly ionised ⁹Be atom, kg.
    pub const BERYLLIUM9_ION_MASS: f64 = 9.012_183_065 * ATOMIC_MASS_UNIT - ELECTRON_MASS;
}

/// One addressing laser: carrier Rabi frequency Ω (rad/s), phase φ (rad) and
/// Lamb-Dicke parameter η. Negative η is allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserDrive {
    pub carrier_rabi: f64,
    pub phase: f64,
    pub lamb_dicke: f64,
}

impl LaserDrive {
    pub fn new(carrier_rabi: f64, phase: f64, lamb_dicke: f64) -> Result<Self> {
        if !(carrier_rabi > 0.0) || !carrier_rabi.is_finite() {
            return Err(invalid("carrier_rabi", format!("must be positive, got {carrier_rabi}")));
        }
        if !phase.is_finite() {
            return Err(invalid("phase", "must be finite"));
        }
        if !lamb_dicke.is_finite() {
            return Err(invalid("lamb_dicke", "must be finite"));
        }
        Ok(Self {
            carrier_rabi,
            phase,
            lamb_dicke,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SidebandColor {
    Red,
    Blue,
}

/// Common sideband order `k`, color and initial bus Fock state `|m⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SidebandSpec {
    pub order: u32,
    pub color: SidebandColor,
    pub bus_occupation: u32,
}

impl SidebandSpec {
    /// Requires `k ≥ 1` and `m < k`; the conditional dynamics only close on
    /// the sectors `{m, m+k, m+2k}` in that case.
    pub fn new(order: u32, color: SidebandColor, bus_occupation: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(order));
        }
        if bus_occupation >= order {
            return Err(Error::BusNotBelowOrder {
                m: bus_occupation,
                k: order,
            });
        }
        Ok(Self {
            order,
            color,
            bus_occupation,
        })
    }

    pub fn red(order: u32, bus_occupation: u32) -> Result<Self> {
        Self::new(order, SidebandColor::Red, bus_occupation)
    }
}

/// Value of the coupling series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRabi {
    /// The full complex coupling `Ω_{m,k}`.
    pub value: Complex64,
    /// Real signed coupling `i^k Ω_{m,k}`.
    pub reduced: f64,
}

impl EffectiveRabi {
    pub fn magnitude(&self) -> f64 {
        self.reduced.abs()
    }
}

/// `(-i)^k`.
pub(crate) fn neg_i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn ln_factorial(n: u32) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Evaluates `Ω_{m,k}` for one drive.
///
/// The polynomial part is summed from the term ratio
/// `t_{n+1}/t_n = −η²(m−n)/((n+1)(n+1+k))`, so each term is exact to a few
/// ulps; the magnitude prefactor `e^{−η²/2} |η|^k √((m+k)!/m!)/k!` is formed
/// once in log space so that large `m` or `k` cannot overflow.
pub fn effective_rabi(drive: &LaserDrive, m: u32, k: u32) -> Result<EffectiveRabi> {
    if k == 0 {
        return Err(Error::InvalidOrder(k));
    }
    let eta = drive.lamb_dicke;
    let reduced = if eta == 0.0 {
        0.0
    } else {
        let ln_prefactor = -0.5 * eta * eta
            + f64::from(k) * eta.abs().ln()
            + 0.5 * (ln_factorial(m + k) - ln_factorial(m))
            - ln_factorial(k);
        let eta_sign = if eta < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        let x = eta * eta;
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..m {
            term *= -x * f64::from(m - n) / (f64::from(n + 1) * f64::from(n + 1 + k));
            sum += term;
        }
        0.5 * drive.carrier_rabi * eta_sign * ln_prefactor.exp() * sum
    };
    Ok(EffectiveRabi {
        value: neg_i_pow(k) * reduced,
        reduced,
    })
}

/// Lowest-order (Lamb-Dicke) coupling magnitude `(Ω/2) |η|^k √((m+k)!/m!) / k!`.
pub fn lamb_dicke_limit(drive: &LaserDrive, m: u32, k: u32) -> f64 {
    let ln = f64::from(k) * drive.lamb_dicke.abs().ln()
        + 0.5 * (ln_factorial(m + k) - ln_factorial(m))
        - ln_factorial(k);
    0.5 * drive.carrier_rabi * ln.exp()
}

/// Laboratory quantities that set η and Ω for one ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalSetup {
    /// |κ|, 1/m.
    pub wavevector_magnitude: f64,
    /// Angle between beam and trap axis, rad.
    pub beam_angle: f64,
    /// Mass of one ion, kg.
    pub ion_mass: f64,
    pub ion_count: u32,
    /// Centre-of-mass trap frequency ν, rad/s.
    pub trap_frequency: f64,
    /// Micromotion amplitude ξ, m.
    pub micromotion_amplitude: f64,
    /// |δκ|, 1/m.
    pub wavevector_difference: f64,
    /// Rabi frequency without micromotion, rad/s.
    pub base_rabi: f64,
}

/// `η = cos θ · √(ħκ² / (2 M N ν))`. The sign follows `cos θ`.
pub fn lamb_dicke_from_geometry(setup: &PhysicalSetup, hbar: f64) -> Result<f64> {
    if !(setup.ion_mass > 0.0) {
        return Err(invalid("ion_mass", "must be positive"));
    }
    if setup.ion_count < 2 {
        return Err(invalid("ion_count", "need at least two ions"));
    }
    if !(setup.trap_frequency > 0.0) {
        return Err(invalid("trap_frequency", "must be positive"));
    }
    if !(hbar > 0.0) {
        return Err(invalid("hbar", "must be positive"));
    }
    let kappa = setup.wavevector_magnitude;
    let total_mass = setup.ion_mass * f64::from(setup.ion_count);
    Ok(setup.beam_angle.cos() * (hbar * kappa * kappa / (2.0 * total_mass * setup.trap_frequency)).sqrt())
}

/// `Ω = Ω_c J₀(|δκ| ξ)`.
pub fn rabi_from_micromotion(setup: &PhysicalSetup) -> Result<f64> {
    if !(setup.base_rabi > 0.0) {
        return Err(invalid("base_rabi", "must be positive"));
    }
    Ok(setup.base_rabi * libm::j0(setup.wavevector_difference.abs() * setup.micromotion_amplitude))
}
