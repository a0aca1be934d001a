//! Strategies and property checks shared by the property suite and the
//! acceptance runner.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use twoion::entangle::entangled_state;
use twoion::gates::{check_cz_conditions, gate_fidelity};
use twoion::{conditional_propagator, derive_couplings, effective_rabi, LaserDrive, PulsePair, SidebandSpec};

pub type Check = Result<(), TestCaseError>;

pub fn spec() -> impl Strategy<Value = SidebandSpec> {
    (1u32..=3).prop_flat_map(|k| (Just(k), 0..k)).prop_map(|(k, m)| SidebandSpec::red(k, m).unwrap())
}

pub fn pulses() -> impl Strategy<Value = PulsePair> {
    (
        0.05f64..3.0,
        0.05f64..3.0,
        0.2f64..5.0,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(e1, e2, ratio, p1, p2)| {
            PulsePair::new(
                LaserDrive::new(1.0, p1, e1).unwrap(),
                LaserDrive::new(ratio, p2, e2).unwrap(),
            )
        })
}

pub fn rows_are_orthonormal(p: &PulsePair, s: &SidebandSpec, t: f64) -> Check {
    let u = conditional_propagator(p, s, t).unwrap();
    for row in &u.rows {
        prop_assert!((row.norm_sqr() - 1.0).abs() < 1e-12, "{row:?}");
    }
    prop_assert!(u.orthonormality_error() < 1e-12);
    Ok(())
}

pub fn identity_at_zero_time(p: &PulsePair, s: &SidebandSpec) -> Check {
    let u = conditional_propagator(p, s, 0.0).unwrap();
    for row in &u.rows {
        for (label, amp) in &row.entries {
            let expected = if *label == row.initial { 1.0 } else { 0.0 };
            prop_assert!((amp - expected).norm() < 1e-15);
        }
    }
    Ok(())
}

pub fn time_rescaling(p: &PulsePair, s: &SidebandSpec, t: f64, factor: f64) -> Check {
    let a = conditional_propagator(p, s, t).unwrap();
    let b = conditional_propagator(&p.scaled(factor), s, t / factor).unwrap();
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        for (label, amp) in &ra.entries {
            prop_assert!((amp - rb.amplitude(*label)).norm() < 1e-12);
        }
    }
    Ok(())
}

pub fn gate_quantities_rescale(ratio: f64, eta: f64, tau: f64, factor: f64, s: &SidebandSpec) -> Check {
    let p = PulsePair::symmetric(1.0, ratio, eta).unwrap();
    let q = p.scaled(factor);
    let ra = check_cz_conditions(&derive_couplings(&p, s).unwrap(), tau).residual;
    let rb = check_cz_conditions(&derive_couplings(&q, s).unwrap(), tau / factor).residual;
    prop_assert!((ra.r_chi - rb.r_chi).abs() < 1e-12);
    prop_assert!((ra.r_plus - rb.r_plus).abs() < 1e-12);
    prop_assert!((ra.r_minus - rb.r_minus).abs() < 1e-12);
    let fa = gate_fidelity(&p, s, tau).unwrap();
    let fb = gate_fidelity(&q, s, tau / factor).unwrap();
    prop_assert!((fa.minimum - fb.minimum).abs() < 1e-12);
    for x in fa.probabilities {
        prop_assert!((0.0..=1.0).contains(&x));
    }
    Ok(())
}

pub fn zeta_gap_equals_splitting(p: &PulsePair, s: &SidebandSpec) -> Check {
    let c = derive_couplings(p, s).unwrap();
    prop_assert!((c.zeta_plus - c.zeta_minus - c.delta).abs() <= 1e-12 * c.lambda_sum.max(1e-300));
    prop_assert!((c.zeta_plus * c.zeta_minus + c.rho * c.rho).abs() <= 1e-12 * c.lambda_sum * c.lambda_sum);
    prop_assert!(c.lambda_minus <= c.lambda_plus);
    Ok(())
}

/// Even `k`: `Ω_{m,k}(−η) = Ω_{m,k}(η)`; odd `k`: the reduced coupling flips sign.
pub fn eta_parity(eta: f64, m: u32, k: u32, rabi: f64) -> Check {
    let plus = effective_rabi(&LaserDrive::new(rabi, 0.0, eta).unwrap(), m, k).unwrap();
    let minus = effective_rabi(&LaserDrive::new(rabi, 0.0, -eta).unwrap(), m, k).unwrap();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    prop_assert!((plus.reduced - sign * minus.reduced).abs() <= 1e-15 * plus.reduced.abs().max(1e-300));
    prop_assert!((plus.magnitude() - minus.magnitude()).abs() <= 1e-15 * plus.magnitude().max(1e-300));
    Ok(())
}

pub fn entanglement_duality(mu: f64) -> Check {
    let a = entangled_state(mu).unwrap();
    let b = entangled_state(1.0 / mu).unwrap();
    prop_assert!((a.u * a.u + a.v * a.v - 1.0).abs() < 1e-12);
    prop_assert!((a.entropy - b.entropy).abs() < 1e-12);
    prop_assert!((0.0..=1.0 + 1e-15).contains(&a.entropy));
    Ok(())
}
