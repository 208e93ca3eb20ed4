//! Tripartite entanglement measures.
//!
//! * negativity `N = ||rho^T||_1 - 1` across a cut (no factor of 2, so a
//!   Bell pair and the GHZ one-tangle both give 1),
//! * the pi-tangle `(pi_A + pi_B + pi_C) / 3`, `pi_A = N_A(BC)^2 - N_AB^2 - N_AC^2`,
//! * the pure-state three-tangle `4 |Det(psi)|` (Cayley hyperdeterminant),
//! * closed forms for the accelerated families and a numerical convex roof
//!   used as an independent check on them.
//!
//! One-tangles in the pi-tangle are evaluated on a purification of the
//! state: the cut is `X | (rest + environment)`. For the Unruh states the
//! environment is exactly the traced-out region II mode, so this is the
//! negativity of the physical four-mode pure state. Two-tangles use the
//! ordinary negativity of the two-qubit reduced states.

mod convex_roof;
mod spectral;

pub use convex_roof::{convex_roof_min, ConvexRoofOptions, EnsembleMember, Rank2Decomposition};
pub use spectral::{
    gghz_spectral, ms_phi_average_closed, ms_phi_average_numeric, ms_phi_states, ms_spectral,
    z_phi_state, GghzSpectral, MsSpectral,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    herm_eigen, partial_transpose, reduce_to, trace_norm, CMatrix, HermMatrix, C64,
};
use crate::states::{check_theta, DensityMatrix3, Family, PureState3};
use crate::unruh::{check_r, Party};

/// Round-off window below zero that is silently clamped.
pub const CLAMP_TOL: f64 = 1e-12;

/// Eigenvalues of `rho` at or below this are dropped when purifying.
const PURIFICATION_CUTOFF: f64 = 1e-13;

/// Cuts of a three-qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bipartition {
    /// `A | BC`
    AvsBC,
    /// `B | AC`
    BvsAC,
    /// `C | AB`
    CvsAB,
    /// `A | B` in the reduced state of AB.
    AB,
    /// `A | C` in the reduced state of AC.
    AC,
    /// `B | C` in the reduced state of BC.
    BC,
}

impl Bipartition {
    pub fn one_vs_rest(p: Party) -> Self {
        match p {
            Party::A => Bipartition::AvsBC,
            Party::B => Bipartition::BvsAC,
            Party::C => Bipartition::CvsAB,
        }
    }

    pub fn pair(x: Party, y: Party) -> Option<Self> {
        match (x.index().min(y.index()), x.index().max(y.index())) {
            (0, 1) => Some(Bipartition::AB),
            (0, 2) => Some(Bipartition::AC),
            (1, 2) => Some(Bipartition::BC),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangleMethod {
    ClosedForm,
    Hyperdeterminant,
    ConvexRoofNumeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangleReport {
    pub pi_tangle: f64,
    pub three_tangle: f64,
    pub method: TangleMethod,
}

/// Clamps round-off negatives to zero; anything below `-CLAMP_TOL` is a bug.
pub(crate) fn clamp_nonneg(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x > -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::consistency(format!("{what} = {x:e} is negative")))
    }
}

/// Negativity of `m` across factor `subsystem` of the product space `dims`.
pub fn negativity_across(m: &HermMatrix, subsystem: usize, dims: &[usize]) -> Result<f64> {
    let pt = HermMatrix::new(partial_transpose(m, subsystem, dims)?)?;
    clamp_nonneg(trace_norm(&pt) - 1.0, "negativity")
}

/// `||rho^{T_cut}||_1 - 1`.
pub fn negativity(rho: &DensityMatrix3, cut: Bipartition) -> Result<f64> {
    let dims = [2, 2, 2];
    match cut {
        Bipartition::AvsBC => negativity_across(rho.herm(), 0, &dims),
        Bipartition::BvsAC => negativity_across(rho.herm(), 1, &dims),
        Bipartition::CvsAB => negativity_across(rho.herm(), 2, &dims),
        Bipartition::AB | Bipartition::AC | Bipartition::BC => {
            let keep: &[usize] = match cut {
                Bipartition::AB => &[0, 1],
                Bipartition::AC => &[0, 2],
                _ => &[1, 2],
            };
            let reduced = HermMatrix::new(reduce_to(rho.matrix(), keep, &dims)?)?;
            negativity_across(&reduced, 0, &[2, 2])
        }
    }
}

/// A purification of `rho` as a vector on `(2, 2, 2, k)`, with `k` the
/// numerical rank.
pub fn purify(rho: &DensityMatrix3) -> (Vec<C64>, usize) {
    let eig = herm_eigen(rho.herm());
    let kept: Vec<(f64, &Vec<C64>)> = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .filter(|(&l, _)| l > PURIFICATION_CUTOFF)
        .map(|(&l, v)| (l, v))
        .collect();
    let k = kept.len().max(1);
    let mut out = vec![C64::new(0.0, 0.0); 8 * k];
    for (col, (lambda, v)) in kept.iter().enumerate() {
        let s = lambda.sqrt();
        for (i, amp) in v.iter().enumerate() {
            out[i * k + col] = amp * s;
        }
    }
    (out, k)
}

/// Negativity between qubit `party` and everything else, environment
/// included, computed on a purification of `rho`.
pub fn one_tangle_negativity(rho: &DensityMatrix3, party: Party) -> Result<f64> {
    let (psi, k) = purify(rho);
    let proj = HermMatrix::new(CMatrix::outer(&psi))?;
    negativity_across(&proj, party.index(), &[2, 2, 2, k])
}

/// The three per-party residuals `pi_X` and their average.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PiTangleParts {
    pub one_tangle: [f64; 3],
    /// Negativities for AB, AC, BC.
    pub two_tangle: [f64; 3],
    pub residual: [f64; 3],
    pub pi_tangle: f64,
}

pub fn pi_tangle_parts(rho: &DensityMatrix3) -> Result<PiTangleParts> {
    let mut one = [0.0; 3];
    for p in Party::ALL {
        one[p.index()] = one_tangle_negativity(rho, p)?;
    }
    let two = [
        negativity(rho, Bipartition::AB)?,
        negativity(rho, Bipartition::AC)?,
        negativity(rho, Bipartition::BC)?,
    ];
    let sq = |x: f64| x * x;
    let residual = [
        sq(one[0]) - sq(two[0]) - sq(two[1]),
        sq(one[1]) - sq(two[0]) - sq(two[2]),
        sq(one[2]) - sq(two[1]) - sq(two[2]),
    ];
    let pi = clamp_nonneg(residual.iter().sum::<f64>() / 3.0, "pi-tangle")?;
    Ok(PiTangleParts {
        one_tangle: one,
        two_tangle: two,
        residual,
        pi_tangle: pi,
    })
}

pub fn pi_tangle(rho: &DensityMatrix3) -> Result<f64> {
    Ok(pi_tangle_parts(rho)?.pi_tangle)
}

/// Closed-form pi-tangles of the accelerated families.
pub fn pi_tangle_closed(family: Family, theta: f64, r: f64) -> Result<f64> {
    check_theta(theta)?;
    check_r(r)?;
    let (ct, st) = (theta.cos(), theta.sin());
    let (cr, sr) = (r.cos(), r.sin());
    let (cr2, sr2) = (cr * cr, sr * sr);
    let v = match family {
        Family::GghzCharlie => {
            (2.0 + cr2) / 3.0 * (2.0 * theta).sin().powi(2)
                + ct.powi(4) * (2.0 * r).sin().powi(2) / 3.0
        }
        Family::MsCharlie => {
            (st * st * (2.0 + cr2) + sr2 * cr2 * (1.0 + ct * ct).powi(2)) / 3.0
        }
        Family::MsBob => {
            (1.0 + st * st - cr2 * (2.0 * theta).cos()
                + sr2 * (2.0 * r).cos()
                + sr2 * (sr2 * sr2 + 4.0 * cr2 * ct * ct).sqrt())
                / 3.0
        }
    };
    Ok(v)
}

/// Cayley's hyperdeterminant of the 2x2x2 amplitude array `a[abc]`:
///
/// ```text
/// d1 = a000^2 a111^2 + a001^2 a110^2 + a010^2 a101^2 + a100^2 a011^2
/// d2 = a000 a111 (a011 a100 + a101 a010 + a110 a001)
///    + a011 a100 (a101 a010 + a110 a001) + a101 a010 a110 a001
/// d3 = a000 a110 a101 a011 + a111 a001 a010 a100
/// Det = d1 - 2 d2 + 4 d3
/// ```
pub fn hyperdeterminant(a: &[C64; 8]) -> C64 {
    let [a000, a001, a010, a011, a100, a101, a110, a111] = *a;
    let d1 = a000 * a000 * a111 * a111
        + a001 * a001 * a110 * a110
        + a010 * a010 * a101 * a101
        + a100 * a100 * a011 * a011;
    let d2 = a000 * a111 * (a011 * a100 + a101 * a010 + a110 * a001)
        + a011 * a100 * (a101 * a010 + a110 * a001)
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    d1 - 2.0 * d2 + 4.0 * d3
}

/// Three-tangle `4 |Det|` of a normalized state.
pub fn three_tangle_pure(psi: &PureState3) -> f64 {
    4.0 * hyperdeterminant(psi.amplitudes()).norm()
}

/// `p * tau(v / |v|)` for an unnormalized vector with `p = |v|^2`.
pub(crate) fn weighted_tangle(v: &[C64; 8]) -> f64 {
    let n: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    if n <= 1e-300 {
        return 0.0;
    }
    4.0 * hyperdeterminant(v).norm() / n
}

/// Closed-form three-tangles of the rank-2 accelerated states.
pub fn three_tangle_rank2_closed(family: Family, theta: f64, r: f64) -> Result<f64> {
    check_theta(theta)?;
    check_r(r)?;
    let cr2 = r.cos().powi(2);
    Ok(match family {
        Family::GghzCharlie => (2.0 * theta).sin().powi(2) * cr2,
        Family::MsCharlie | Family::MsBob => cr2 * theta.sin().powi(2),
    })
}

/// Closed-form pi- and three-tangle for a family member.
pub fn tangle_report(family: Family, theta: f64, r: f64) -> Result<TangleReport> {
    Ok(TangleReport {
        pi_tangle: pi_tangle_closed(family, theta, r)?,
        three_tangle: three_tangle_rank2_closed(family, theta, r)?,
        method: TangleMethod::ClosedForm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::states::{gghz, ms, rho_gghz_charlie, sigma_ms_bob, sigma_ms_charlie};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn w_state() -> PureState3 {
        let s = 1.0 / 3f64.sqrt();
        let mut a = [re(0.0); 8];
        a[0b001] = re(s);
        a[0b010] = re(s);
        a[0b100] = re(s);
        PureState3::new(a).unwrap()
    }

    #[test]
    fn hyperdeterminant_reference_values() {
        assert!((three_tangle_pure(&gghz(FRAC_PI_4).unwrap()) - 1.0).abs() < 1e-15);
        assert!(three_tangle_pure(&w_state()) < 1e-15);
        assert!(three_tangle_pure(&gghz(0.0).unwrap()) < 1e-15);
        for t in [0.0, 0.3, 1.0, FRAC_PI_2] {
            let tau = three_tangle_pure(&ms(t).unwrap());
            assert!((tau - t.sin().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn negativity_examples() {
        let prod = gghz(0.0).unwrap().density_matrix();
        for cut in [
            Bipartition::AvsBC,
            Bipartition::BvsAC,
            Bipartition::CvsAB,
            Bipartition::AB,
            Bipartition::AC,
            Bipartition::BC,
        ] {
            assert_eq!(negativity(&prod, cut).unwrap(), 0.0);
        }
        let h = FRAC_1_SQRT_2;
        let bell = HermMatrix::new(CMatrix::outer(&[re(h), re(0.0), re(0.0), re(h)])).unwrap();
        assert!((negativity_across(&bell, 0, &[2, 2]).unwrap() - 1.0).abs() < 1e-14);

        for t in [0.1, 0.5, FRAC_PI_4, 1.2] {
            let rho = gghz(t).unwrap().density_matrix();
            let n = negativity(&rho, Bipartition::AvsBC).unwrap();
            assert!((n - (2.0 * t).sin()).abs() < 1e-13, "t={t}: {n}");
        }
    }

    #[test]
    fn one_tangle_equals_four_det_of_reduced_qubit() {
        for fam in Family::ALL {
            for (t, r) in [(0.3, 0.2), (1.1, 0.7), (FRAC_PI_4, FRAC_PI_4)] {
                let rho = fam.state(t, r).unwrap();
                for p in Party::ALL {
                    let keep = [p.index()];
                    let q = reduce_to(rho.matrix(), &keep, &[2, 2, 2]).unwrap();
                    let det = (q[(0, 0)] * q[(1, 1)] - q[(0, 1)] * q[(1, 0)]).re;
                    let n = one_tangle_negativity(&rho, p).unwrap();
                    assert!((n * n - 4.0 * det).abs() < 1e-12, "{fam} {p:?}");
                }
            }
        }
    }

    #[test]
    fn pi_tangle_reproduces_closed_forms() {
        let mut worst: f64 = 0.0;
        for i in 0..12 {
            for j in 0..12 {
                let t = FRAC_PI_2 * i as f64 / 11.0;
                let r = FRAC_PI_4 * j as f64 / 11.0;
                for fam in Family::ALL {
                    let num = pi_tangle(&fam.state(t, r).unwrap()).unwrap();
                    let cf = pi_tangle_closed(fam, t, r).unwrap();
                    worst = worst.max((num - cf).abs());
                }
            }
        }
        assert!(worst <= 1e-9, "{worst:e}");
    }

    #[test]
    fn pi_tangle_maximum_at_infinite_acceleration() {
        let theta = (2.0f64 / 3.0).asin();
        let v = pi_tangle(&rho_gghz_charlie(theta, FRAC_PI_4).unwrap()).unwrap();
        assert!((v - 25.0 / 27.0).abs() < 1e-9);
        assert_eq!(pi_tangle(&gghz(0.0).unwrap().density_matrix()).unwrap(), 0.0);
    }

    #[test]
    fn rank2_closed_values() {
        let r2 = crate::unruh::rindler_angle(2.0).unwrap();
        let v = three_tangle_rank2_closed(Family::GghzCharlie, FRAC_PI_4, r2).unwrap();
        assert!((v - 0.959).abs() < 5e-4);
        assert_eq!(three_tangle_rank2_closed(Family::MsCharlie, FRAC_PI_2, 0.0).unwrap(), 1.0);
        assert!(three_tangle_rank2_closed(Family::GghzCharlie, 0.0, 0.3).unwrap().abs() < 1e-300);
        assert!(three_tangle_rank2_closed(Family::MsBob, 2.0, 0.3).is_err());
        assert!(three_tangle_rank2_closed(Family::MsBob, 1.0, 0.9).is_err());
    }

    #[test]
    fn pi_exceeds_tau_on_families() {
        for fam in Family::ALL {
            for i in 0..=20 {
                for j in 0..=10 {
                    let t = FRAC_PI_2 * i as f64 / 20.0;
                    let r = FRAC_PI_4 * j as f64 / 10.0;
                    let rep = tangle_report(fam, t, r).unwrap();
                    assert!(rep.pi_tangle >= rep.three_tangle - 1e-9, "{fam} {t} {r}");
                }
            }
        }
    }

    #[test]
    fn ms_bob_and_charlie_differ() {
        let a = pi_tangle(&sigma_ms_charlie(0.7, 0.5).unwrap()).unwrap();
        let b = pi_tangle(&sigma_ms_bob(0.7, 0.5).unwrap()).unwrap();
        assert!((a - b).abs() > 1e-3);
    }

    #[test]
    fn clamping_rules() {
        assert_eq!(clamp_nonneg(-1e-13, "x").unwrap(), 0.0);
        assert_eq!(clamp_nonneg(0.25, "x").unwrap(), 0.25);
        assert!(matches!(clamp_nonneg(-1e-9, "x"), Err(Error::InternalConsistency(_))));
    }
}
