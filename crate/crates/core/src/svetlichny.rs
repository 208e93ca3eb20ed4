//! Svetlichny operator, its expectation values and maximization.
//!
//! With `X = x.sigma` for each setting and `K = C + C'`, `K' = C - C'`:
//!
//! ```text
//! S = A B K + A B' K' + A' B K' - A' B' K
//! ```
//!
//! Hybrid local-nonlocal models satisfy `<S> <= 4`; quantum mechanics reaches
//! `4 sqrt 2`.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli_x, pauli_y, pauli_z, re, CMatrix, HermMatrix};
use crate::optimize::{multistart, NelderMeadOptions};
use crate::states::{check_theta, DensityMatrix3, Family};
use crate::unruh::check_r;

/// Bound on `<S>` for hybrid local-nonlocal correlations.
pub const CLASSICAL_BOUND: f64 = 4.0;

/// `S_max` must exceed [`CLASSICAL_BOUND`] by more than this to count as a
/// violation; closed forms evaluated at the bound carry ~1e-15 round-off.
pub const VIOLATION_TOL: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-12;

pub fn is_violation(s: f64) -> bool {
    s > CLASSICAL_BOUND + VIOLATION_TOL
}

/// Six measurement directions `a, a', b, b', c, c'`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSettings {
    pub vectors: [[f64; 3]; 6],
}

impl MeasurementSettings {
    pub fn new(vectors: [[f64; 3]; 6]) -> Result<Self> {
        for (k, v) in vectors.iter().enumerate() {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if !((n - 1.0).abs() <= UNIT_TOL) {
                return Err(Error::invalid(format!("setting {k} has norm {n}, expected 1")));
            }
        }
        Ok(MeasurementSettings { vectors })
    }

    /// Builds settings from `(polar, azimuth)` pairs, one per vector.
    pub fn from_angles(angles: &[f64]) -> Self {
        assert_eq!(angles.len(), 12, "expected 12 angles");
        let mut vectors = [[0.0; 3]; 6];
        for (k, v) in vectors.iter_mut().enumerate() {
            *v = direction(angles[2 * k], angles[2 * k + 1]);
        }
        MeasurementSettings { vectors }
    }

    pub fn a(&self) -> [f64; 3] {
        self.vectors[0]
    }
    pub fn a_prime(&self) -> [f64; 3] {
        self.vectors[1]
    }
    pub fn b(&self) -> [f64; 3] {
        self.vectors[2]
    }
    pub fn b_prime(&self) -> [f64; 3] {
        self.vectors[3]
    }
    pub fn c(&self) -> [f64; 3] {
        self.vectors[4]
    }
    pub fn c_prime(&self) -> [f64; 3] {
        self.vectors[5]
    }
}

#[inline]
fn direction(polar: f64, azimuth: f64) -> [f64; 3] {
    let (sp, cp) = polar.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    [sp * ca, sp * sa, cp]
}

/// `n . sigma`
pub fn observable(n: [f64; 3]) -> CMatrix {
    let x = pauli_x().scale(re(n[0]));
    let y = pauli_y().scale(re(n[1]));
    let z = pauli_z().scale(re(n[2]));
    &(&x + &y) + &z
}

pub fn svetlichny_operator(s: &MeasurementSettings) -> Result<HermMatrix> {
    let s = MeasurementSettings::new(s.vectors)?;
    let [a, a2, b, b2, c, c2] = s.vectors.map(observable);
    let k = &c + &c2;
    let k2 = &c - &c2;
    let term = |x: &CMatrix, y: &CMatrix, z: &CMatrix| kron(&kron(x, y), z);
    let sum = &(&term(&a, &b, &k) + &term(&a, &b2, &k2)) + &term(&a2, &b, &k2);
    HermMatrix::new(&sum - &term(&a2, &b2, &k))
}

/// `tr(rho S)`
pub fn expectation(rho: &DensityMatrix3, s: &MeasurementSettings) -> Result<f64> {
    let op = svetlichny_operator(s)?;
    let v = (rho.matrix() * op.matrix()).trace();
    if v.im.abs() > 1e-8 {
        return Err(Error::consistency(format!(
            "<S> has imaginary part {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// Three-body correlations `T_ijk = tr(rho sigma_i (x) sigma_j (x) sigma_k)`.
///
/// `<S>` depends on `rho` only through `T`, which makes it a cheap
/// multilinear form for the optimizer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationTensor(pub [[[f64; 3]; 3]; 3]);

impl CorrelationTensor {
    pub fn from_state(rho: &DensityMatrix3) -> Self {
        let paulis = [pauli_x(), pauli_y(), pauli_z()];
        let m = rho.matrix();
        let mut t = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    // tr(rho P) = sum_{u,v} rho[u][v] P[v][u] with P a Pauli string.
                    let mut acc = re(0.0);
                    for u in 0..8 {
                        for v in 0..8 {
                            let p = paulis[i][(v >> 2, u >> 2)]
                                * paulis[j][((v >> 1) & 1, (u >> 1) & 1)]
                                * paulis[k][(v & 1, u & 1)];
                            if p.re != 0.0 || p.im != 0.0 {
                                acc += m[(u, v)] * p;
                            }
                        }
                    }
                    t[i][j][k] = acc.re;
                }
            }
        }
        CorrelationTensor(t)
    }

    /// `sum T_ijk x_i y_j z_k`
    #[inline]
    fn contract(&self, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3]) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let xy = x[i] * y[j];
                let t = &self.0[i][j];
                acc += xy * (t[0] * z[0] + t[1] * z[1] + t[2] * z[2]);
            }
        }
        acc
    }

    pub fn svetlichny_value(&self, s: &MeasurementSettings) -> f64 {
        let [a, a2, b, b2, c, c2] = s.vectors;
        let k = [c[0] + c2[0], c[1] + c2[1], c[2] + c2[2]];
        let k2 = [c[0] - c2[0], c[1] - c2[1], c[2] - c2[2]];
        self.contract(&a, &b, &k) + self.contract(&a, &b2, &k2) + self.contract(&a2, &b, &k2)
            - self.contract(&a2, &b2, &k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmaxMethod {
    ClosedForm,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmaxResult {
    pub value: f64,
    /// Maximizing settings; absent for closed forms.
    pub settings: Option<MeasurementSettings>,
    pub method: SmaxMethod,
    pub violated: bool,
}

#[derive(Clone, Debug)]
pub struct SmaxOptions {
    pub restarts: usize,
    pub seed: u64,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for SmaxOptions {
    fn default() -> Self {
        SmaxOptions {
            restarts: 128,
            seed: 0,
            nelder_mead: NelderMeadOptions {
                initial_step: 0.6,
                f_tol: 1e-10,
                x_tol: 1e-8,
                max_evals: 20_000,
                rebuilds: 2,
            },
        }
    }
}

/// Deterministic starts in the x-z and x-y planes. All states studied here
/// have real amplitudes, and their optimal settings sit in one of these.
fn plane_starts() -> Vec<Vec<f64>> {
    let mut starts = Vec::new();
    let offsets = [0.0, 0.3, 0.7, 1.1];
    for (n, off) in offsets.iter().enumerate() {
        // x-z plane: azimuth 0, polar angles spread around the circle.
        let xz: Vec<f64> = (0..6)
            .flat_map(|k| [off + k as f64 * PI / 6.0 + n as f64 * 0.1, 0.0])
            .collect();
        starts.push(xz);
        // x-y plane: polar pi/2.
        let xy: Vec<f64> = (0..6)
            .flat_map(|k| [PI / 2.0, off + k as f64 * PI / 4.0])
            .collect();
        starts.push(xy);
    }
    starts
}

fn random_direction_angles(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..6)
        .flat_map(|_| {
            let u: f64 = rng.gen_range(-1.0..1.0);
            let az: f64 = rng.gen_range(0.0..2.0 * PI);
            [u.acos(), az]
        })
        .collect()
}

/// Maximizes `<S>` over all six directions.
pub fn s_max_numeric(rho: &DensityMatrix3, opts: &SmaxOptions) -> Result<SmaxResult> {
    if opts.restarts == 0 {
        return Err(Error::invalid("s_max_numeric needs at least one restart"));
    }
    let t = CorrelationTensor::from_state(rho);
    let objective = |x: &[f64]| -t.svetlichny_value(&MeasurementSettings::from_angles(x));
    let res = multistart(
        &objective,
        &plane_starts(),
        opts.restarts,
        opts.seed,
        random_direction_angles,
        &opts.nelder_mead,
    );
    let settings = MeasurementSettings::from_angles(&res.best.x);
    let value = t.svetlichny_value(&settings);
    Ok(SmaxResult {
        value,
        settings: Some(settings),
        method: SmaxMethod::Numeric,
        violated: is_violation(value),
    })
}

/// Closed-form `S_max` of the accelerated families.
pub fn s_max_closed(family: Family, theta: f64, r: f64) -> Result<f64> {
    check_theta(theta)?;
    check_r(r)?;
    let (ct, st) = (theta.cos(), theta.sin());
    let (cr, sr) = (r.cos(), r.sin());
    let cr2 = cr * cr;
    Ok(match family {
        Family::GghzCharlie => {
            let zzz = (2.0 * ct * ct * cr2 - 1.0).abs();
            let ghz = SQRT_2 * (2.0 * theta).sin().abs() * cr;
            4.0 * zzz.max(ghz)
        }
        Family::MsCharlie => {
            4.0 * (ct * ct * (cr2 - sr * sr).powi(2) + 2.0 * st * st * cr2).sqrt()
        }
        Family::MsBob => 4.0 * cr * (ct * ct + 2.0 * st * st).sqrt(),
    })
}

pub fn s_max_closed_result(family: Family, theta: f64, r: f64) -> Result<SmaxResult> {
    let value = s_max_closed(family, theta, r)?;
    Ok(SmaxResult {
        value,
        settings: None,
        method: SmaxMethod::ClosedForm,
        violated: is_violation(value),
    })
}

const TAU_TOL: f64 = 1e-12;

fn check_tau(tau: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    let max = r.cos().powi(2);
    if !(tau >= -TAU_TOL && tau <= max + TAU_TOL) {
        return Err(Error::invalid(format!(
            "three-tangle {tau} outside [0, cos^2 r = {max}]"
        )));
    }
    Ok(tau.clamp(0.0, max))
}

/// `S_max` as a function of the three-tangle.
///
/// For GGHZ the relation tracks the `theta_1 <= pi/4` branch; see
/// [`gghz_tangle_branches`] for both.
pub fn s_max_vs_tangle(family: Family, tau: f64, r: f64) -> Result<f64> {
    let tau = check_tau(tau, r)?;
    let (cr, sr) = (r.cos(), r.sin());
    let cr2 = cr * cr;
    Ok(match family {
        Family::GghzCharlie => {
            4.0 * ((cr2 - tau).sqrt() * cr - sr * sr).max((2.0 * tau).sqrt())
        }
        Family::MsCharlie => {
            let c2r = (2.0 * r).cos();
            let slope = 5.0 - 4.0 * cr2 - r.tan().powi(2);
            4.0 * (c2r * c2r + slope * tau).max(0.0).sqrt()
        }
        Family::MsBob => 4.0 * (cr2 + tau).sqrt(),
    })
}

/// Both GGHZ values of `S_max` at a given three-tangle: the map
/// `theta_1 -> tau` is two-to-one, and the `zzz` branch differs between
/// `theta_1 <= pi/4` (returned first) and `theta_1 > pi/4` (second).
pub fn gghz_tangle_branches(tau: f64, r: f64) -> Result<(f64, f64)> {
    let tau = check_tau(tau, r)?;
    let (cr, sr) = (r.cos(), r.sin());
    let root = (cr * cr - tau).sqrt() * cr;
    let ghz = (2.0 * tau).sqrt();
    let lower = 4.0 * (root - sr * sr).abs().max(ghz);
    let upper = 4.0 * (root + sr * sr).max(ghz);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::three_tangle_rank2_closed;
    use crate::linalg::CMatrix;
    use crate::states::gghz;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn ghz_optimal() -> MeasurementSettings {
        // x-y plane settings reaching 4 sqrt 2 on (|000> + |111>)/sqrt 2.
        let d = |az: f64| [az.cos(), az.sin(), 0.0];
        MeasurementSettings::new([
            d(0.0),
            d(FRAC_PI_2),
            d(0.0),
            d(FRAC_PI_2),
            d(-FRAC_PI_4),
            d(FRAC_PI_4),
        ])
        .unwrap()
    }

    #[test]
    fn identical_settings_cancel() {
        let z = [0.0, 0.0, 1.0];
        let s = MeasurementSettings::new([z; 6]).unwrap();
        let op = svetlichny_operator(&s).unwrap();
        assert!(op.max_abs_diff(&CMatrix::zeros(8)) < 1e-15);
        let rho = gghz(0.3).unwrap().density_matrix();
        assert_eq!(expectation(&rho, &s).unwrap(), 0.0);
    }

    #[test]
    fn maximally_mixed_state_gives_zero() {
        let mixed = DensityMatrix3::from_matrix(CMatrix::identity(8).scale(re(0.125))).unwrap();
        let s = ghz_optimal();
        assert!(expectation(&mixed, &s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn ghz_reaches_quantum_bound() {
        let rho = gghz(FRAC_PI_4).unwrap().density_matrix();
        let v = expectation(&rho, &ghz_optimal()).unwrap();
        assert!((v - 4.0 * SQRT_2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn non_unit_settings_rejected() {
        let mut v = [[0.0, 0.0, 1.0]; 6];
        v[3] = [0.0, 0.0, 1.1];
        assert!(MeasurementSettings::new(v).is_err());
    }

    #[test]
    fn tensor_route_matches_operator_route() {
        let rho = Family::MsCharlie.state(0.8, 0.3).unwrap();
        let t = CorrelationTensor::from_state(&rho);
        let angles = [0.3, 1.0, 2.0, 0.1, 1.5, 2.2, 0.7, 0.4, 2.9, 5.0, 1.1, 3.3];
        let s = MeasurementSettings::from_angles(&angles);
        let a = t.svetlichny_value(&s);
        let b = expectation(&rho, &s).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn numeric_reaches_closed_on_reference_states() {
        let opts = SmaxOptions {
            restarts: 16,
            ..Default::default()
        };
        let ghz = gghz(FRAC_PI_4).unwrap().density_matrix();
        let r = s_max_numeric(&ghz, &opts).unwrap();
        assert!((r.value - 4.0 * SQRT_2).abs() < 1e-6);
        assert!(r.violated);
        let prod = gghz(0.0).unwrap().density_matrix();
        let r = s_max_numeric(&prod, &opts).unwrap();
        assert!((r.value - 4.0).abs() < 1e-6);
        assert!(!r.violated);
    }

    #[test]
    fn closed_form_reference_values() {
        assert!((s_max_closed(Family::GghzCharlie, FRAC_PI_4, 0.0).unwrap() - 4.0 * SQRT_2).abs() < 1e-14);
        assert!((s_max_closed(Family::GghzCharlie, 0.0, 0.0).unwrap() - 4.0).abs() < 1e-15);
        for t in [0.0, 0.4, 1.2, FRAC_PI_2] {
            let v = s_max_closed(Family::MsCharlie, t, 0.0).unwrap();
            assert!((v - 4.0 * (1.0 + t.sin().powi(2)).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn tangle_relations() {
        for i in 0..=50 {
            let tau = i as f64 / 50.0;
            let g = s_max_vs_tangle(Family::GghzCharlie, tau, 0.0).unwrap();
            assert!((g - 4.0 * (1.0 - tau).sqrt().max((2.0 * tau).sqrt())).abs() < 1e-14);
            let b = s_max_vs_tangle(Family::MsBob, tau, 0.0).unwrap();
            assert!((b - 4.0 * (1.0 + tau).sqrt()).abs() < 1e-14);
        }
        let v = s_max_vs_tangle(Family::MsCharlie, 0.5, FRAC_PI_4).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        assert!(s_max_vs_tangle(Family::MsCharlie, 0.6, FRAC_PI_4).is_err());
        assert!(s_max_vs_tangle(Family::MsCharlie, -0.1, 0.0).is_err());
    }

    #[test]
    fn gghz_branches_bracket_closed_form() {
        let r = 0.5;
        for i in 0..=40 {
            let t = FRAC_PI_2 * i as f64 / 40.0;
            let tau = three_tangle_rank2_closed(Family::GghzCharlie, t, r).unwrap();
            let (lo, hi) = gghz_tangle_branches(tau, r).unwrap();
            let s = s_max_closed(Family::GghzCharlie, t, r).unwrap();
            let branch = if t <= FRAC_PI_4 { lo } else { hi };
            assert!((s - branch).abs() < 1e-9, "t={t}: {s} vs {branch}");
        }
    }
}
