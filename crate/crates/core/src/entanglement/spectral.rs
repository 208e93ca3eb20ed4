//! Analytic spectral decompositions of the accelerated GGHZ and MS states and
//! the two-member ensembles built from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, re, C64};
use crate::states::{check_theta, sigma_ms_charlie, PureState3};
use crate::unruh::check_r;

use super::three_tangle_pure;

/// `rho = p |GHZ'><GHZ'| + (1 - p) |001><001|` with `|GHZ'> = a|000> + b|111>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GghzSpectral {
    pub p: f64,
    pub a: f64,
    pub b: f64,
}

pub fn gghz_spectral(theta1: f64, r: f64) -> Result<GghzSpectral> {
    check_theta(theta1)?;
    check_r(r)?;
    let (ct, st, cr) = (theta1.cos(), theta1.sin(), r.cos());
    let p = ct * ct * cr * cr + st * st;
    // p >= cos^2 r >= 1/2 on the allowed range.
    let s = p.sqrt();
    Ok(GghzSpectral {
        p,
        a: ct * cr / s,
        b: st / s,
    })
}

/// `|Z(phi)> = sqrt(p) |GHZ'> + e^{i phi} sqrt(1 - p) |001>`.
pub fn z_phi_state(theta1: f64, r: f64, phi: f64) -> Result<PureState3> {
    let GghzSpectral { p, a, b } = gghz_spectral(theta1, r)?;
    let mut amps = [re(0.0); 8];
    amps[0b000] = re(p.sqrt() * a);
    amps[0b111] = re(p.sqrt() * b);
    amps[0b001] = Complex64::from_polar((1.0 - p).max(0.0).sqrt(), phi);
    PureState3::new(amps)
}

/// The rank-2 spectral form `Lambda_+ |Psi_+><Psi_+| + Lambda_- |Psi_-><Psi_-|`
/// of the MS state with Charlie accelerated.
///
/// The eigenvectors are supported on `|000>, |001>, |110>, |111>` with
/// components `(X, Y, Z, W) / N`:
///
/// ```text
/// Delta = cos^2 t + cos^2 r [sin^2 t - sin^2 r (1 + cos^2 t)^2]
/// mu    = cos^2 r - sin^2 r cos^2 t
/// X = cos r (mu +- sqrt Delta)     Y = sin t cos t sin^2 r
/// Z = cos t X                      W = sin t (cos^2 r +- sqrt Delta)
/// Lambda = (1 +- sqrt Delta) / 2
/// ```
///
/// At `t = 0`, `t = pi/2` or `Delta = 0` the formula for one (or both)
/// vectors vanishes identically; those vectors are then recovered from the
/// range of the matrix instead.
#[derive(Clone, Debug, PartialEq)]
pub struct MsSpectral {
    pub delta: f64,
    pub mu: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub psi_plus: [C64; 8],
    pub psi_minus: [C64; 8],
    /// Squared norms `X^2 + Y^2 + Z^2 + W^2` of the unnormalized vectors.
    pub norm_sq: [f64; 2],
}

const SUPPORT: [usize; 4] = [0b000, 0b001, 0b110, 0b111];
const DEGENERATE_NORM: f64 = 1e-12;

pub fn ms_spectral(theta3: f64, r: f64) -> Result<MsSpectral> {
    check_theta(theta3)?;
    check_r(r)?;
    let (ct, st) = (theta3.cos(), theta3.sin());
    let (cr, sr) = (r.cos(), r.sin());
    let (cr2, sr2) = (cr * cr, sr * sr);
    let mut delta = ct * ct + cr2 * (st * st - sr2 * (1.0 + ct * ct).powi(2));
    if delta < 0.0 {
        if delta < -1e-12 {
            return Err(Error::consistency(format!("Delta = {delta:e} < 0")));
        }
        delta = 0.0;
    }
    let sd = delta.sqrt();
    let mu = cr2 - sr2 * ct * ct;

    let raw = |sign: f64| -> [f64; 4] {
        let x = cr * (mu + sign * sd);
        let y = st * ct * sr2;
        let z = ct * x;
        let w = st * (cr2 + sign * sd);
        [x, y, z, w]
    };
    let embed = |v: [f64; 4], scale: f64| -> [C64; 8] {
        let mut out = [re(0.0); 8];
        for (k, &idx) in SUPPORT.iter().enumerate() {
            out[idx] = re(v[k] * scale);
        }
        out
    };

    let plus = raw(1.0);
    let minus = raw(-1.0);
    let n_plus: f64 = plus.iter().map(|x| x * x).sum();
    let n_minus: f64 = minus.iter().map(|x| x * x).sum();
    let lambda_plus = 0.5 * (1.0 + sd);
    let lambda_minus = 0.5 * (1.0 - sd);

    let sigma = sigma_ms_charlie(theta3, r)?;
    let m = sigma.matrix();
    let columns: Vec<[C64; 8]> = SUPPORT
        .iter()
        .map(|&j| {
            let mut col = [re(0.0); 8];
            for (i, c) in col.iter_mut().enumerate() {
                *c = m[(i, j)];
            }
            col
        })
        .collect();

    let (psi_plus, psi_minus) = if n_plus > DEGENERATE_NORM {
        let psi_plus = embed(plus, 1.0 / n_plus.sqrt());
        let psi_minus = if n_minus > DEGENERATE_NORM {
            embed(minus, 1.0 / n_minus.sqrt())
        } else {
            // sigma |v> - Lambda_+ <Psi_+|v> |Psi_+> = Lambda_- <Psi_-|v> |Psi_->.
            // With Lambda_- = 0 any unit vector orthogonal to Psi_+ will do.
            best_residual(&columns, &[psi_plus])
                .or_else(|| best_residual(&support_units(), &[psi_plus]))
                .ok_or_else(|| Error::consistency("cannot recover Psi_-"))?
        };
        (psi_plus, psi_minus)
    } else {
        // Delta = 0: sigma is half a rank-2 projector; any orthonormal basis
        // of its range diagonalizes it.
        let first = best_residual(&columns, &[])
            .ok_or_else(|| Error::consistency("sigma has empty range"))?;
        let second = best_residual(&columns, &[first])
            .ok_or_else(|| Error::consistency("sigma has rank < 2 at Delta = 0"))?;
        (first, second)
    };

    Ok(MsSpectral {
        delta,
        mu,
        lambda_plus,
        lambda_minus,
        psi_plus,
        psi_minus,
        norm_sq: [n_plus, n_minus],
    })
}

fn support_units() -> Vec<[C64; 8]> {
    SUPPORT
        .iter()
        .map(|&i| {
            let mut v = [re(0.0); 8];
            v[i] = re(1.0);
            v
        })
        .collect()
}

/// Picks the candidate with the largest component orthogonal to `basis` and
/// normalizes that component.
fn best_residual(columns: &[[C64; 8]], basis: &[[C64; 8]]) -> Option<[C64; 8]> {
    let mut best: Option<([C64; 8], f64)> = None;
    for col in columns {
        let mut v = *col;
        for b in basis {
            let proj = inner(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
        let n = norm_sqr(&v);
        if best.as_ref().map_or(true, |(_, bn)| n > *bn) {
            best = Some((v, n));
        }
    }
    let (mut v, n) = best?;
    if n <= 1e-20 {
        return None;
    }
    let s = n.sqrt();
    // Fix the sign so the largest component is positive.
    let lead = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(re(1.0));
    let phase = if lead.norm() > 0.0 { lead.conj() / lead.norm() } else { re(1.0) };
    for x in &mut v {
        *x *= phase / s;
    }
    Some(v)
}

/// `|Phi_+-(phi)> = sqrt(Lambda_+) |Psi_+> +- e^{i phi} sqrt(Lambda_-) |Psi_->`.
pub fn ms_phi_states(theta3: f64, r: f64, phi: f64) -> Result<(PureState3, PureState3)> {
    let sp = ms_spectral(theta3, r)?;
    let (a, b) = (sp.lambda_plus.sqrt(), sp.lambda_minus.sqrt());
    let e = Complex64::from_polar(b, phi);
    let build = |sign: f64| {
        let mut amps = [re(0.0); 8];
        for i in 0..8 {
            amps[i] = sp.psi_plus[i] * a + sp.psi_minus[i] * e * sign;
        }
        PureState3::normalized(amps)
    };
    Ok((build(1.0)?, build(-1.0)?))
}

/// Average three-tangle of the `Phi_+-(phi)` ensemble via the hyperdeterminant.
pub fn ms_phi_average_numeric(theta3: f64, r: f64, phi: f64) -> Result<f64> {
    let (p, m) = ms_phi_states(theta3, r, phi)?;
    Ok(0.5 * (three_tangle_pure(&p) + three_tangle_pure(&m)))
}

/// The same average from the closed expression in the eigenvector components:
///
/// ```text
/// 4 L+^2 D+^2 + 4 L-^2 D-^2 + 4 L+ L- M^2 + 8 L+ L- D+ D- cos 2phi
/// D = x w - y z,  M = (x+ w- + x- w+) - (y+ z- + y- z+)
/// ```
pub fn ms_phi_average_closed(theta3: f64, r: f64, phi: f64) -> Result<f64> {
    let sp = ms_spectral(theta3, r)?;
    let comp = |v: &[C64; 8]| [v[0b000].re, v[0b001].re, v[0b110].re, v[0b111].re];
    let [xp, yp, zp, wp] = comp(&sp.psi_plus);
    let [xm, ym, zm, wm] = comp(&sp.psi_minus);
    let (lp, lm) = (sp.lambda_plus, sp.lambda_minus);
    let dp = xp * wp - yp * zp;
    let dm = xm * wm - ym * zm;
    let mix = (xp * wm + xm * wp) - (yp * zm + ym * zp);
    Ok(4.0 * lp * lp * dp * dp
        + 4.0 * lm * lm * dm * dm
        + 4.0 * lp * lm * mix * mix
        + 8.0 * lp * lm * dp * dm * (2.0 * phi).cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{herm_eigvals, CMatrix};
    use crate::states::rho_gghz_charlie;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn grid() -> Vec<(f64, f64)> {
        let mut g = Vec::new();
        for i in 0..=12 {
            for j in 0..=8 {
                g.push((FRAC_PI_2 * i as f64 / 12.0, FRAC_PI_4 * j as f64 / 8.0));
            }
        }
        g
    }

    #[test]
    fn z_phi_tangle_is_phase_independent() {
        for (t, r) in grid() {
            let vals: Vec<f64> = (0..32)
                .map(|k| three_tangle_pure(&z_phi_state(t, r, 2.0 * PI * k as f64 / 32.0).unwrap()))
                .collect();
            let spread = vals.iter().cloned().fold(f64::MIN, f64::max)
                - vals.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread <= 1e-10, "t={t} r={r}");
            let GghzSpectral { p, a, b } = gghz_spectral(t, r).unwrap();
            assert!((vals[0] - 4.0 * p * p * a * a * b * b).abs() < 1e-13);
        }
    }

    #[test]
    fn z_phi_pair_averages_to_rho() {
        for (t, r) in grid() {
            for phi in [0.0, 0.7, 2.0] {
                let z1 = z_phi_state(t, r, phi).unwrap().projector();
                let z2 = z_phi_state(t, r, phi + PI).unwrap().projector();
                let avg = (&z1 + &z2).scale(re(0.5));
                let rho = rho_gghz_charlie(t, r).unwrap();
                assert!(avg.max_abs_diff(rho.matrix()) <= 1e-12);
            }
        }
        let z = z_phi_state(FRAC_PI_4, 0.0, 1.3).unwrap();
        assert!((z.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(z.amplitudes()[1].norm() < 1e-15);
    }

    #[test]
    fn ms_eigenpairs() {
        for (t, r) in grid() {
            let sp = ms_spectral(t, r).unwrap();
            assert!(inner(&sp.psi_plus, &sp.psi_minus).norm() <= 1e-10, "t={t} r={r}");
            assert_eq!(sp.lambda_plus + sp.lambda_minus, 1.0);
            let sigma = sigma_ms_charlie(t, r).unwrap();
            let rebuilt = &CMatrix::outer(&sp.psi_plus).scale(re(sp.lambda_plus))
                + &CMatrix::outer(&sp.psi_minus).scale(re(sp.lambda_minus));
            assert!(rebuilt.max_abs_diff(sigma.matrix()) <= 1e-10, "t={t} r={r}");
            let ev = herm_eigvals(sigma.herm());
            assert!((ev[7] - sp.lambda_plus).abs() <= 1e-10);
            assert!((ev[6] - sp.lambda_minus).abs() <= 1e-10);
        }
    }

    #[test]
    fn ms_normalization_closed_form() {
        // N^2 = +-2 sqrt(Delta) [(1 + mu)(cos^2 r +- sqrt Delta) - sin^2 r cos^2 r cos^2 t (1 + cos^2 t)]
        for (t, r) in [(FRAC_PI_3, 0.3), (0.2, 0.7), (1.0, 0.1)] {
            let sp = ms_spectral(t, r).unwrap();
            let (ct2, cr2, sr2) = (t.cos().powi(2), r.cos().powi(2), r.sin().powi(2));
            let sd = sp.delta.sqrt();
            for (k, sign) in [(0, 1.0), (1, -1.0)] {
                let n2 = sign * 2.0 * sd
                    * ((1.0 + sp.mu) * (cr2 + sign * sd) - sr2 * cr2 * ct2 * (1.0 + ct2));
                assert!((n2 - sp.norm_sq[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ms_eigenvalues_at_pi3() {
        let (t, r) = (FRAC_PI_3, 0.3);
        let sigma = sigma_ms_charlie(t, r).unwrap();
        let ev = herm_eigvals(sigma.herm());
        let (ct2, st2, cr2, sr2) = (t.cos().powi(2), t.sin().powi(2), r.cos().powi(2), r.sin().powi(2));
        let delta = ct2 + cr2 * (st2 - sr2 * (1.0 + ct2).powi(2));
        assert!((ev[7] - 0.5 * (1.0 + delta.sqrt())).abs() < 1e-10);
        assert!((ev[6] - 0.5 * (1.0 - delta.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn ms_phi_average_routes_agree_and_pi_half_is_optimal() {
        for (t, r) in grid() {
            for phi in [0.0, 0.4, FRAC_PI_2, 2.5] {
                let a = ms_phi_average_numeric(t, r, phi).unwrap();
                let b = ms_phi_average_closed(t, r, phi).unwrap();
                assert!((a - b).abs() < 1e-10, "t={t} r={r} phi={phi}: {a} vs {b}");
            }
            let half = ms_phi_average_closed(t, r, FRAC_PI_2).unwrap();
            let zero = ms_phi_average_closed(t, r, 0.0).unwrap();
            let target = r.cos().powi(2) * t.sin().powi(2);
            assert!((half - target).abs() <= 1e-10, "t={t} r={r}: {half} vs {target}");
            assert!(half <= zero + 1e-15);
        }
    }

    #[test]
    fn ms_phi_pair_reassembles_sigma() {
        for (t, r) in [(0.0, 0.5), (0.9, 0.2), (FRAC_PI_2, FRAC_PI_4), (0.0, FRAC_PI_4)] {
            let (p, m) = ms_phi_states(t, r, 0.8).unwrap();
            let avg = (&p.projector() + &m.projector()).scale(re(0.5));
            let sigma = sigma_ms_charlie(t, r).unwrap();
            assert!(avg.max_abs_diff(sigma.matrix()) < 1e-12);
        }
    }
}
