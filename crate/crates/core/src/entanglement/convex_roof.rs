//! Numerical convex roof of the three-tangle for rank-2 mixtures.
//!
//! Every size-`m` decomposition of `rho = L+ |P+><P+| + L- |P-><P-|` has the
//! form `|z_j> = U_j+ sqrt(L+) |P+> + U_j- sqrt(L-) |P->` for an `m x 2`
//! isometry `U`. The search runs over unconstrained complex `m x 2` matrices
//! that are orthonormalized column-wise (Gram-Schmidt), so every candidate is
//! a valid decomposition and the result is always an upper bound on the
//! convex roof.

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{herm_eigen, re, CMatrix, C64};
use crate::optimize::{multistart, uniform_box, NelderMeadOptions};
use crate::states::{DensityMatrix3, PureState3};

use super::{three_tangle_pure, weighted_tangle};

const RANK_TOL: f64 = 1e-8;
const PURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ConvexRoofOptions {
    pub ensemble_size: usize,
    pub restarts: usize,
    pub seed: u64,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for ConvexRoofOptions {
    fn default() -> Self {
        ConvexRoofOptions {
            ensemble_size: 2,
            restarts: 64,
            seed: 0,
            nelder_mead: NelderMeadOptions {
                initial_step: 0.5,
                f_tol: 1e-10,
                x_tol: 1e-7,
                max_evals: 20_000,
                rebuilds: 2,
            },
        }
    }
}

/// One ensemble member `cos(alpha) sqrt(L+) |P+> + e^{i beta} sin(alpha) sqrt(L-) |P->`
/// (normalized) with probability `weight`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnsembleMember {
    pub alpha: f64,
    pub beta: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Decomposition {
    /// `[L+, L-]`, largest first.
    pub eigenvalues: [f64; 2],
    pub eigenvectors: [[C64; 8]; 2],
    pub members: Vec<EnsembleMember>,
}

impl Rank2Decomposition {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_state(&self, j: usize) -> Result<PureState3> {
        let m = self.members[j];
        let a = m.alpha.cos() * self.eigenvalues[0].max(0.0).sqrt();
        let b = C64::from_polar(m.alpha.sin() * self.eigenvalues[1].max(0.0).sqrt(), m.beta);
        let mut amps = [re(0.0); 8];
        for (i, amp) in amps.iter_mut().enumerate() {
            *amp = self.eigenvectors[0][i] * a + self.eigenvectors[1][i] * b;
        }
        PureState3::normalized(amps)
    }

    /// `sum_j p_j |z_j><z_j|`
    pub fn reassemble(&self) -> Result<CMatrix> {
        let mut acc = CMatrix::zeros(8);
        for j in 0..self.len() {
            let w = self.members[j].weight;
            if w <= 0.0 {
                continue;
            }
            acc = &acc + &self.member_state(j)?.projector().scale(re(w));
        }
        Ok(acc)
    }

    pub fn average_tangle(&self) -> Result<f64> {
        let mut acc = 0.0;
        for j in 0..self.len() {
            let w = self.members[j].weight;
            if w > 0.0 {
                acc += w * three_tangle_pure(&self.member_state(j)?);
            }
        }
        Ok(acc)
    }
}

/// Orthonormalizes the two columns of the `m x 2` matrix encoded in `x`
/// (`4m` reals: re/im pairs, row-major). `None` if the columns are dependent.
fn isometry(x: &[f64], m: usize) -> Option<Vec<[C64; 2]>> {
    let mut u: Vec<[C64; 2]> = (0..m)
        .map(|j| {
            [
                C64::new(x[4 * j], x[4 * j + 1]),
                C64::new(x[4 * j + 2], x[4 * j + 3]),
            ]
        })
        .collect();
    let n0: f64 = u.iter().map(|r| r[0].norm_sqr()).sum::<f64>().sqrt();
    if n0 < 1e-9 {
        return None;
    }
    u.iter_mut().for_each(|r| r[0] /= n0);
    let proj: C64 = u.iter().map(|r| r[0].conj() * r[1]).sum();
    u.iter_mut().for_each(|r| r[1] -= proj * r[0]);
    let n1: f64 = u.iter().map(|r| r[1].norm_sqr()).sum::<f64>().sqrt();
    if n1 < 1e-9 {
        return None;
    }
    u.iter_mut().for_each(|r| r[1] /= n1);
    Some(u)
}

fn members_from(u: &[[C64; 2]], basis: &[[C64; 8]; 2]) -> Vec<[C64; 8]> {
    u.iter()
        .map(|row| {
            let mut z = [re(0.0); 8];
            for (i, zi) in z.iter_mut().enumerate() {
                *zi = row[0] * basis[0][i] + row[1] * basis[1][i];
            }
            z
        })
        .collect()
}

/// Minimizes `sum_j p_j tau(z_j)` over size-`m` decompositions of a rank-2
/// state. Returns the best value and the decomposition achieving it.
pub fn convex_roof_min(
    rho: &DensityMatrix3,
    opts: &ConvexRoofOptions,
) -> Result<(f64, Rank2Decomposition)> {
    let m = opts.ensemble_size;
    if !(2..=4).contains(&m) {
        return Err(Error::invalid(format!("ensemble size {m} not in 2..=4")));
    }
    if opts.restarts == 0 {
        return Err(Error::invalid("convex roof needs at least one restart"));
    }
    let eig = herm_eigen(rho.herm());
    let third = eig.values[5];
    if third > RANK_TOL {
        let rank = eig.values.iter().filter(|&&l| l > RANK_TOL).count();
        return Err(Error::UnsupportedRank {
            rank,
            third_eigenvalue: third,
        });
    }
    let to_arr = |v: &Vec<C64>| -> [C64; 8] { v.as_slice().try_into().expect("8 components") };
    let lambda = [eig.values[7].max(0.0), eig.values[6].max(0.0)];
    let vectors = [to_arr(&eig.vectors[7]), to_arr(&eig.vectors[6])];

    if lambda[1] <= PURE_TOL {
        let psi = PureState3::normalized(vectors[0])?;
        let decomposition = Rank2Decomposition {
            eigenvalues: lambda,
            eigenvectors: vectors,
            members: vec![EnsembleMember {
                alpha: 0.0,
                beta: 0.0,
                weight: 1.0,
            }],
        };
        return Ok((three_tangle_pure(&psi), decomposition));
    }

    let scaled: [[C64; 8]; 2] = [
        vectors[0].map(|x| x * lambda[0].sqrt()),
        vectors[1].map(|x| x * lambda[1].sqrt()),
    ];
    let objective = |x: &[f64]| -> f64 {
        match isometry(x, m) {
            Some(u) => members_from(&u, &scaled).iter().map(weighted_tangle).sum(),
            None => 1.0,
        }
    };
    let sample = |rng: &mut ChaCha8Rng| uniform_box(rng, 4 * m, -1.0, 1.0);
    let result = multistart(&objective, &[], opts.restarts, opts.seed, sample, &opts.nelder_mead);

    let u = isometry(&result.best.x, m)
        .ok_or_else(|| Error::consistency("optimizer ended on a degenerate isometry"))?;
    let members = u
        .iter()
        .map(|row| {
            let (m0, m1) = (row[0].norm(), row[1].norm());
            let alpha = m1.atan2(m0);
            let beta = if m0 > 0.0 && m1 > 0.0 { row[1].arg() - row[0].arg() } else { 0.0 };
            EnsembleMember {
                alpha,
                beta,
                weight: m0 * m0 * lambda[0] + m1 * m1 * lambda[1],
            }
        })
        .collect();
    Ok((
        result.best.value,
        Rank2Decomposition {
            eigenvalues: lambda,
            eigenvectors: vectors,
            members,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::three_tangle_rank2_closed;
    use crate::states::{ms, Family};

    fn opts(m: usize, seed: u64) -> ConvexRoofOptions {
        ConvexRoofOptions {
            ensemble_size: m,
            restarts: 24,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn pure_input_returns_hyperdeterminant() {
        let psi = ms(0.8).unwrap();
        let (v, dec) = convex_roof_min(&psi.density_matrix(), &opts(2, 0)).unwrap();
        assert!((v - three_tangle_pure(&psi)).abs() < 1e-12);
        assert_eq!(dec.len(), 1);
    }

    #[test]
    fn rejects_high_rank_and_bad_sizes() {
        let mixed = DensityMatrix3::from_matrix(CMatrix::identity(8).scale(re(0.125))).unwrap();
        assert!(matches!(
            convex_roof_min(&mixed, &opts(2, 0)),
            Err(Error::UnsupportedRank { rank: 8, .. })
        ));
        let rho = Family::GghzCharlie.state(0.5, 0.3).unwrap();
        assert!(convex_roof_min(&rho, &opts(5, 0)).is_err());
        assert!(convex_roof_min(&rho, &opts(1, 0)).is_err());
    }

    #[test]
    fn matches_closed_forms_and_reassembles() {
        for fam in Family::ALL {
            for (t, r) in [(0.4, 0.2), (1.0, 0.6), (1.4, 0.75)] {
                let rho = fam.state(t, r).unwrap();
                let closed = three_tangle_rank2_closed(fam, t, r).unwrap();
                let (v, dec) = convex_roof_min(&rho, &opts(3, 7)).unwrap();
                assert!(v >= closed - 1e-6, "{fam} t={t} r={r}: {v} < {closed}");
                assert!(v <= closed + 1e-3, "{fam} t={t} r={r}: {v} > {closed}");
                let total: f64 = dec.members.iter().map(|m| m.weight).sum();
                assert!((total - 1.0).abs() < 1e-10);
                assert!(dec.reassemble().unwrap().max_abs_diff(rho.matrix()) < 1e-10);
                assert!((dec.average_tangle().unwrap() - v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn seed_determines_result() {
        let rho = Family::MsCharlie.state(0.9, 0.4).unwrap();
        let a = convex_roof_min(&rho, &opts(2, 11)).unwrap();
        let b = convex_roof_min(&rho, &opts(2, 11)).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
