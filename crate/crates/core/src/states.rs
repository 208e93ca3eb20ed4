//! The initial pure states and the three accelerated mixed states.
//!
//! Pure families (three qubits, `|abc>` big-endian):
//!
//! * generalized GHZ: `cos t |000> + sin t |111>`
//! * maximally slice: `(|000> + |11>(cos t |0> + sin t |1>)) / sqrt 2`
//!
//! The mixed states are written out entry by entry; the Unruh channel in
//! [`crate::unruh`] produces the same matrices and the two routes are
//! cross-checked in tests.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eigvals, re, CMatrix, HermMatrix, C64};
use crate::unruh::{check_r, Party};

const NORM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Which initial state is shared and which party accelerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Generalized GHZ, Charlie accelerated (angle `theta_1`).
    #[serde(rename = "gghz")]
    GghzCharlie,
    /// Maximally slice state, Charlie accelerated (angle `theta_3`).
    #[serde(rename = "ms")]
    MsCharlie,
    /// Maximally slice state, Bob accelerated (angle `theta_3`).
    #[serde(rename = "ms-bob")]
    MsBob,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::GghzCharlie, Family::MsCharlie, Family::MsBob];

    pub fn name(self) -> &'static str {
        match self {
            Family::GghzCharlie => "gghz",
            Family::MsCharlie => "ms",
            Family::MsBob => "ms-bob",
        }
    }

    pub fn accelerated_party(self) -> Party {
        match self {
            Family::GghzCharlie | Family::MsCharlie => Party::C,
            Family::MsBob => Party::B,
        }
    }

    /// The shared state before anyone accelerates.
    pub fn pure_state(self, theta: f64) -> Result<PureState3> {
        match self {
            Family::GghzCharlie => gghz(theta),
            Family::MsCharlie | Family::MsBob => ms(theta),
        }
    }

    /// Closed-form accelerated state.
    pub fn state(self, theta: f64, r: f64) -> Result<DensityMatrix3> {
        match self {
            Family::GghzCharlie => rho_gghz_charlie(theta, r),
            Family::MsCharlie => sigma_ms_charlie(theta, r),
            Family::MsBob => sigma_ms_bob(theta, r),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gghz" | "gghz-charlie" => Ok(Family::GghzCharlie),
            "ms" | "ms-charlie" => Ok(Family::MsCharlie),
            "ms-bob" => Ok(Family::MsBob),
            other => Err(Error::invalid(format!(
                "unknown family {other:?} (expected gghz, ms, ms-bob)"
            ))),
        }
    }
}

/// A family member: family plus its angle in `[0, pi/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFamily {
    pub family: Family,
    pub theta: f64,
}

impl StateFamily {
    pub fn new(family: Family, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(StateFamily { family, theta })
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2 + 1e-15).contains(&theta) {
        return Err(Error::invalid(format!("angle {theta} outside [0, pi/2]")));
    }
    Ok(())
}

/// Normalized three-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState3 {
    amps: [C64; 8],
}

impl PureState3 {
    pub fn new(amps: [C64; 8]) -> Result<Self> {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !((n - 1.0).abs() <= NORM_TOL) {
            return Err(Error::invalid(format!("state norm^2 = {n}, expected 1")));
        }
        Ok(PureState3 { amps })
    }

    /// Normalizes `amps`; fails on the zero vector.
    pub fn normalized(mut amps: [C64; 8]) -> Result<Self> {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 1e-300) {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        for a in &mut amps {
            *a /= n;
        }
        Ok(PureState3 { amps })
    }

    pub fn from_slice(v: &[C64]) -> Result<Self> {
        let amps: [C64; 8] = v
            .try_into()
            .map_err(|_| Error::invalid(format!("expected 8 amplitudes, got {}", v.len())))?;
        Self::new(amps)
    }

    pub fn amplitudes(&self) -> &[C64; 8] {
        &self.amps
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.amps)
    }

    pub fn density_matrix(&self) -> DensityMatrix3 {
        DensityMatrix3 {
            matrix: HermMatrix::new(self.projector()).expect("projector is Hermitian"),
            provenance: None,
        }
    }
}

pub fn gghz(theta1: f64) -> Result<PureState3> {
    check_theta(theta1)?;
    let mut amps = [re(0.0); 8];
    amps[0b000] = re(theta1.cos());
    amps[0b111] = re(theta1.sin());
    PureState3::new(amps)
}

pub fn ms(theta3: f64) -> Result<PureState3> {
    check_theta(theta3)?;
    let mut amps = [re(0.0); 8];
    amps[0b000] = re(FRAC_1_SQRT_2);
    amps[0b110] = re(FRAC_1_SQRT_2 * theta3.cos());
    amps[0b111] = re(FRAC_1_SQRT_2 * theta3.sin());
    PureState3::new(amps)
}

/// Where a density matrix came from. Informational only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: Family,
    pub theta: f64,
    pub r: f64,
}

/// Validated 8x8 three-qubit density matrix: Hermitian, unit trace, PSD.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix3 {
    matrix: HermMatrix,
    provenance: Option<Provenance>,
}

impl DensityMatrix3 {
    pub fn new(matrix: HermMatrix) -> Result<Self> {
        if matrix.dim() != 8 {
            return Err(Error::invalid(format!(
                "three-qubit density matrix must be 8x8, got {0}x{0}",
                matrix.dim()
            )));
        }
        let tr = matrix.trace();
        if !((tr - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::invalid(format!("trace {tr} != 1")));
        }
        let min = herm_eigvals(&matrix)[0];
        if !(min >= -PSD_TOL) {
            return Err(Error::invalid(format!("not positive semidefinite (min eigenvalue {min:e})")));
        }
        Ok(DensityMatrix3 {
            matrix,
            provenance: None,
        })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermMatrix::new(m)?)
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn herm(&self) -> &HermMatrix {
        &self.matrix
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.matrix()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eigvals(&self.matrix)
    }

    /// `tr(rho^2)`
    pub fn purity(&self) -> f64 {
        (self.matrix() * self.matrix()).trace().re
    }
}

/// Builds a real symmetric 8x8 matrix from diagonal and upper off-diagonal
/// entries.
fn real_symmetric(diag: &[(usize, f64)], off: &[(usize, usize, f64)]) -> CMatrix {
    let mut m = CMatrix::zeros(8);
    for &(i, v) in diag {
        m[(i, i)] = re(v);
    }
    for &(i, j, v) in off {
        m[(i, j)] = re(v);
        m[(j, i)] = re(v);
    }
    m
}

fn check_angles(theta: f64, r: f64) -> Result<()> {
    check_theta(theta)?;
    check_r(r)
}

fn finish(m: CMatrix, family: Family, theta: f64, r: f64) -> Result<DensityMatrix3> {
    Ok(DensityMatrix3::from_matrix(m)?.with_provenance(Provenance { family, theta, r }))
}

/// GGHZ state with Charlie accelerated, region II traced out.
pub fn rho_gghz_charlie(theta1: f64, r: f64) -> Result<DensityMatrix3> {
    check_angles(theta1, r)?;
    let (ct, st) = (theta1.cos(), theta1.sin());
    let (cr, sr) = (r.cos(), r.sin());
    let m = real_symmetric(
        &[
            (0b000, ct * ct * cr * cr),
            (0b001, ct * ct * sr * sr),
            (0b111, st * st),
        ],
        &[(0b000, 0b111, st * ct * cr)],
    );
    finish(m, Family::GghzCharlie, theta1, r)
}

/// MS state with Charlie accelerated.
pub fn sigma_ms_charlie(theta3: f64, r: f64) -> Result<DensityMatrix3> {
    check_angles(theta3, r)?;
    let (ct, st) = (theta3.cos(), theta3.sin());
    let (cr2, sr2) = (r.cos().powi(2), r.sin().powi(2));
    let cr = r.cos();
    let m = real_symmetric(
        &[
            (0b000, 0.5 * cr2),
            (0b001, 0.5 * sr2),
            (0b110, 0.5 * ct * ct * cr2),
            (0b111, 0.5 * (st * st + ct * ct * sr2)),
        ],
        &[
            (0b000, 0b110, 0.5 * ct * cr2),
            (0b000, 0b111, 0.5 * st * cr),
            (0b001, 0b111, 0.5 * ct * sr2),
            (0b110, 0b111, 0.5 * st * ct * cr),
        ],
    );
    finish(m, Family::MsCharlie, theta3, r)
}

/// MS state with Bob accelerated.
pub fn sigma_ms_bob(theta3: f64, r: f64) -> Result<DensityMatrix3> {
    check_angles(theta3, r)?;
    let (ct, st) = (theta3.cos(), theta3.sin());
    let (cr, sr) = (r.cos(), r.sin());
    let m = real_symmetric(
        &[
            (0b000, 0.5 * cr * cr),
            (0b010, 0.5 * sr * sr),
            (0b110, 0.5 * ct * ct),
            (0b111, 0.5 * st * st),
        ],
        &[
            (0b000, 0b110, 0.5 * cr * ct),
            (0b000, 0b111, 0.5 * cr * st),
            (0b110, 0b111, 0.5 * st * ct),
        ],
    );
    finish(m, Family::MsBob, theta3, r)
}
