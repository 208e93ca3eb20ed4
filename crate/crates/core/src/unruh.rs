//! Fermionic Unruh channel for a single uniformly accelerated party.
//!
//! The accelerated qubit's Minkowski modes map onto Rindler region I and II
//! modes as
//!
//! ```text
//! |0>  ->  cos r |0>_I |0>_II + sin r |1>_I |1>_II
//! |1>  ->  |1>_I |0>_II
//! ```
//!
//! and region II is traced out. The Rindler angle obeys
//! `cos r = 1 / sqrt(1 + exp(-2 pi w c / a))`, so `tan r = exp(-pi w c / a)`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, re, CMatrix, HermMatrix, C64};
use crate::states::{DensityMatrix3, PureState3};

/// Dimensionless acceleration `a / (w c)`; `Infinite` is a distinguished value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Acceleration {
    Finite(f64),
    Infinite,
}

impl Acceleration {
    pub fn finite(x: f64) -> Result<Self> {
        if !(x >= 0.0) || x.is_infinite() {
            return Err(Error::invalid(format!(
                "acceleration a/(wc) must be finite and >= 0, got {x}"
            )));
        }
        Ok(Acceleration::Finite(x))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Acceleration::Infinite)
    }

    /// Numeric value, `f64::INFINITY` for the infinite limit.
    pub fn as_f64(&self) -> f64 {
        match *self {
            Acceleration::Finite(x) => x,
            Acceleration::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Acceleration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Acceleration::Finite(x) => write!(f, "{x}"),
            Acceleration::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Acceleration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(Acceleration::Infinite);
        }
        let x: f64 = t
            .parse()
            .map_err(|_| Error::invalid(format!("cannot parse acceleration {s:?} (use a number or \"inf\")")))?;
        Acceleration::finite(x)
    }
}

impl Serialize for Acceleration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Acceleration::Finite(x) => s.serialize_f64(x),
            Acceleration::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Acceleration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Acceleration::finite(x).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// An acceleration together with its Rindler angle `r` in `[0, pi/4]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AccelParam {
    pub a_over_wc: Acceleration,
    pub r: f64,
}

impl AccelParam {
    pub fn cos_r(&self) -> f64 {
        self.r.cos()
    }
}

pub fn r_from_acceleration(a: Acceleration) -> Result<AccelParam> {
    let r = match a {
        Acceleration::Infinite => FRAC_PI_4,
        Acceleration::Finite(x) if x < 0.0 || x.is_nan() => {
            return Err(Error::invalid(format!("negative acceleration {x}")))
        }
        Acceleration::Finite(x) if x == 0.0 => 0.0,
        Acceleration::Finite(x) => (-PI / x).exp().atan(),
    };
    Ok(AccelParam { a_over_wc: a, r })
}

/// Convenience wrapper for a finite `a/(wc)`.
pub fn rindler_angle(a_over_wc: f64) -> Result<f64> {
    Ok(r_from_acceleration(Acceleration::finite(a_over_wc)?)?.r)
}

pub(crate) fn check_r(r: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_4 + 1e-15).contains(&r) {
        return Err(Error::invalid(format!("Rindler angle r = {r} outside [0, pi/4]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::A, Party::B, Party::C];

    /// Factor index in the `|abc>` ordering.
    pub fn index(self) -> usize {
        match self {
            Party::A => 0,
            Party::B => 1,
            Party::C => 2,
        }
    }

    fn bit(self) -> usize {
        1 << (2 - self.index())
    }
}

/// The 16-dimensional pure state over `(A, B, C)` with the accelerated slot
/// replaced by its region I mode, followed by the region II mode as the
/// last (least significant) factor.
pub fn unruh_purification(psi: &PureState3, party: Party, r: f64) -> Result<Vec<C64>> {
    check_r(r)?;
    let (cr, sr) = (r.cos(), r.sin());
    let bit = party.bit();
    let mut out = vec![re(0.0); 16];
    for (idx, &amp) in psi.amplitudes().iter().enumerate() {
        if amp == re(0.0) {
            continue;
        }
        if idx & bit == 0 {
            out[idx << 1] += amp * cr;
            out[((idx | bit) << 1) | 1] += amp * sr;
        } else {
            out[idx << 1] += amp;
        }
    }
    Ok(out)
}

/// Applies the fermionic Unruh channel to one party of a pure three-qubit
/// state and traces out region II.
pub fn apply_fermionic_unruh(psi: &PureState3, party: Party, r: f64) -> Result<DensityMatrix3> {
    let full = unruh_purification(psi, party, r)?;
    let reduced = partial_trace(&CMatrix::outer(&full), 3, &[2, 2, 2, 2])?;
    DensityMatrix3::new(HermMatrix::new(reduced)?)
}
