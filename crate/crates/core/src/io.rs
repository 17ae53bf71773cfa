//! State files and named state presets.
//!
//! State file: `{"n": 5, "omega": 1, "amplitudes": [[re, im], ...]}`.
//! Presets: `delta:k0`, `uniform`, `char:m`, `chirp:b`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::scalar::Scalar;
use crate::wigner::{FourierWignerTable, StateVector, WignerTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: u32,
    pub omega: u32,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state<S: Scalar>(s: &StateVector<S>) -> Self {
        Self {
            n: s.field().modulus(),
            omega: s.omega().value(),
            amplitudes: s
                .amplitudes()
                .iter()
                .map(|x| {
                    let z = x.to_complex();
                    [z.re, z.im]
                })
                .collect(),
        }
    }

    pub fn to_state(&self, require_normalized: bool) -> Result<StateVector<Complex64>> {
        let f = PrimeField::new(self.n as u64)?;
        let w = f.elem(self.omega as i64);
        let amps = self.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        if require_normalized {
            StateVector::new_normalized(w, amps)
        } else {
            StateVector::new(w, amps)
        }
    }
}

pub fn parse_state_json(text: &str, require_normalized: bool) -> Result<StateVector<Complex64>> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed state file: {e}")))?;
    file.to_state(require_normalized)
}

pub fn load_state(path: &Path, require_normalized: bool) -> Result<StateVector<Complex64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_state_json(&text, require_normalized)
}

/// A named preset, before it is materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Delta(i64),
    Uniform,
    Character(i64),
    Chirp(i64),
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let int = |a: Option<&str>| -> Result<i64> {
            a.ok_or_else(|| Error::Invalid(format!("preset `{name}` needs an integer argument")))?
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad preset argument in `{s}`")))
        };
        match name {
            "delta" => Ok(Preset::Delta(int(arg)?)),
            "uniform" if arg.is_none() => Ok(Preset::Uniform),
            "char" => Ok(Preset::Character(int(arg)?)),
            "chirp" => Ok(Preset::Chirp(int(arg)?)),
            _ => Err(Error::Invalid(format!("unknown state preset `{s}`"))),
        }
    }
}

impl Preset {
    /// Unit-modulus amplitudes (not normalized), on any backend.
    pub fn build<S: Scalar>(&self, omega: Fe) -> Result<StateVector<S>> {
        let f = omega.field();
        match *self {
            Preset::Delta(k) => StateVector::delta(omega, f.elem(k)),
            Preset::Uniform => StateVector::uniform(omega),
            Preset::Character(m) => StateVector::character(omega, f.elem(m)),
            Preset::Chirp(b) => StateVector::chirp(omega, f.elem(b)),
        }
    }

    pub fn build_normalized(&self, omega: Fe) -> Result<StateVector<Complex64>> {
        self.build::<Complex64>(omega)?.normalized()
    }
}

/// `(r, s, value)` rows, row-major over `r` then `s`.
pub fn wigner_rows<S: Scalar>(t: &WignerTable<S>) -> Vec<(u32, u32, f64)> {
    let n = t.n;
    t.real_values()
        .into_iter()
        .enumerate()
        .map(|(i, v)| (i as u32 / n, i as u32 % n, v))
        .collect()
}

/// `(q, p, re, im)` rows, row-major over `q` then `p`.
pub fn fourier_wigner_rows<S: Scalar>(t: &FourierWignerTable<S>) -> Vec<(u32, u32, f64, f64)> {
    let n = t.n;
    t.values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let z = v.to_complex();
            (i as u32 / n, i as u32 % n, z.re, z.im)
        })
        .collect()
}
