//! Built-in probe states.

use alloc::string::String;
use alloc::vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{c, re, C64};
use crate::spin::{Spin, SpinState};
use crate::{Error, Result};

/// `(|2,2⟩ + √2 |2,−1⟩)/√3`.
pub fn tetra1() -> SpinState {
    let spin = Spin::from_twice(4).expect("spin 2");
    let s = 1.0 / 3f64.sqrt();
    let z = C64::new(0.0, 0.0);
    SpinState::from_normalized(spin, vec![re(s), z, z, re(2f64.sqrt() * s), z])
}

/// `½(|2,2⟩ + |2,−2⟩ + i√2 |2,0⟩)`.
pub fn tetra2() -> SpinState {
    let spin = Spin::from_twice(4).expect("spin 2");
    let z = C64::new(0.0, 0.0);
    SpinState::from_normalized(
        spin,
        vec![re(0.5), z, c(0.0, 0.5 * 2f64.sqrt()), z, re(0.5)],
    )
}

/// `(|3,2⟩ + |3,−2⟩)/√2`.
pub fn balance() -> SpinState {
    let spin = Spin::from_twice(6).expect("spin 3");
    let h = re(core::f64::consts::FRAC_1_SQRT_2);
    let z = C64::new(0.0, 0.0);
    SpinState::from_normalized(spin, vec![z, h, z, z, z, h, z])
}

/// The maximally polarized state `|J, J⟩`.
pub fn coherent(spin: Spin) -> SpinState {
    SpinState::basis(spin, spin.j()).expect("m = J is always valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedState {
    Tetra1,
    Tetra2,
    Balance,
}

impl NamedState {
    pub const ALL: [NamedState; 3] = [Self::Tetra1, Self::Tetra2, Self::Balance];

    pub fn state(self) -> SpinState {
        match self {
            Self::Tetra1 => tetra1(),
            Self::Tetra2 => tetra2(),
            Self::Balance => balance(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Tetra1 => "tetra1",
            Self::Tetra2 => "tetra2",
            Self::Balance => "balance",
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetra1" => Ok(Self::Tetra1),
            "tetra2" => Ok(Self::Tetra2),
            "balance" => Ok(Self::Balance),
            other => Err(Error::InvalidArgument(String::from("unknown state `") + other + "`")),
        }
    }
}

impl serde::Serialize for NamedState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}
