//! Builtin target functions for approximation experiments.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `x2 sin(2 pi x1)` on `[-1,1]^2`.
    Qsin,
    /// The peaks surface on `[-1,1]^2`.
    Peaks,
    /// The constant 1, in any dimension.
    One,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Qsin, Builtin::Peaks, Builtin::One];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Qsin => "qsin",
            Builtin::Peaks => "peaks",
            Builtin::One => "one",
        }
    }

    /// Required dimension, or `None` if any `n` works.
    pub fn dim(self) -> Option<usize> {
        match self {
            Builtin::Qsin | Builtin::Peaks => Some(2),
            Builtin::One => None,
        }
    }

    pub fn check_dim(self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) if d != n => Err(Error::DimensionMismatch { expected: d, found: n }),
            _ => Ok(()),
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Builtin::Qsin => x[1] * (2.0 * PI * x[0]).sin(),
            Builtin::Peaks => {
                let (x1, x2) = (x[0], x[1]);
                3.0 * (1.0 - x1).powi(2) * (-x1 * x1 - (x2 + 1.0).powi(2)).exp()
                    - 10.0 * (x1 / 5.0 - x1.powi(3) - x2.powi(5)) * (-x1 * x1 - x2 * x2).exp()
                    - (1.0 / 3.0) * (-(x1 + 1.0).powi(2) - x2 * x2).exp()
            }
            Builtin::One => 1.0,
        }
    }

    /// A Euclidean Lipschitz constant on the cube, when one is known exactly.
    ///
    /// For qsin, `|grad|^2 = 4 pi^2 x2^2 cos^2(2 pi x1) + sin^2(2 pi x1)`, which
    /// is at most `4 pi^2` since `4 pi^2 > 1`. Peaks has no closed form.
    pub fn lipschitz(self) -> Option<f64> {
        match self {
            Builtin::Qsin => Some(2.0 * PI),
            Builtin::Peaks => None,
            Builtin::One => Some(0.0),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "builtin:{}", self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    /// Accepts `qsin` or `builtin:qsin`.
    fn from_str(s: &str) -> Result<Self> {
        let name = s.strip_prefix("builtin:").unwrap_or(s);
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::Parameter(format!("unknown builtin function '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(b.to_string().parse::<Builtin>().unwrap(), b);
            assert_eq!(b.name().parse::<Builtin>().unwrap(), b);
        }
        assert!("builtin:nope".parse::<Builtin>().is_err());
    }

    #[test]
    fn known_values() {
        assert!((Builtin::Qsin.eval(&[0.25, 0.5]) - 0.5).abs() < 1e-15);
        // At the origin only the first and last terms survive.
        let expect = 3.0 * (-1f64).exp() - (1.0 / 3.0) * (-1f64).exp();
        assert!((Builtin::Peaks.eval(&[0.0, 0.0]) - expect).abs() < 1e-14);
    }

    #[test]
    fn qsin_lipschitz_constant_holds_on_a_grid() {
        let l = Builtin::Qsin.lipschitz().unwrap();
        let h = 1e-6;
        for i in 0..=40 {
            for j in 0..=40 {
                let x = [-1.0 + i as f64 / 20.0, -1.0 + j as f64 / 20.0];
                let gx = (Builtin::Qsin.eval(&[x[0] + h, x[1]]) - Builtin::Qsin.eval(&[x[0] - h, x[1]])) / (2.0 * h);
                let gy = (Builtin::Qsin.eval(&[x[0], x[1] + h]) - Builtin::Qsin.eval(&[x[0], x[1] - h])) / (2.0 * h);
                assert!(gx.hypot(gy) <= l + 1e-6);
            }
        }
    }

    #[test]
    fn dimension_checks() {
        assert!(Builtin::Qsin.check_dim(3).is_err());
        assert!(Builtin::One.check_dim(5).is_ok());
    }
}
