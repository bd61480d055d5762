//! Exact polynomial interpolation of Ehrhart (= Hilbert) values.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A polynomial with exact rational coefficients `c_0..c_D`, constant term
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EhrhartPolynomial {
    coeffs: Vec<BigRational>,
}

impl EhrhartPolynomial {
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Degree of the highest nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .unwrap_or(0)
    }

    pub fn eval(&self, n: u64) -> BigRational {
        let x = BigRational::from_integer(BigInt::from(n));
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }

    /// Evaluates at an integer point, requiring an integer value.
    pub fn eval_integer(&self, n: u64) -> Result<BigInt> {
        let v = self.eval(n);
        if !v.is_integer() {
            return Err(Error::DegreeMismatch(format!(
                "polynomial value {v} at {n} is not an integer"
            )));
        }
        Ok(v.to_integer())
    }
}

impl fmt::Display for EhrhartPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && self.coeffs.len() > 1 {
                continue;
            }
            if first {
                write!(f, "{c}")?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            if i == 1 {
                write!(f, "*n")?;
            } else if i > 1 {
                write!(f, "*n^{i}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Lagrange interpolation through `degree + 1` exact points.
pub fn ehrhart_interpolate(values: &[(u32, BigUint)], degree: usize) -> Result<EhrhartPolynomial> {
    if values.len() != degree + 1 {
        return Err(Error::OutOfRange(format!(
            "interpolation of degree {degree} needs exactly {} points, got {}",
            degree + 1,
            values.len()
        )));
    }
    for (i, (n, _)) in values.iter().enumerate() {
        if values[..i].iter().any(|(m, _)| m == n) {
            return Err(Error::OutOfRange(format!("duplicate interpolation node {n}")));
        }
    }

    let mut coeffs = vec![BigRational::zero(); degree + 1];
    for (i, (xi, yi)) in values.iter().enumerate() {
        // Build the basis polynomial prod_{j != i} (X - x_j) / (x_i - x_j).
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in values.iter().enumerate() {
            if j == i {
                continue;
            }
            let root = BigRational::from_integer(BigInt::from(*xj));
            // Multiply basis by (X - root).
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * &root;
            }
            basis = next;
            denom *= BigRational::from_integer(BigInt::from(*xi)) - root;
        }
        let scale = BigRational::from_integer(BigInt::from(yi.clone())) / denom;
        for (k, c) in basis.iter().enumerate() {
            coeffs[k] += c * &scale;
        }
    }
    Ok(EhrhartPolynomial { coeffs })
}
