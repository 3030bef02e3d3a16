//! Truncated complex Taylor series.
//!
//! A [`TaylorSeries`] of order `N` stores the coefficients `c_0 ..= c_N`.
//! Binary operations require both operands to share the same order; use
//! [`TaylorSeries::truncate`] to bring them to a common order explicitly.

use num_complex::Complex64;
use thiserror::Error;

/// Default truncation order for materialized series.
pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("divisor has a vanishing constant term")]
    NonInvertible,
    #[error("exp-integral input has nonzero constant term {0}")]
    RemovableSingularity(Complex64),
    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),
    #[error("a series needs at least one coefficient")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    /// Builds a series from `c_0 ..= c_N`. Rejects NaN/Inf coefficients.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(SeriesError::NonFinite(i));
        }
        Ok(Self { coeffs })
    }

    /// Pads (with zeros) or truncates `coeffs` to exactly `order + 1` terms.
    pub fn from_prefix(coeffs: &[Complex64], order: usize) -> Result<Self, SeriesError> {
        let mut c: Vec<Complex64> = coeffs.iter().copied().take(order + 1).collect();
        c.resize(order + 1, Complex64::new(0.0, 0.0));
        Self::new(c)
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series of `z` itself.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_prefix(&self.coeffs, order).expect("coefficients already validated")
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Returns `q` with `q * other = self` up to the common order.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let b0 = other.coeffs[0];
        if b0.norm() == 0.0 {
            return Err(SeriesError::NonInvertible);
        }
        let n = self.order();
        let mut q = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Self::new(q)
    }

    /// Termwise derivative; the vacated top coefficient is an explicit zero
    /// so the order is unchanged.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 1..=n {
            out[k - 1] = self.coeffs[k] * k as f64;
        }
        Self { coeffs: out }
    }

    /// Termwise antiderivative vanishing at the origin, truncated at the
    /// same order (the top input coefficient is dropped).
    pub fn antiderivative(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..n {
            out[k + 1] = self.coeffs[k] / (k + 1) as f64;
        }
        Self { coeffs: out }
    }

    /// Multiplication by `z`, truncated.
    pub fn shift_up(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[1..].copy_from_slice(&self.coeffs[..n]);
        Self { coeffs: out }
    }

    /// Division by `z`; the leading coefficient is discarded and the order is
    /// kept by padding with zero.
    pub fn shift_down(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[..n].copy_from_slice(&self.coeffs[1..]);
        Self { coeffs: out }
    }

    /// `exp(self)`, from the recurrence `E' = A' E`.
    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
        e[0] = self.coeffs[0].exp();
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=m {
                acc += self.coeffs[k] * (k as f64) * e[m - k];
            }
            e[m] = acc / m as f64;
        }
        Self { coeffs: e }
    }

    /// Given `a` with `a(0) = 0`, returns `exp(∫_0^z a(t)/t dt)`.
    ///
    /// With `a = G - 1` this is `f(z)/z` for the function whose `zf'/f` is `G`.
    pub fn exp_integral(&self) -> Result<Self, SeriesError> {
        let c0 = self.coeffs[0];
        if c0.norm() != 0.0 {
            return Err(SeriesError::RemovableSingularity(c0));
        }
        let n = self.order();
        let mut integral = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 1..=n {
            integral[k] = self.coeffs[k] / k as f64;
        }
        let e = Self { coeffs: integral }.exp();
        Self::new(e.coeffs)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}
