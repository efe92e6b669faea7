//! Truncated six-parameter Mittag-Leffler series and the H-function built
//! on top of it.
//!
//! ```text
//!   E(z) = Σ_{k=0}^{i} (ρ)_{qk} / (δ)_{pk} · z^k / Γ(γk + β)
//!   H(z) = Γ(β) · E(z)
//! ```
//!
//! Parameters are restricted to positive reals and `z` to the real line.
//! The series is a polynomial in `z`, so it is evaluated for every real `z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::special::{gamma_fn, ln_gamma, pochhammer};

/// The six Mittag-Leffler parameters plus the truncation index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    pub gamma: f64,
    pub beta: f64,
    pub rho: f64,
    pub delta: f64,
    pub p: f64,
    pub q: f64,
    pub trunc: u32,
}

impl MLParams {
    pub fn new(gamma: f64, beta: f64, rho: f64, delta: f64, p: f64, q: f64, trunc: u32) -> Result<Self> {
        let params = MLParams {
            gamma,
            beta,
            rho,
            delta,
            p,
            q,
            trunc,
        };
        params.validate()?;
        Ok(params)
    }

    /// All six real parameters equal to one. The series then reduces to the
    /// truncated exponential series.
    pub fn unit(trunc: u32) -> Self {
        MLParams {
            gamma: 1.0,
            beta: 1.0,
            rho: 1.0,
            delta: 1.0,
            p: 1.0,
            q: 1.0,
            trunc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("rho", self.rho),
            ("delta", self.delta),
            ("p", self.p),
            ("q", self.q),
        ]
    }
}

// Above this argument the individual gamma values overflow and a term is
// assembled from log-gamma differences instead.
const DIRECT_LIMIT: f64 = 170.0;

fn series_term(params: &MLParams, z: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Ok(1.0 / gamma_fn(params.beta)?);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    let denom_arg = params.gamma * kf + params.beta;
    let direct = denom_arg < DIRECT_LIMIT
        && params.rho + params.q * kf < DIRECT_LIMIT
        && params.delta + params.p * kf < DIRECT_LIMIT;
    let term = if direct {
        pochhammer(params.rho, params.q, k)? / pochhammer(params.delta, params.p, k)?
            * libm::pow(z, kf)
            / gamma_fn(denom_arg)?
    } else {
        let log_mag = ln_gamma(params.rho + params.q * kf)? - ln_gamma(params.rho)?
            - (ln_gamma(params.delta + params.p * kf)? - ln_gamma(params.delta)?)
            + kf * libm::log(z.abs())
            - ln_gamma(denom_arg)?;
        let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        sign * libm::exp(log_mag)
    };
    if !term.is_finite() {
        return Err(Error::Overflow(format!("Mittag-Leffler term k={k} at z={z}")));
    }
    Ok(term)
}

/// Neumaier's variant of compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Truncated six-parameter Mittag-Leffler series, summed in increasing `k`.
pub fn ml_truncated(params: &MLParams, z: f64) -> Result<f64> {
    params.validate()?;
    if !z.is_finite() {
        return Err(Error::domain(format!("Mittag-Leffler argument must be finite, got {z}")));
    }
    let mut acc = CompensatedSum::default();
    for k in 0..=params.trunc {
        acc.add(series_term(params, z, k)?);
    }
    let value = acc.value();
    if !value.is_finite() {
        return Err(Error::Overflow(format!("Mittag-Leffler sum at z={z}")));
    }
    Ok(value)
}

/// `Γ(β) · ml_truncated(params, z)`; equals 1 at `z = 0`.
pub fn h_function(params: &MLParams, z: f64) -> Result<f64> {
    let ml = ml_truncated(params, z)?;
    let value = gamma_fn(params.beta)? * ml;
    if !value.is_finite() {
        return Err(Error::Overflow(format!("H-function at z={z}")));
    }
    Ok(value)
}
