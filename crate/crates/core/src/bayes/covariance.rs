use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::BayesError;

/// Stationary covariance family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CovarianceKind {
    Matern { nu: f64 },
    Rbf,
}

impl Default for CovarianceKind {
    fn default() -> Self {
        CovarianceKind::Matern { nu: 2.5 }
    }
}

/// Covariance with amplitude `α_0`, per-dimension weights `α_i` in the
/// distance `r² = Σ α_i (x_i − x′_i)²`, and observation noise variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpKernel {
    pub kind: CovarianceKind,
    pub amplitude: f64,
    pub weights: Vec<f64>,
    pub noise: f64,
}

impl GpKernel {
    pub fn new(kind: CovarianceKind, amplitude: f64, weights: Vec<f64>) -> Result<Self, BayesError> {
        let k = Self {
            kind,
            amplitude,
            weights,
            noise: 1e-6,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), BayesError> {
        if !(self.amplitude > 0.0) {
            return Err(BayesError::BadAmplitude(self.amplitude));
        }
        if let CovarianceKind::Matern { nu } = self.kind {
            if !(nu > 0.0) {
                return Err(BayesError::BadSmoothness(nu));
            }
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) || !(self.noise >= 0.0) {
            return Err(BayesError::InvalidConfig(
                "length-scale weights and noise must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let r2 = weighted_sq_dist(x, y, &self.weights);
        match self.kind {
            CovarianceKind::Rbf => self.amplitude * (-r2).exp(),
            CovarianceKind::Matern { nu } => self.amplitude * matern_unit(r2.sqrt(), nu),
        }
    }
}

fn weighted_sq_dist(x: &[f64], y: &[f64], w: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(w)
        .map(|((a, b), w)| w * (a - b) * (a - b))
        .sum()
}

fn matern_unit(r: f64, nu: f64) -> f64 {
    matern_closed_form(r, nu).unwrap_or_else(|| matern_bessel(r, nu))
}

/// Unit-amplitude Matérn for `ν ∈ {1/2, 3/2, 5/2}`.
pub fn matern_closed_form(r: f64, nu: f64) -> Option<f64> {
    let s3 = 3f64.sqrt() * r;
    let s5 = 5f64.sqrt() * r;
    if nu == 0.5 {
        Some((-r).exp())
    } else if nu == 1.5 {
        Some((1.0 + s3) * (-s3).exp())
    } else if nu == 2.5 {
        Some((1.0 + s5 + 5.0 * r * r / 3.0) * (-s5).exp())
    } else {
        None
    }
}

/// Unit-amplitude Matérn `2^{1−ν}/Γ(ν) z^ν K_ν(z)` with `z = √(2ν) r`, where
/// `K_ν(z) = ∫_0^∞ e^{−z cosh t} cosh(νt) dt` is summed by the trapezoid rule
/// in log space.
pub fn matern_bessel(r: f64, nu: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    let z = (2.0 * nu).sqrt() * r;
    let log_pre = (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu) + nu * z.ln();
    let log_cosh = |t: f64| nu * t + (-2.0 * nu * t).exp().ln_1p() - std::f64::consts::LN_2;
    let h = 0.02;
    let term = |t: f64| (log_pre - z * t.cosh() + log_cosh(t)).exp();
    let mut sum = 0.5 * term(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let v = term(t);
        sum += v;
        // past the peak of the integrand and negligible
        if z * t.sinh() > nu && v <= 1e-18 * sum {
            break;
        }
        k += 1;
        if k > 1_000_000 {
            break;
        }
    }
    sum * h
}

/// `α_0 · Matérn_ν(r)` with the weighted distance.
pub fn matern_kernel(x: &[f64], y: &[f64], nu: f64, amplitude: f64, weights: &[f64]) -> Result<f64, BayesError> {
    let k = GpKernel::new(CovarianceKind::Matern { nu }, amplitude, weights.to_vec())?;
    Ok(k.eval(x, y))
}

/// `α_0 exp(−r²)` with the weighted distance.
pub fn rbf_kernel(x: &[f64], y: &[f64], amplitude: f64, weights: &[f64]) -> Result<f64, BayesError> {
    let k = GpKernel::new(CovarianceKind::Rbf, amplitude, weights.to_vec())?;
    Ok(k.eval(x, y))
}
