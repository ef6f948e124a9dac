use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::covariance::{CovarianceKind, GpKernel};
use super::simplex::nelder_mead;
use super::BayesError;

const JITTER_START: f64 = 1e-8;
const JITTER_MAX: f64 = 1e-2;

/// GP regression posterior. Targets are standardised internally; all public
/// outputs are in the original units.
#[derive(Debug, Clone)]
pub struct GpModel {
    kernel: GpKernel,
    x: Vec<Vec<f64>>,
    y_mean: f64,
    y_scale: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
}

fn check_inputs(x: &[Vec<f64>], y: &[f64], dim: usize) -> Result<(), BayesError> {
    if x.is_empty() {
        return Err(BayesError::NoObservations);
    }
    if x.len() != y.len() {
        return Err(BayesError::InvalidConfig(format!(
            "{} inputs but {} targets",
            x.len(),
            y.len()
        )));
    }
    if let Some((index, p)) = x.iter().enumerate().find(|(_, p)| p.len() != dim) {
        return Err(BayesError::DimensionMismatch {
            index,
            expected: dim,
            got: p.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(BayesError::InvalidConfig("non-finite target".into()));
    }
    Ok(())
}

fn standardise(y: &[f64]) -> (f64, f64, DVector<f64>) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let scale = if sd > 1e-12 { sd } else { 1.0 };
    (mean, scale, DVector::from_iterator(y.len(), y.iter().map(|v| (v - mean) / scale)))
}

fn gram(kernel: &GpKernel, x: &[Vec<f64>]) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| kernel.eval(&x[i], &x[j]))
}

fn factor(mut k: DMatrix<f64>, noise: f64) -> Result<(Cholesky<f64, Dyn>, f64), BayesError> {
    let n = k.nrows();
    let mut jitter = JITTER_START;
    for i in 0..n {
        k[(i, i)] += noise + jitter;
    }
    loop {
        if let Some(c) = k.clone().cholesky() {
            return Ok((c, jitter));
        }
        if jitter >= JITTER_MAX {
            return Err(BayesError::Factorization { jitter });
        }
        for i in 0..n {
            k[(i, i)] += 9.0 * jitter;
        }
        jitter *= 10.0;
        log::debug!("GP covariance not SPD, jitter raised to {jitter:e}");
    }
}

/// Conditions a GP with fixed hyperparameters on `(x, y)`.
pub fn gp_fit(x: &[Vec<f64>], y: &[f64], kernel: &GpKernel) -> Result<GpModel, BayesError> {
    kernel.validate()?;
    check_inputs(x, y, kernel.dim())?;
    let (y_mean, y_scale, ys) = standardise(y);
    let (chol, jitter) = factor(gram(kernel, x), kernel.noise)?;
    let alpha = chol.solve(&ys);
    Ok(GpModel {
        kernel: kernel.clone(),
        x: x.to_vec(),
        y_mean,
        y_scale,
        chol,
        alpha,
        jitter,
    })
}

// log-space box for (amplitude, weights, noise)
const LN_AMP: (f64, f64) = (-4.6, 4.6);
const LN_WEIGHT: (f64, f64) = (-6.9, 9.2);
const LN_NOISE: (f64, f64) = (-18.4, -2.3);

fn unpack(kind: CovarianceKind, theta: &[f64]) -> GpKernel {
    let d = theta.len() - 2;
    GpKernel {
        kind,
        amplitude: theta[0].clamp(LN_AMP.0, LN_AMP.1).exp(),
        weights: theta[1..=d]
            .iter()
            .map(|t| t.clamp(LN_WEIGHT.0, LN_WEIGHT.1).exp())
            .collect(),
        noise: theta[d + 1].clamp(LN_NOISE.0, LN_NOISE.1).exp(),
    }
}

fn neg_log_marginal(kernel: &GpKernel, x: &[Vec<f64>], ys: &DVector<f64>) -> f64 {
    let mut k = gram(kernel, x);
    for i in 0..x.len() {
        k[(i, i)] += kernel.noise + JITTER_START;
    }
    let Some(chol) = k.cholesky() else {
        return f64::INFINITY;
    };
    let a = chol.solve(ys);
    let log_det: f64 = chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
    0.5 * ys.dot(&a) + log_det + 0.5 * x.len() as f64 * (2.0 * std::f64::consts::PI).ln()
}

/// Fits amplitude, length-scale weights and noise by maximising the log
/// marginal likelihood with Nelder–Mead from `restarts` starting points, then
/// conditions on the data.
pub fn gp_fit_ml(
    x: &[Vec<f64>],
    y: &[f64],
    kind: CovarianceKind,
    restarts: usize,
    seed: u64,
) -> Result<GpModel, BayesError> {
    let dim = x.first().map(Vec::len).ok_or(BayesError::NoObservations)?;
    check_inputs(x, y, dim)?;
    let (_, _, ys) = standardise(y);
    let objective = |theta: &[f64]| {
        let penalty: f64 = std::iter::once((theta[0], LN_AMP))
            .chain(theta[1..=dim].iter().map(|&t| (t, LN_WEIGHT)))
            .chain(std::iter::once((theta[dim + 1], LN_NOISE)))
            .map(|(t, (lo, hi))| (lo - t).max(0.0) + (t - hi).max(0.0))
            .sum();
        neg_log_marginal(&unpack(kind, theta), x, &ys) + 1e3 * penalty
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for r in 0..restarts.max(1) {
        let start: Vec<f64> = if r == 0 {
            let mut s = vec![0.0; dim + 2];
            s[1..=dim].fill(10f64.ln());
            s[dim + 1] = 1e-4f64.ln();
            s
        } else {
            let mut s = Vec::with_capacity(dim + 2);
            s.push(rng.random_range(LN_AMP.0..LN_AMP.1));
            for _ in 0..dim {
                s.push(rng.random_range(-2.0..6.0));
            }
            s.push(rng.random_range(LN_NOISE.0..LN_NOISE.1));
            s
        };
        let (theta, v) = nelder_mead(objective, &start, 1.0, 150 * (dim + 2), 1e-8);
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((theta, v));
        }
    }
    let (theta, v) = best.expect("at least one restart");
    let kernel = unpack(kind, &theta);
    log::debug!("GP hyperparameters {kernel:?} (nlml {v:.4})");
    gp_fit(x, y, &kernel)
}

impl GpModel {
    pub fn kernel(&self) -> &GpKernel {
        &self.kernel
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn cross(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.x.len(), self.x.iter().map(|xi| self.kernel.eval(xi, x)))
    }

    /// Posterior mean and standard deviation of the latent function at `x`.
    pub fn posterior(&self, x: &[f64]) -> (f64, f64) {
        let ks = self.cross(x);
        let mean = self.y_mean + self.y_scale * ks.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&ks)
            .expect("Cholesky factor has a positive diagonal");
        let var = self.kernel.amplitude - v.norm_squared();
        debug_assert!(var >= -1e-8 * self.kernel.amplitude, "posterior variance {var}");
        (mean, self.y_scale * var.max(0.0).sqrt())
    }

    /// One joint posterior draw over `points`.
    pub fn sample_joint<R: Rng>(&self, points: &[Vec<f64>], rng: &mut R) -> Result<Vec<f64>, BayesError> {
        let m = points.len();
        let ks = DMatrix::from_fn(self.x.len(), m, |i, j| self.kernel.eval(&self.x[i], &points[j]));
        let mean = ks.transpose() * &self.alpha;
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&ks)
            .expect("Cholesky factor has a positive diagonal");
        let prior = DMatrix::from_fn(m, m, |i, j| self.kernel.eval(&points[i], &points[j]));
        let cov = prior - v.transpose() * v;
        let (chol, _) = factor(cov, 0.0)?;
        let z = DVector::from_iterator(m, (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let draw = mean + chol.l() * z;
        Ok(draw.iter().map(|f| self.y_mean + self.y_scale * f).collect())
    }
}

/// Lower confidence bound `μ − κσ` for minimisation.
pub fn lcb(model: &GpModel, x: &[f64], kappa: f64) -> Result<f64, BayesError> {
    if !(kappa >= 0.0) {
        return Err(BayesError::InvalidConfig(format!("kappa must be non-negative, got {kappa}")));
    }
    let (mu, sigma) = model.posterior(x);
    Ok(mu - kappa * sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(d: usize) -> GpKernel {
        GpKernel::new(CovarianceKind::default(), 1.0, vec![1.0; d]).unwrap()
    }

    #[test]
    fn single_observation() {
        let m = gp_fit(&[vec![0.2]], &[3.5], &unit(1)).unwrap();
        let (mu, sd) = m.posterior(&[0.2]);
        assert!((mu - 3.5).abs() < 1e-6);
        assert!(sd < 1e-2);
    }

    #[test]
    fn interpolates_and_uncertainty_grows() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 0.25]).collect();
        let y: Vec<f64> = x.iter().map(|p| p[0].sin() * 3.0).collect();
        let k = GpKernel {
            weights: vec![4.0],
            ..unit(1)
        };
        let m = gp_fit(&x, &y, &k).unwrap();
        for (p, t) in x.iter().zip(&y) {
            let (mu, sd) = m.posterior(p);
            assert!((mu - t).abs() < 1e-3);
            assert!(sd < 0.05);
        }
        let near = m.posterior(&[1.1]).1;
        let far = m.posterior(&[3.0]).1;
        assert!(near < far);
    }

    #[test]
    fn sine_fit_with_learned_hyperparameters() {
        let pi = std::f64::consts::PI;
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 * pi / 7.0]).collect();
        let y: Vec<f64> = x.iter().map(|p| p[0].sin()).collect();
        let m = gp_fit_ml(&x, &y, CovarianceKind::default(), 3, 1).unwrap();
        let worst = (0..=100)
            .map(|i| {
                let t = i as f64 * pi / 100.0;
                (m.posterior(&[t]).0 - t.sin()).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 0.1, "max error {worst}");
    }

    #[test]
    fn duplicate_inputs_need_jitter_only() {
        let x = vec![vec![0.5], vec![0.5], vec![0.5]];
        let k = GpKernel { noise: 0.0, ..unit(1) };
        let m = gp_fit(&x, &[1.0, 1.0, 1.0], &k).unwrap();
        assert!(m.jitter() >= JITTER_START);
    }

    #[test]
    fn lcb_convention() {
        let m = gp_fit(&[vec![0.0], vec![1.0]], &[0.0, 1.0], &unit(1)).unwrap();
        let x = [3.0];
        let (mu, sd) = m.posterior(&x);
        assert!(sd > 0.0);
        assert_eq!(lcb(&m, &x, 0.0).unwrap(), mu);
        assert!(lcb(&m, &x, 2.0).unwrap() < lcb(&m, &x, 1.0).unwrap());
        assert!((lcb(&m, &x, 2.0).unwrap() - (mu - 2.0 * sd)).abs() < 1e-15);
        assert!(lcb(&m, &x, -1.0).is_err());
    }

    #[test]
    fn joint_draws_pass_near_data() {
        let x = vec![vec![0.0], vec![1.0]];
        let m = gp_fit(&x, &[2.0, -1.0], &unit(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = m.sample_joint(&x, &mut rng).unwrap();
        assert!((d[0] - 2.0).abs() < 0.05 && (d[1] + 1.0).abs() < 0.05);
    }
}
