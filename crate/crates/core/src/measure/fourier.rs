use num_complex::Complex64;

use super::{MeasureError, ProbabilityDistribution};

/// Total weight below which a Fourier feature vector is treated as the
/// constant (all-DC) signal.
pub const DEGENERATE_TOL: f64 = 1e-14;

/// Normalised magnitudes of the first `k` Fourier coefficients
/// `p_k = (1/T)|∫_0^T e^{-2πikt/T} o(t) dt|`.
///
/// `trace` holds `o` on a uniform grid covering `[0, T]` endpoints included;
/// the integral uses the trapezoid rule. The period only scales every
/// component, so it cancels after normalisation and is not an argument.
pub fn fourier_distribution(
    trace: &[f64],
    k: usize,
) -> Result<ProbabilityDistribution, MeasureError> {
    let needed = (4 * k).max(2);
    if k == 0 || trace.len() < needed {
        return Err(MeasureError::GridTooCoarse {
            samples: trace.len(),
            components: k,
            needed,
        });
    }
    let intervals = (trace.len() - 1) as f64;
    let p: Vec<f64> = (0..k)
        .map(|kk| {
            let mut acc = Complex64::default();
            for (j, &o) in trace.iter().enumerate() {
                let w = if j == 0 || j + 1 == trace.len() { 0.5 } else { 1.0 };
                let phase = -2.0 * std::f64::consts::PI * kk as f64 * j as f64 / intervals;
                acc += Complex64::from_polar(w * o, phase);
            }
            acc.norm() / intervals
        })
        .collect();
    if p.iter().sum::<f64>() < DEGENERATE_TOL {
        return Ok(ProbabilityDistribution::point_mass(0));
    }
    ProbabilityDistribution::from_dense(p)
}
