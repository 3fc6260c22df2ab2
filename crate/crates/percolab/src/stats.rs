//! Estimates, error bars, and small fitting helpers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Monte Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub replicas: usize,
    pub seed: u64,
}

impl Estimate {
    /// Proportion estimate from a Bernoulli success count.
    pub fn from_successes(successes: usize, replicas: usize, seed: u64) -> Estimate {
        let n = replicas as f64;
        let mean = successes as f64 / n;
        let stderr = (mean * (1.0 - mean) / n).sqrt();
        Estimate {
            mean,
            stderr,
            replicas,
            seed,
        }
    }

    /// Sample mean and standard error of independent real-valued samples.
    pub fn from_samples(samples: &[f64], seed: u64) -> Estimate {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / n as f64).sqrt(),
            replicas: n,
            seed,
        }
    }

    /// Batch-means estimate for correlated chain output: the samples are cut
    /// into `batches` contiguous blocks and the block means are treated as
    /// independent.
    pub fn from_chain(samples: &[f64], batches: usize, seed: u64) -> Estimate {
        let n = samples.len();
        let b = batches.min(n).max(1);
        let means: Vec<f64> = (0..b)
            .map(|i| {
                let lo = i * n / b;
                let hi = (i + 1) * n / b;
                samples[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
            })
            .collect();
        let mut est = Estimate::from_samples(&means, seed);
        est.replicas = n;
        est
    }

    /// mean + z * stderr.
    pub fn upper(&self, z: f64) -> f64 {
        self.mean + z * self.stderr
    }

    /// mean - z * stderr.
    pub fn lower(&self, z: f64) -> f64 {
        self.mean - z * self.stderr
    }

    /// Agresti-Coull style upper confidence bound for a proportion; unlike
    /// `upper` it stays informative when zero successes were observed.
    pub fn proportion_upper(&self, z: f64) -> f64 {
        let n = self.replicas as f64;
        let s = self.mean * n;
        let nt = n + z * z;
        let pt = (s + z * z / 2.0) / nt;
        (pt + z * (pt * (1.0 - pt) / nt).sqrt()).min(1.0)
    }
}

/// Two-sided 97.5% Student-t quantiles for small degrees of freedom
/// (index df-1; beyond the table the normal 1.96 is used).
const T_975: [f64; 10] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
];

pub fn t_quantile_975(df: usize) -> f64 {
    if df == 0 {
        f64::INFINITY
    } else if df <= T_975.len() {
        T_975[df - 1]
    } else {
        1.96
    }
}

/// Ordinary least squares fit y = a + b x.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Standard error of the slope (residual-based; zero when df = 0).
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub df: usize,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 points to fit a line".into(),
        ));
    }
    let nf = n as f64;
    let xbar = xs.iter().sum::<f64>() / nf;
    let ybar = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate x values in line fit".into(),
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let syy: f64 = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let df = n.saturating_sub(2);
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let slope_stderr = if df > 0 {
        (ss_res / df as f64 / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LineFit {
        intercept,
        slope,
        slope_stderr,
        r_squared,
        df,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_estimate() {
        let e = Estimate::from_successes(25, 100, 1);
        assert_eq!(e.mean, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_line_is_recovered() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.7 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 0.7).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_successes_still_give_positive_upper_bound() {
        let e = Estimate::from_successes(0, 10_000, 3);
        assert_eq!(e.stderr, 0.0);
        let up = e.proportion_upper(4.0);
        assert!(up > 0.0 && up < 3e-3);
    }
}
