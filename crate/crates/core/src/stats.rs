// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Streaming moment accumulators (Welford updates).

use serde::{Deserialize, Serialize};

/// Running mean and central moments up to fourth order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2 - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; `None` below two samples.
    pub fn sample_variance(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.m2 / (self.n - 1) as f64)
    }

    pub fn population_variance(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.m2 / self.n as f64
        }
    }

    /// Sample standard deviation over `√n`.
    pub fn std_error(&self) -> Option<f64> {
        self.sample_variance().map(|v| (v / self.n as f64).sqrt())
    }

    /// Large-sample standard error of the population variance,
    /// `√((μ₄ - σ⁴)/n)`.
    pub fn variance_std_error(&self) -> Option<f64> {
        (self.n >= 2).then(|| {
            let n = self.n as f64;
            let s2 = self.m2 / n;
            ((self.m4 / n - s2 * s2).max(0.0) / n).sqrt()
        })
    }
}

/// Running means, variances and covariance of a pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CoMoments {
    n: u64,
    mean_a: f64,
    mean_b: f64,
    m2a: f64,
    m2b: f64,
    cab: f64,
}

impl CoMoments {
    pub fn push(&mut self, a: f64, b: f64) {
        self.n += 1;
        let n = self.n as f64;
        let da = a - self.mean_a;
        let db = b - self.mean_b;
        self.mean_a += da / n;
        self.mean_b += db / n;
        self.m2a += da * (a - self.mean_a);
        self.m2b += db * (b - self.mean_b);
        self.cab += da * (b - self.mean_b);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn means(&self) -> (f64, f64) {
        (self.mean_a, self.mean_b)
    }

    /// Unbiased `(Var a, Var b, Cov(a, b))`.
    pub fn sample_covariance(&self) -> Option<(f64, f64, f64)> {
        (self.n >= 2).then(|| {
            let d = (self.n - 1) as f64;
            (self.m2a / d, self.m2b / d, self.cab / d)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37 % 101) as f64).sqrt() + 1e6).collect();
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let c = |p: i32| xs.iter().map(|x| (x - mean).powi(p)).sum::<f64>() / n;
        assert!((m.mean() - mean).abs() < 1e-9);
        assert!((m.population_variance() - c(2)).abs() < 1e-9 * c(2));
        let se = ((c(4) - c(2) * c(2)) / n).sqrt();
        assert!((m.variance_std_error().unwrap() - se).abs() < 1e-6 * se);
    }

    #[test]
    fn covariance_matches_two_pass() {
        let pairs: Vec<(f64, f64)> = (0..500).map(|i| (i as f64, ((i * i) % 17) as f64)).collect();
        let mut c = CoMoments::default();
        pairs.iter().for_each(|&(a, b)| c.push(a, b));
        let n = pairs.len() as f64;
        let ma = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let mb = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let cov = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum::<f64>() / (n - 1.0);
        assert!((c.sample_covariance().unwrap().2 - cov).abs() < 1e-10 * cov.abs().max(1.0));
    }

    #[test]
    fn single_sample_has_no_error() {
        let mut m = Moments::default();
        m.push(3.0);
        assert_eq!(m.std_error(), None);
    }
}
