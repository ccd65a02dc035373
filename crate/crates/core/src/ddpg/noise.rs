use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Ornstein-Uhlenbeck process with unit time step.
///
/// Samples are reported as absolute values so exploration only ever adds
/// bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct OuProcess {
    pub theta: f64,
    pub mu: f64,
    pub sigma: f64,
    pub x: Vec<f64>,
}

impl OuProcess {
    pub fn new(dim: usize, theta: f64, mu: f64, sigma: f64) -> Self {
        Self {
            theta,
            mu,
            sigma,
            x: vec![mu; dim],
        }
    }

    pub fn reset(&mut self) {
        self.x.fill(self.mu);
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<f64> {
        for x in &mut self.x {
            let eps: f64 = StandardNormal.sample(rng);
            *x += self.theta * (self.mu - *x) + self.sigma * eps;
        }
        self.x.iter().map(|x| x.abs()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{rng_for, Stream};

    #[test]
    fn noiseless_full_reversion() {
        let mut ou = OuProcess::new(3, 1.0, 0.0, 0.0);
        ou.x = vec![1.0, -2.0, 0.5];
        assert_eq!(ou.sample(&mut rng_for(0, Stream::Agent(0))), vec![0.0; 3]);
    }

    #[test]
    fn samples_are_non_negative() {
        let mut ou = OuProcess::new(5, 0.15, 0.0, 0.2);
        let mut rng = rng_for(1, Stream::Agent(0));
        for _ in 0..1000 {
            assert!(ou.sample(&mut rng).iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn long_run_mean_matches_folded_normal() {
        // x' = (1 - theta) x + sigma eps is AR(1) with stationary variance
        // sigma^2 / (1 - (1 - theta)^2); E|x| = sd * sqrt(2 / pi).
        let (theta, sigma) = (0.15, 0.2);
        let a: f64 = 1.0 - theta;
        let var = sigma * sigma / (1.0 - a * a);
        let mean_abs = var.sqrt() * (2.0 / std::f64::consts::PI).sqrt();

        let mut ou = OuProcess::new(1, theta, 0.0, sigma);
        let mut rng = rng_for(2, Stream::Agent(0));
        for _ in 0..1000 {
            ou.sample(&mut rng);
        }
        let n = 100_000;
        let samples: Vec<f64> = (0..n).map(|_| ou.sample(&mut rng)[0]).collect();
        let m = samples.iter().sum::<f64>() / n as f64;
        let s = (samples.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        // Autocorrelated draws: shrink n to the AR(1) effective sample size.
        let n_eff = n as f64 * (1.0 - a) / (1.0 + a);
        let se = s / n_eff.sqrt();
        assert!((m - mean_abs).abs() < 3.0 * se, "mean {m} vs {mean_abs} (se {se})");
    }
}
