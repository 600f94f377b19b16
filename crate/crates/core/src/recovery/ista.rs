use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_len, Error, Result};
use crate::spectral::{MeasurementSystem, MeasurementVector};
use crate::Real;

/// `sign(x) · max(|x| − θ, 0)`.
#[inline]
pub fn soft_threshold<T: Real>(x: T, theta: T) -> T {
    let mag = num_traits::Float::abs(x) - theta;
    if mag > T::zero() {
        if x > T::zero() {
            mag
        } else {
            -mag
        }
    } else {
        T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IstaInit {
    Zero,
    /// Standard normal draw from the solver seed.
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IstaConfig {
    /// Fixed regularization weight; derived from `gamma_scale` when `None`.
    pub gamma: Option<f64>,
    /// `γ = gamma_scale · ‖V^H y‖∞` when `gamma` is unset.
    pub gamma_scale: f64,
    /// Step size; `1/‖V‖²` when `None`.
    pub tau: Option<f64>,
    pub max_iterations: usize,
    /// Stop once `‖x⁺ − x‖₂` falls below this.
    pub tolerance: f64,
    pub init: IstaInit,
}

impl Default for IstaConfig {
    fn default() -> Self {
        Self {
            gamma: None,
            gamma_scale: 0.05,
            tau: None,
            max_iterations: 1000,
            tolerance: 1e-4,
            init: IstaInit::Zero,
        }
    }
}

impl IstaConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if let Some(g) = self.gamma {
            if !positive(g) {
                return Err(Error::param("gamma", format!("must be finite and > 0, got {g}")));
            }
        }
        if !positive(self.gamma_scale) {
            return Err(Error::param("gamma_scale", format!("must be finite and > 0, got {}", self.gamma_scale)));
        }
        if let Some(t) = self.tau {
            if !positive(t) {
                return Err(Error::param("tau", format!("must be finite and > 0, got {t}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations", "must be at least 1"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::param("tolerance", format!("must be >= 0, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// Unrounded ISTA output.
#[derive(Debug, Clone, PartialEq)]
pub struct IstaSolution<T> {
    pub zhat: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    pub gamma: T,
    pub tau: T,
    /// LASSO objective at the initial point and after every iteration.
    pub objective: Vec<T>,
}

/// `½‖y − Vx‖² + γ‖x‖₁`.
pub fn lasso_objective<T: Real>(
    system: &MeasurementSystem<T>,
    y: &MeasurementVector<T>,
    x: &[T],
    gamma: T,
) -> Result<T> {
    let vx = system.apply_forward(x)?;
    check_len(system.m(), y.len())?;
    let fit: T = vx.iter().zip(&y.values).map(|(a, b)| (a - b).norm_sqr()).sum();
    let l1: T = x.iter().map(|&v| num_traits::Float::abs(v)).sum();
    Ok(T::lit(0.5) * fit + gamma * l1)
}

/// `x ← S_{γτ}(x − τ·Re V^H(Vx − y))` until the step falls below tolerance.
pub fn ista_solve<T: Real>(
    system: &MeasurementSystem<T>,
    y: &MeasurementVector<T>,
    cfg: &IstaConfig,
    init_seed: u64,
) -> Result<IstaSolution<T>> {
    cfg.validate()?;
    check_len(system.m(), y.len())?;
    let n = system.n();
    let tau = cfg.tau.map(T::lit).unwrap_or_else(|| T::one() / system.operator_norm_sq());
    let gamma = match cfg.gamma {
        Some(g) => T::lit(g),
        None => {
            let back = system.apply_adjoint(&y.values)?;
            let inf = back.iter().fold(T::zero(), |m, &v| m.max(num_traits::Float::abs(v)));
            T::lit(cfg.gamma_scale) * inf
        }
    };
    let theta = gamma * tau;
    let tol = T::lit(cfg.tolerance);

    let mut x = match cfg.init {
        IstaInit::Zero => vec![T::zero(); n],
        IstaInit::Normal => {
            let mut rng = ChaCha8Rng::seed_from_u64(init_seed);
            (0..n)
                .map(|_| T::lit(StandardNormal.sample(&mut rng)))
                .collect()
        }
    };
    let mut grad = vec![T::zero(); n];
    let mut ws = system.workspace();
    let mut objective = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let l1 = |x: &[T]| x.iter().map(|&v| num_traits::Float::abs(v)).sum::<T>();

    while iterations < cfg.max_iterations {
        let fit = system.normal_residual_into(&x, y, &mut ws, &mut grad);
        objective.push(T::lit(0.5) * fit + gamma * l1(&x));
        iterations += 1;
        let mut step_sq = T::zero();
        for (xi, &gi) in x.iter_mut().zip(&grad) {
            let next = soft_threshold(*xi - tau * gi, theta);
            let d = next - *xi;
            step_sq = step_sq + d * d;
            *xi = next;
        }
        if !step_sq.is_finite() {
            return Err(Error::Divergence { iteration: iterations });
        }
        if step_sq.sqrt() < tol {
            converged = true;
            break;
        }
    }
    let fit = system.normal_residual_into(&x, y, &mut ws, &mut grad);
    objective.push(T::lit(0.5) * fit + gamma * l1(&x));
    log::trace!("ista: {iterations} iterations, converged={converged}");
    Ok(IstaSolution { zhat: x, iterations, converged, gamma, tau, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::MeasurementSource;

    fn exact(system: &MeasurementSystem<f64>, zhat: &[f64]) -> MeasurementVector<f64> {
        MeasurementVector { values: system.apply_forward(zhat).unwrap(), source: MeasurementSource::Exact }
    }

    #[test]
    fn soft_threshold_examples() {
        assert!((soft_threshold(0.7, 0.2) - 0.5f64).abs() < 1e-15);
        assert_eq!(soft_threshold(-0.1, 0.2), 0.0);
        assert_eq!(soft_threshold(0.2, 0.2), 0.0);
        assert!((soft_threshold(-0.7, 0.2) + 0.5f64).abs() < 1e-15);
        assert_eq!(soft_threshold(0.3, 0.0), 0.3);
        assert_eq!(soft_threshold(-0.3, 0.0), -0.3);
    }

    #[test]
    fn zero_measurements_stay_at_zero() {
        let sys = MeasurementSystem::<f64>::new(64, 4.0).unwrap();
        let y = exact(&sys, &[0.0; 64]);
        let cfg = IstaConfig { gamma: Some(0.1), ..IstaConfig::default() };
        let sol = ista_solve(&sys, &y, &cfg, 0).unwrap();
        assert_eq!(sol.iterations, 1);
        assert!(sol.converged);
        assert!(sol.zhat.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn one_sparse_residual_is_located() {
        let sys = MeasurementSystem::<f64>::new(64, 4.0).unwrap();
        let mut zhat = vec![0.0; 64];
        zhat[20] = 0.5;
        let y = exact(&sys, &zhat);
        let sol = ista_solve(&sys, &y, &IstaConfig::default(), 0).unwrap();
        let argmax = (0..64).max_by(|&a, &b| sol.zhat[a].abs().total_cmp(&sol.zhat[b].abs())).unwrap();
        assert_eq!(argmax, 20);
        // Shrinkage biases the amplitude by about γτ per unit of column energy.
        let bias = sol.gamma * sol.tau * 64.0 / sys.m() as f64;
        assert!((sol.zhat[20] - 0.5).abs() <= bias + 1e-3, "{} vs bias {bias}", sol.zhat[20]);
        let rounded = crate::recovery::round_to_lattice(&sol.zhat, 0.25).unwrap();
        assert_eq!(rounded, zhat);
    }

    #[test]
    fn objective_is_monotone_from_random_start() {
        let sys = MeasurementSystem::<f64>::new(128, 3.0).unwrap();
        let mut zhat = vec![0.0; 128];
        zhat[30] = 0.5;
        zhat[70] = -1.0;
        let y = exact(&sys, &zhat);
        let cfg = IstaConfig { init: IstaInit::Normal, ..IstaConfig::default() };
        let sol = ista_solve(&sys, &y, &cfg, 9).unwrap();
        for w in sol.objective.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
        let direct = lasso_objective(&sys, &y, &sol.zhat, sol.gamma).unwrap();
        assert!((direct - sol.objective.last().unwrap()).abs() < 1e-9);
        let again = ista_solve(&sys, &y, &cfg, 9).unwrap();
        assert_eq!(again, sol);
    }

    #[test]
    fn converged_point_is_a_fixed_point() {
        let sys = MeasurementSystem::<f64>::new(128, 4.0).unwrap();
        let mut zhat = vec![0.0; 128];
        zhat[10] = 0.5;
        zhat[90] = 0.5;
        let y = exact(&sys, &zhat);
        let sol = ista_solve(&sys, &y, &IstaConfig::default(), 0).unwrap();
        assert!(sol.converged);
        let mut ws = sys.workspace();
        let mut grad = vec![0.0; 128];
        sys.normal_residual_into(&sol.zhat, &y, &mut ws, &mut grad);
        let step: f64 = sol
            .zhat
            .iter()
            .zip(&grad)
            .map(|(&x, &g)| (soft_threshold(x - sol.tau * g, sol.gamma * sol.tau) - x).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(step < 1e-4);
    }

    #[test]
    fn oversized_step_diverges() {
        let sys = MeasurementSystem::<f64>::new(64, 4.0).unwrap();
        let mut zhat = vec![0.0; 64];
        zhat[5] = 1.0;
        let y = exact(&sys, &zhat);
        let cfg = IstaConfig { tau: Some(1.0), gamma: Some(1e-6), max_iterations: 1000, ..IstaConfig::default() };
        assert!(matches!(ista_solve(&sys, &y, &cfg, 0), Err(Error::Divergence { .. })));
    }

    #[test]
    fn invalid_config_rejected() {
        let sys = MeasurementSystem::<f64>::new(64, 4.0).unwrap();
        let y = exact(&sys, &[0.0; 64]);
        for cfg in [
            IstaConfig { gamma: Some(-1.0), ..IstaConfig::default() },
            IstaConfig { tau: Some(0.0), ..IstaConfig::default() },
            IstaConfig { max_iterations: 0, ..IstaConfig::default() },
            IstaConfig { gamma_scale: f64::NAN, ..IstaConfig::default() },
        ] {
            assert!(ista_solve(&sys, &y, &cfg, 0).is_err());
        }
    }
}
