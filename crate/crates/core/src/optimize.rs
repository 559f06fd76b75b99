//! Seeded derivative-free global optimization over box-bounded real vectors:
//! a self-adaptive (mu, lambda) evolution strategy with rank-based selection
//! and restarts, plus a Nelder-Mead simplex polish clipped to the box.

use crate::random::{derive_seed, rng_from, standard_normal, uniform};

/// Budget and reproducibility knobs for the global search.
///
/// Invariants: `population >= 4`, `lo < hi` for every bound, `tol > 0`.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub seed: u64,
    pub population: usize,
    pub max_evals: usize,
    pub restarts: usize,
    pub tol: f64,
    pub bounds: Vec<(f64, f64)>,
}

impl OptimizerConfig {
    /// Defaults sized for 15-parameter unitary searches.
    pub fn new(seed: u64, bounds: Vec<(f64, f64)>) -> Self {
        Self {
            seed,
            population: 40,
            max_evals: 20_000,
            restarts: 8,
            tol: 1e-6,
            bounds,
        }
    }

    fn validate(&self) {
        assert!(self.population >= 4, "population must be at least 4");
        assert!(self.tol > 0.0, "tol must be positive");
        assert!(
            self.bounds.iter().all(|&(lo, hi)| lo < hi),
            "each bound must satisfy lo < hi"
        );
        assert!(!self.bounds.is_empty(), "bounds must be non-empty");
    }

    fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    fn clip(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *v = v.clamp(lo, hi);
        }
    }
}

/// Result of a global search.
#[derive(Debug, Clone)]
pub struct GlobalMin {
    pub best_value: f64,
    pub best_point: Vec<f64>,
    pub evals: usize,
    /// True when at least two restarts landed in the winning basin
    /// (within 100x tol of the best restart value).
    pub converged: bool,
}

/// Minimizes `objective` over the box, deterministically for a given seed.
/// The center of the box is always evaluated, and restarts draw from
/// independent derived streams. Budget exhaustion returns the best found.
pub fn global_minimize(objective: impl Fn(&[f64]) -> f64, cfg: &OptimizerConfig) -> GlobalMin {
    cfg.validate();
    let dim = cfg.bounds.len();
    let lambda = cfg.population;
    let mu = (lambda / 4).max(2);
    let tau = 1.0 / (2.0 * dim as f64).sqrt();
    let scales: Vec<f64> = cfg.bounds.iter().map(|&(lo, hi)| (hi - lo) / 4.0).collect();

    let mut evals = 0usize;
    let mut best_value = f64::INFINITY;
    let mut best_point = cfg.center();
    let mut restart_bests: Vec<f64> = Vec::with_capacity(cfg.restarts.max(1));

    // the box center is always part of the search space
    {
        let center = cfg.center();
        let v = objective(&center);
        evals += 1;
        if v < best_value {
            best_value = v;
            best_point = center;
        }
    }

    let restarts = cfg.restarts.max(1);
    let per_restart = (cfg.max_evals / restarts).max(lambda);

    for restart in 0..restarts {
        if evals >= cfg.max_evals {
            break;
        }
        let mut rng = rng_from(derive_seed(cfg.seed, restart as u64));
        let mut mean: Vec<f64> = if restart == 0 {
            cfg.center()
        } else {
            cfg.bounds
                .iter()
                .map(|&(lo, hi)| uniform(&mut rng, lo, hi))
                .collect()
        };
        let mut sigma = 1.0;
        let mut local_best = f64::INFINITY;
        let mut used = 0usize;

        while used < per_restart && evals < cfg.max_evals {
            // sample lambda offspring with individual log-normal step sizes
            let mut population: Vec<(f64, f64, Vec<f64>)> = Vec::with_capacity(lambda);
            for _ in 0..lambda {
                let s = sigma * (tau * standard_normal(&mut rng)).exp();
                let mut x: Vec<f64> = (0..dim)
                    .map(|k| mean[k] + s * scales[k] * standard_normal(&mut rng))
                    .collect();
                cfg.clip(&mut x);
                let v = objective(&x);
                population.push((v, s, x));
            }
            evals += lambda;
            used += lambda;

            population.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            if population[0].0 < best_value {
                best_value = population[0].0;
                best_point = population[0].2.clone();
            }
            if population[0].0 < local_best {
                local_best = population[0].0;
            }

            // recombine: mean of the mu best points and step sizes
            for (k, m) in mean.iter_mut().enumerate() {
                *m = population[..mu].iter().map(|ind| ind.2[k]).sum::<f64>() / mu as f64;
            }
            sigma = population[..mu].iter().map(|ind| ind.1).sum::<f64>() / mu as f64;
            if sigma < 1e-12 {
                break;
            }
        }
        restart_bests.push(local_best);
    }

    // converged when at least two restarts reproduced the winning basin
    let window = (100.0 * cfg.tol).max(1e-12);
    let top = restart_bests
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let near_best = restart_bests.iter().filter(|&&v| v <= top + window).count();
    GlobalMin {
        best_value,
        best_point,
        evals,
        converged: near_best >= 2.min(restarts),
    }
}

/// Nelder-Mead simplex descent from `start`, with every iterate clipped to
/// the box. Never returns a value above `objective(start)`.
pub fn local_polish(
    objective: impl Fn(&[f64]) -> f64,
    start: &[f64],
    cfg: &OptimizerConfig,
) -> (f64, Vec<f64>) {
    cfg.validate();
    let dim = cfg.bounds.len();
    assert_eq!(start.len(), dim, "start point dimension mismatch");

    let (alpha, gamma, rho, sig) = (1.0, 2.0, 0.5, 0.5);
    let clip = |x: &mut Vec<f64>| cfg.clip(x);

    // initial simplex: start plus per-coordinate steps of 5% of the box
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
    let mut s0 = start.to_vec();
    clip(&mut s0);
    simplex.push((objective(&s0), s0.clone()));
    for k in 0..dim {
        let (lo, hi) = cfg.bounds[k];
        let step = 0.05 * (hi - lo);
        let mut x = s0.clone();
        x[k] = if x[k] + step <= hi { x[k] + step } else { x[k] - step };
        simplex.push((objective(&x), x));
    }
    let mut evals = dim + 1;
    let budget = cfg.max_evals;

    while evals < budget {
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let spread = simplex[dim].0 - simplex[0].0;
        let size: f64 = (0..dim)
            .map(|k| {
                simplex
                    .iter()
                    .map(|(_, x)| (x[k] - simplex[0].1[k]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() < cfg.tol * 1e-3 && size < cfg.tol * 1e-3 {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(_, x)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();

        let mut reflected: Vec<f64> = (0..dim)
            .map(|k| centroid[k] + alpha * (centroid[k] - worst.1[k]))
            .collect();
        clip(&mut reflected);
        let fr = objective(&reflected);
        evals += 1;

        if fr < simplex[0].0 {
            let mut expanded: Vec<f64> = (0..dim)
                .map(|k| centroid[k] + gamma * (reflected[k] - centroid[k]))
                .collect();
            clip(&mut expanded);
            let fe = objective(&expanded);
            evals += 1;
            simplex[dim] = if fe < fr { (fe, expanded) } else { (fr, reflected) };
        } else if fr < simplex[dim - 1].0 {
            simplex[dim] = (fr, reflected);
        } else {
            let mut contracted: Vec<f64> = (0..dim)
                .map(|k| centroid[k] + rho * (worst.1[k] - centroid[k]))
                .collect();
            clip(&mut contracted);
            let fc = objective(&contracted);
            evals += 1;
            if fc < worst.0 {
                simplex[dim] = (fc, contracted);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].1.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = (0..dim)
                        .map(|k| best[k] + sig * (v.1[k] - best[k]))
                        .collect();
                    clip(&mut x);
                    let f = objective(&x);
                    *v = (f, x);
                }
                evals += dim;
            }
        }
    }

    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let candidate = simplex.swap_remove(0);
    let f_start = objective(&s0);
    if candidate.0 <= f_start {
        (candidate.0, candidate.1)
    } else {
        (f_start, s0)
    }
}

/// Global search followed by a simplex polish of the best point.
pub fn minimize_with_polish(
    objective: impl Fn(&[f64]) -> f64,
    cfg: &OptimizerConfig,
) -> GlobalMin {
    let global = global_minimize(&objective, cfg);
    let (value, point) = local_polish(&objective, &global.best_point, cfg);
    if value < global.best_value {
        GlobalMin {
            best_value: value,
            best_point: point,
            evals: global.evals,
            converged: global.converged,
        }
    } else {
        global
    }
}
