//! Multi-start ascent for ratios of positively homogeneous functions.
//!
//! Because both evaluators are homogeneous of degree 1, the ratio only
//! depends on direction, so the search runs on the Euclidean unit sphere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    /// Random starts, in addition to any caller-supplied initial points.
    pub starts: usize,
    /// Gradient iterations per start.
    pub max_iters: usize,
    pub step0: f64,
    pub shrink: f64,
    /// Smallest step (and polish radius) before a start is declared converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            starts: 8,
            max_iters: 300,
            step0: 0.5,
            shrink: 0.5,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl AscentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::invalid("ascent needs at least one start"));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::invalid("ascent tolerance must be positive"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::invalid("shrink factor must lie in (0, 1)"));
        }
        if !(self.step0 > 0.0) || !self.step0.is_finite() {
            return Err(Error::invalid("initial step must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AscentResult {
    /// `objective(argmax) / denominator(argmax)`, evaluated once more at the end.
    pub value: f64,
    pub argmax: Vec<f64>,
    /// Index of the winning start (initial points first, then random starts).
    pub start: usize,
    pub iterations: usize,
}

/// Maximizes `objective(x) / denominator(x)` over `x ≠ 0` in `R^dim`.
pub fn maximize_ratio<O, D>(objective: O, denominator: D, dim: usize, config: &AscentConfig) -> Result<AscentResult>
where
    O: Fn(&[f64]) -> f64 + Sync,
    D: Fn(&[f64]) -> f64 + Sync,
{
    maximize_ratio_from(objective, denominator, dim, config, &[])
}

/// As [`maximize_ratio`], with extra starting points tried before the random
/// starts. Random start `i` depends only on `(seed, i)`, so adding starts
/// never lowers the result.
pub fn maximize_ratio_from<O, D>(
    objective: O,
    denominator: D,
    dim: usize,
    config: &AscentConfig,
    initial: &[Vec<f64>],
) -> Result<AscentResult>
where
    O: Fn(&[f64]) -> f64 + Sync,
    D: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    if dim == 0 {
        return Err(Error::invalid("ascent dimension must be positive"));
    }
    if let Some(bad) = initial.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let ratio = |x: &[f64]| -> Result<f64> {
        let num = objective(x);
        let den = denominator(x);
        if !num.is_finite() || !den.is_finite() {
            return Err(Error::NonFinite("ratio evaluator".into()));
        }
        if den <= 0.0 {
            return Err(Error::Numerical(format!("denominator {den} is not positive")));
        }
        Ok(num / den)
    };
    let total = initial.len() + config.starts;
    let runs: Vec<Result<(f64, Vec<f64>, usize)>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let x0 = if i < initial.len() {
                initial[i].clone()
            } else {
                random_direction(dim, config.seed, (i - initial.len()) as u64)
            };
            climb(&ratio, x0, config)
        })
        .collect();
    let mut best: Option<AscentResult> = None;
    for (i, run) in runs.into_iter().enumerate() {
        let (_, x, iters) = run?;
        let value = ratio(&x)?;
        let better = best.as_ref().is_none_or(|b| value > b.value);
        if better {
            best = Some(AscentResult {
                value,
                argmax: x,
                start: i,
                iterations: iters,
            });
        }
    }
    Ok(best.expect("at least one start"))
}

fn random_direction(dim: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    loop {
        let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = unit(x) {
            return u;
        }
    }
}

const STALL_WINDOW: usize = 20;
const STALL_GAIN: f64 = 1e-6;
/// Window gains below this fraction count as crawling.
const CRAWL_GAIN: f64 = 1e-3;

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn unit(mut x: Vec<f64>) -> Option<Vec<f64>> {
    let r = norm2(&x);
    if !(r > 0.0) || !r.is_finite() {
        return None;
    }
    x.iter_mut().for_each(|c| *c /= r);
    Some(x)
}

/// One start: projected finite-difference ascent with backtracking, then a
/// compass search whenever the gradient step stalls.
fn climb<R>(ratio: &R, x0: Vec<f64>, config: &AscentConfig) -> Result<(f64, Vec<f64>, usize)>
where
    R: Fn(&[f64]) -> Result<f64>,
{
    let dim = x0.len();
    let Some(mut x) = unit(x0) else {
        return Err(Error::invalid("initial point must be nonzero and finite"));
    };
    let mut fx = ratio(&x)?;
    let mut step = config.step0;
    let mut iters = 0;
    let h = 1e-6;
    let mut probe = x.clone();
    let mut checkpoint = fx;
    while iters < config.max_iters {
        iters += 1;
        if iters % STALL_WINDOW == 0 {
            // Finite differences crawl along kinks, so interleave pattern
            // moves; stop once neither makes real progress.
            let gain = fx - checkpoint;
            if gain <= CRAWL_GAIN * fx.abs() {
                let (fp, xp) = polish(ratio, &x, fx, config.tol)?;
                if gain <= STALL_GAIN * fx.abs() && fp - fx <= 1e-12 * fx.abs() {
                    break;
                }
                if fp > fx {
                    x = xp;
                    fx = fp;
                }
            }
            checkpoint = fx;
        }
        let mut grad = vec![0.0; dim];
        for j in 0..dim {
            probe.copy_from_slice(&x);
            probe[j] = x[j] + h;
            let up = ratio(&probe)?;
            probe[j] = x[j] - h;
            let down = ratio(&probe)?;
            grad[j] = (up - down) / (2.0 * h);
        }
        let radial: f64 = grad.iter().zip(&x).map(|(g, c)| g * c).sum();
        grad.iter_mut().zip(&x).for_each(|(g, c)| *g -= radial * c);
        let gnorm = norm2(&grad);
        let mut moved = false;
        if gnorm > 1e-14 {
            while step >= config.tol {
                let cand: Vec<f64> = x.iter().zip(&grad).map(|(c, g)| c + step * g / gnorm).collect();
                if let Some(cand) = unit(cand) {
                    let fc = ratio(&cand)?;
                    if fc > fx {
                        x = cand;
                        fx = fc;
                        step = (step * 1.5).min(1.0);
                        moved = true;
                        break;
                    }
                }
                step *= config.shrink;
            }
        }
        if !moved {
            let (fp, xp) = polish(ratio, &x, fx, config.tol)?;
            if fp > fx * (1.0 + 1e-15) + 1e-300 {
                x = xp;
                fx = fp;
                step = config.step0 * 0.1;
            } else {
                break;
            }
        }
    }
    Ok((fx, x, iters))
}

/// Coordinate pattern search. The radius grows after a successful sweep so
/// that kinks of polyhedral norms can be crossed in a few moves.
fn polish<R>(ratio: &R, x0: &[f64], f0: f64, tol: f64) -> Result<(f64, Vec<f64>)>
where
    R: Fn(&[f64]) -> Result<f64>,
{
    let mut x = x0.to_vec();
    let mut fx = f0;
    let mut radius = 1e-2;
    let mut budget = 40 * x.len() + 200;
    while radius >= tol && budget > 0 {
        let mut improved = false;
        for j in 0..x.len() {
            for sign in [1.0, -1.0] {
                let mut cand = x.clone();
                cand[j] += sign * radius;
                budget = budget.saturating_sub(1);
                if let Some(cand) = unit(cand) {
                    let fc = ratio(&cand)?;
                    if fc > fx {
                        x = cand;
                        fx = fc;
                        improved = true;
                    }
                }
            }
        }
        if improved {
            radius = (radius * 2.0).min(0.5);
        } else {
            radius *= 0.25;
        }
    }
    Ok((fx, x))
}

/// Golden-section maximization of `g` on `[a, b]`; endpoints are compared
/// too, so the result is never below `g(a)` or `g(b)`.
pub fn golden_max<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        if gc >= gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - inv_phi * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + inv_phi * (hi - lo);
            gd = g(d);
        }
    }
    let mut best = if gc >= gd { (c, gc) } else { (d, gd) };
    for t in [a, b] {
        let v = g(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    best
}
