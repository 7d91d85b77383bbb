//! Estimators for the norm of `FBL^(p)[E]`.
//!
//! `‖f‖ = sup (Σ_i |f(x_i*)|^p)^{1/p}` over tuples with weak-p norm at most
//! one. Lower bounds come from ascent over tuples, upper bounds from the
//! min-mass domination linear program on sphere grids, and every norm lies
//! between `‖f‖_∞` and `dim E · ‖f‖_∞`.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{EstimateMeta, NormEstimate, FLAG_GRID_CERTIFIED, FLAG_HEURISTIC};
use crate::exponent;
use crate::fvl::{self, DualFunction};
use crate::solver::{self, AscentConfig, LinearProgram, LpStatus, PivotRule, Relation};
use crate::spaces::{dot, NormedSpace, SpaceKind, Vector, EXTREME_POINT_CAP};

/// Largest tuple for which `p = 1` weak norms are computed by sign enumeration.
const SIGN_ENUMERATION_MAX: usize = 16;

/// Default cap on tuple length for [`fbl_p_lower`].
pub const DEFAULT_TUPLE_CAP: usize = 16;

/// Default grid size for the linear-programming upper bound.
pub const DEFAULT_LP_GRID: usize = 720;

/// An ordered tuple of dual vectors `(e_1*, …, e_N*)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTuple {
    pub space: NormedSpace,
    pub members: Vec<Vector>,
    #[serde(with = "crate::exponent::serde_exp")]
    pub p: f64,
}

impl FunctionalTuple {
    pub fn new(space: NormedSpace, members: Vec<Vector>, p: f64) -> Result<Self> {
        exponent::check_closed(p, "p")?;
        if members.is_empty() {
            return Err(Error::invalid("functional tuple must be nonempty"));
        }
        if let Some(m) = members.iter().find(|m| m.dim() != space.dim()) {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: m.dim(),
            });
        }
        Ok(FunctionalTuple { space, members, p })
    }

    /// `sup_{e ∈ B(E)} (Σ_i |<e_i*, e>|^p)^{1/p}`.
    pub fn weak_p_norm(&self, config: &AscentConfig) -> Result<f64> {
        weak_p_norm(self, config)
    }
}

/// See [`FunctionalTuple::weak_p_norm`]. Exact for `p = ∞`, a single member,
/// polyhedral `E`, Euclidean `E` with `p = 2`, and `p = 1` in dimension 2 or
/// with at most 16 members; otherwise a refined lower bound.
pub fn weak_p_norm(t: &FunctionalTuple, config: &AscentConfig) -> Result<f64> {
    config.validate()?;
    let engine = WeakNorm::new(t.space, t.p, config.seed);
    // Homogeneity: evaluate at unit scale so large entries cannot overflow.
    let scale = t
        .members
        .iter()
        .flat_map(|m| m.iter())
        .fold(0.0f64, |acc, c| acc.max(c.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let flat: Vec<f64> = t.members.iter().flat_map(|m| m.iter().map(|c| c / scale)).collect();
    let (value, _) = engine.eval(&flat, true)?;
    let value = value * scale;
    if !value.is_finite() {
        return Err(Error::NonFinite("weak p-norm".into()));
    }
    Ok(value)
}

/// Weak-p norm evaluator, prepared once per space and exponent.
pub(crate) struct WeakNorm {
    space: NormedSpace,
    p: f64,
    /// Extreme points of `B(E)`, one per antipodal pair.
    extreme: Option<Vec<Vec<f64>>>,
    /// Unit vectors of `E` sampled along the upper half circle (dimension 2).
    circle: Option<(Vec<f64>, Vec<[f64; 2]>)>,
    /// Unit vectors of `E` on a sphere grid (dimension ≥ 3).
    sphere: Option<Vec<Vec<f64>>>,
    seed: u64,
}

const CIRCLE_GRID: usize = 360;
const SPHERE_GRID: usize = 1500;

impl WeakNorm {
    pub(crate) fn new(space: NormedSpace, p: f64, seed: u64) -> Self {
        let n = space.dim();
        let extreme = if p.is_infinite() {
            None
        } else {
            space.extreme_points(EXTREME_POINT_CAP).map(|pts| {
                let mut half = Vec::new();
                for v in pts {
                    let first = v.iter().copied().find(|c| *c != 0.0).unwrap_or(0.0);
                    if first > 0.0 {
                        half.push(v);
                    }
                }
                half
            })
        };
        let spectral = space.kind() == SpaceKind::Lq(2.0) && p == 2.0;
        let needs_grid = extreme.is_none() && !spectral && !p.is_infinite();
        let circle = (needs_grid && n == 2).then(|| {
            let thetas: Vec<f64> = (0..CIRCLE_GRID)
                .map(|k| std::f64::consts::PI * k as f64 / CIRCLE_GRID as f64)
                .collect();
            let pts = thetas
                .iter()
                .map(|t| {
                    let mut u = [t.cos(), t.sin()];
                    space.normalize(&mut u);
                    u
                })
                .collect();
            (thetas, pts)
        });
        let sphere = (needs_grid && n >= 3).then(|| {
            space
                .sample_sphere(SPHERE_GRID, seed)
                .expect("sphere grid size is positive")
                .into_iter()
                .map(Vector::into_inner)
                .collect()
        });
        WeakNorm {
            space,
            p,
            extreme,
            circle,
            sphere,
            seed,
        }
    }

    /// Weak norm of the flattened tuple, and whether the value is exact.
    /// `accurate = false` trades refinement for speed inside optimizers.
    pub(crate) fn eval(&self, flat: &[f64], accurate: bool) -> Result<(f64, bool)> {
        let n = self.space.dim();
        if flat.is_empty() || flat.len() % n != 0 {
            return Err(Error::invalid("tuple length is not a multiple of the dimension"));
        }
        let members: Vec<&[f64]> = flat.chunks(n).collect();
        let dual = self.space.dual();
        if self.p.is_infinite() || members.len() == 1 {
            let v = members.iter().map(|m| dual.norm_raw(m)).fold(0.0, f64::max);
            return Ok((v, true));
        }
        if let Some(ext) = &self.extreme {
            let v = ext
                .iter()
                .map(|e| self.pnorm_at(&members, e))
                .fold(0.0, f64::max);
            return Ok((v, true));
        }
        if self.space.kind() == SpaceKind::Lq(2.0) && self.p == 2.0 {
            let mut gram = DMatrix::<f64>::zeros(n, n);
            for m in &members {
                for i in 0..n {
                    for j in 0..n {
                        gram[(i, j)] += m[i] * m[j];
                    }
                }
            }
            let eig = SymmetricEigen::new(gram);
            let top = eig.eigenvalues.iter().fold(0.0f64, |a, b| a.max(*b));
            return Ok((top.max(0.0).sqrt(), true));
        }
        if self.p == 1.0 && n == 2 {
            return Ok((sign_arcs(&members, &dual), true));
        }
        if self.p == 1.0 && members.len() <= SIGN_ENUMERATION_MAX {
            return Ok((sign_enumeration(&members, &dual), true));
        }
        if let Some((thetas, pts)) = &self.circle {
            // Inside optimizers a quarter of the grid with wider refinement
            // windows is accurate enough; certification uses the full grid.
            let stride = if accurate { 1 } else { 4 };
            let vals: Vec<f64> = pts
                .iter()
                .step_by(stride)
                .map(|u| self.pnorm_at(&members, u))
                .collect();
            let mut best = vals.iter().copied().fold(0.0, f64::max);
            let order = fvl::peak_order(&vals, true);
            let h = stride as f64 * std::f64::consts::PI / CIRCLE_GRID as f64;
            let refine = if accurate { 3 } else { 2 };
            for &k in order.iter().take(refine) {
                let k = k * stride;
                let g = |t: f64| {
                    let mut u = [t.cos(), t.sin()];
                    self.space.normalize(&mut u);
                    self.pnorm_at(&members, &u)
                };
                let tol = if accurate { 1e-13 } else { 1e-7 };
                let (_, v) = solver::golden_max(&g, thetas[k] - h, thetas[k] + h, tol);
                best = best.max(v);
            }
            return Ok((best, false));
        }
        let sphere = self.sphere.as_ref().expect("grid prepared for this case");
        let vals: Vec<f64> = sphere.iter().map(|u| self.pnorm_at(&members, u)).collect();
        let mut best = vals.iter().copied().fold(0.0, f64::max);
        if accurate {
            let order = fvl::peak_order(&vals, false);
            let init: Vec<Vec<f64>> = order.iter().take(3).map(|&k| sphere[k].clone()).collect();
            let config = AscentConfig {
                starts: 1,
                max_iters: 100,
                seed: self.seed,
                ..AscentConfig::default()
            };
            let r = solver::maximize_ratio_from(
                |e: &[f64]| self.pnorm_at(&members, e),
                |e: &[f64]| self.space.norm_raw(e),
                n,
                &config,
                &init,
            )?;
            best = best.max(r.value);
        }
        Ok((best, false))
    }

    fn pnorm_at(&self, members: &[&[f64]], e: &[f64]) -> f64 {
        lp_sum(members.iter().map(|m| dot(m, e).abs()), self.p)
    }

    pub(crate) fn is_exact_for(&self, count: usize) -> bool {
        self.p.is_infinite()
            || count == 1
            || self.extreme.is_some()
            || (self.space.kind() == SpaceKind::Lq(2.0) && self.p == 2.0)
            || (self.p == 1.0 && (self.space.dim() == 2 || count <= SIGN_ENUMERATION_MAX))
    }
}

/// `(Σ v_i^p)^{1/p}` for nonnegative `v_i`, computed without overflow.
pub(crate) fn lp_sum<I: Iterator<Item = f64> + Clone>(vals: I, p: f64) -> f64 {
    let peak = vals.clone().fold(0.0f64, f64::max);
    if p.is_infinite() || peak == 0.0 || !peak.is_finite() {
        return peak;
    }
    if p == 1.0 {
        return vals.sum();
    }
    peak * vals.map(|v| (v / peak).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `max_± ‖Σ ±x_i*‖` in dimension 2: only sign patterns realized by some
/// direction can win, and those change only where a direction becomes
/// orthogonal to a member.
fn sign_arcs(members: &[&[f64]], dual: &NormedSpace) -> f64 {
    use std::f64::consts::PI;
    let mut cuts: Vec<f64> = members
        .iter()
        .filter(|m| m[0] != 0.0 || m[1] != 0.0)
        .map(|m| (m[1].atan2(m[0]) + PI / 2.0).rem_euclid(PI))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.is_empty() {
        return 0.0;
    }
    let mut best = 0.0f64;
    for k in 0..cuts.len() {
        let next = if k + 1 < cuts.len() { cuts[k + 1] } else { cuts[0] + PI };
        let mid = 0.5 * (cuts[k] + next);
        let u = [mid.cos(), mid.sin()];
        let mut sum = [0.0, 0.0];
        for m in members {
            let s = if dot(m, &u) >= 0.0 { 1.0 } else { -1.0 };
            sum[0] += s * m[0];
            sum[1] += s * m[1];
        }
        best = best.max(dual.norm_raw(&sum));
    }
    best
}

/// `max_± ‖Σ ±x_i*‖` by enumerating `2^{N−1}` sign patterns (first sign `+`).
pub(crate) fn sign_enumeration(members: &[&[f64]], dual: &NormedSpace) -> f64 {
    let n = dual.dim();
    let count = members.len();
    if count == 0 {
        return 0.0;
    }
    let mut sum = vec![0.0; n];
    for m in members {
        for (s, c) in sum.iter_mut().zip(m.iter()) {
            *s += c;
        }
    }
    let mut best = dual.norm_raw(&sum);
    // Gray code over the signs of members 1..N; member 0 keeps its + sign.
    let mut signs = vec![1.0; count];
    for step in 1u64..(1u64 << (count - 1)) {
        let j = step.trailing_zeros() as usize + 1;
        signs[j] = -signs[j];
        for (s, c) in sum.iter_mut().zip(members[j].iter()) {
            *s += 2.0 * signs[j] * c;
        }
        best = best.max(dual.norm_raw(&sum));
    }
    best
}

/// Lower bound for the `FBL^(p)[E]` norm of `f` from the tuple supremum.
///
/// Tuples of length `N ∈ {1, 2, 4, …, tuple_cap}` are optimized jointly over
/// all `N·dim` coordinates, each rung warm-started from the previous one. For
/// `p = ∞` the norm is the uniform norm and a single functional suffices.
pub fn fbl_p_lower<F: DualFunction + ?Sized>(
    f: &F,
    p: f64,
    tuple_cap: usize,
    config: &AscentConfig,
) -> Result<NormEstimate> {
    exponent::check_closed(p, "p")?;
    config.validate()?;
    if tuple_cap == 0 {
        return Err(Error::invalid("tuple_cap must be at least 1"));
    }
    let started = Instant::now();
    let space = *f.space();
    let n = space.dim();
    let dual = space.dual();
    let grid = fvl::default_sup_grid(n);
    let (sup, argmax) = fvl::sup_with_argmax(f, grid, config.seed)?;
    let mut meta = EstimateMeta {
        seed: config.seed,
        grid: vec![grid],
        tuple_cap: Some(tuple_cap),
        iterations: Some(0),
        runtime_ms: None,
    };
    if p.is_infinite() || tuple_cap == 1 || sup == 0.0 {
        meta.runtime_ms = Some(started.elapsed().as_millis() as u64);
        let mut est = NormEstimate::exact(sup, "tuple-ascent", meta);
        est.upper = None;
        return Ok(est);
    }

    let engine = WeakNorm::new(space, p, config.seed);
    let pts: Vec<Vec<f64>> = dual
        .sample_sphere(grid, config.seed)?
        .into_iter()
        .map(Vector::into_inner)
        .collect();
    let vals: Vec<f64> = pts.iter().map(|x| f.value(x).abs()).collect();
    let peaks = fvl::peak_order(&vals, n == 2);

    let numerator = |flat: &[f64]| lp_sum(flat.chunks(n).map(|m| f.value(m).abs()), p);
    let fast = |flat: &[f64]| engine.eval(flat, false).map(|v| v.0).unwrap_or(f64::NAN);

    let mut best_value = sup;
    let mut best_tuple: Vec<f64> = argmax.clone();
    let mut iterations = 0;
    let mut size = 1;
    while size < tuple_cap {
        size = (size * 2).min(tuple_cap);
        let mut inits = Vec::new();
        // Previous winner padded with small copies of grid peaks.
        let mut padded = best_tuple.clone();
        for k in 0..size - padded.len() / n {
            let src = &pts[peaks[k % peaks.len()]];
            padded.extend(src.iter().map(|c| 0.1 * c));
        }
        inits.push(padded);
        // Distinct grid peaks, weighted evenly and by |f|.
        let top: Vec<&Vec<f64>> = peaks.iter().take(size).map(|&k| &pts[k]).collect();
        if top.len() == size {
            inits.push(top.iter().flat_map(|x| x.iter().copied()).collect());
            inits.push(
                top.iter()
                    .flat_map(|x| {
                        let w = (f.value(x).abs() / sup).max(1e-3);
                        x.iter().map(move |c| w * c)
                    })
                    .collect(),
            );
        }
        // An evenly spread tuple.
        let spread = dual.sample_sphere(2 * size, config.seed.wrapping_add(size as u64))?;
        inits.push(
            spread
                .iter()
                .take(size)
                .flat_map(|x| {
                    let w = (f.value(x).abs() / sup).max(1e-3);
                    x.iter().map(move |c| w * c).collect::<Vec<_>>()
                })
                .collect(),
        );
        // Random starts pay off on short tuples; longer ones mostly inherit
        // structure from the warm starts.
        let rung = AscentConfig {
            seed: config.seed.wrapping_add(size as u64),
            starts: if size == 2 { config.starts } else { config.starts.div_ceil(4) },
            ..config.clone()
        };
        let r = solver::maximize_ratio_from(numerator, fast, size * n, &rung, &inits)?;
        iterations += r.iterations;
        let (w, _) = engine.eval(&r.argmax, true)?;
        let value = numerator(&r.argmax) / w;
        if value > best_value {
            best_value = value;
            best_tuple = r.argmax;
        }
    }
    meta.iterations = Some(iterations);
    meta.runtime_ms = Some(started.elapsed().as_millis() as u64);
    let mut est = NormEstimate {
        lower: best_value,
        upper: None,
        method: "tuple-ascent".into(),
        flags: Vec::new(),
        meta,
    };
    if !engine.is_exact_for(best_tuple.len() / n) {
        est = est.with_flag(FLAG_HEURISTIC);
    }
    Ok(est)
}

/// Upper bound from the min-mass domination program: find masses `μ_m ≥ 0`
/// on a grid of `S(E)` with `Σ_m μ_m |<t, e_m>|^p ≥ |f(t)|^p` at every test
/// functional `t` of a grid on `S(E*)`; the bound is `(Σ μ_m)^{1/p}`.
///
/// The program is solved in its dual form, whose optimal multipliers also
/// yield a certified lower bound. Both grids are recorded as `[mass, test]`.
pub fn fbl_p_upper_lp<F: DualFunction + ?Sized>(
    f: &F,
    p: f64,
    grid_mass: usize,
    grid_test: usize,
    seed: u64,
) -> Result<NormEstimate> {
    exponent::check_closed(p, "p")?;
    if p.is_infinite() {
        return Err(Error::invalid(
            "the domination program needs p < inf; use the sup-norm estimate for p = inf",
        ));
    }
    if grid_mass == 0 || grid_test == 0 {
        return Err(Error::invalid("grid sizes must be positive"));
    }
    let started = Instant::now();
    let space = *f.space();
    let dual = space.dual();
    let masses = canonical_directions(space.sample_sphere(grid_mass, seed)?, |_| 0.0);
    let tests = canonical_directions(dual.sample_sphere(grid_test, seed.wrapping_add(1))?, |t| {
        let neg: Vec<f64> = t.iter().map(|c| -c).collect();
        f.value(t).abs().max(f.value(&neg).abs())
    });
    if tests.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite("function on the test grid".into()));
    }
    let meta = EstimateMeta {
        seed,
        grid: vec![grid_mass, grid_test],
        ..Default::default()
    };
    let peak = tests.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(NormEstimate::exact(0.0, "domination-lp", meta).with_flag(FLAG_GRID_CERTIFIED));
    }
    let rows: Vec<(Vec<f64>, f64)> = tests
        .into_iter()
        .filter(|(_, v)| *v > 1e-14 * peak)
        .map(|(t, v)| (t, (v / peak).powf(p)))
        .collect();

    // Dual program: maximize Σ_t b_t y_t subject to Σ_t |<t, e_m>|^p y_t ≤ 1.
    let mut lp = LinearProgram::new(rows.iter().map(|(_, b)| -b).collect());
    for (e, _) in &masses {
        let coeffs = rows.iter().map(|(t, _)| dot(t, e).abs().powf(p)).collect();
        lp.constrain(coeffs, Relation::Le, 1.0);
    }
    let sol = lp.solve_with(PivotRule::Hybrid)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(Error::LpInfeasible { grid_mass, grid_test }),
        LpStatus::Infeasible | LpStatus::NumericalFailure => {
            return Err(Error::Numerical(format!(
                "domination program failed after {} iterations",
                sol.iterations
            )))
        }
    }
    let mass = (-sol.value).max(0.0);
    let upper = peak * mass.powf(1.0 / p);

    // The dual multipliers define a tuple y_t^{1/p}·(±t) whose ratio is a
    // genuine lower bound once its weak norm is computed off-grid.
    let mut lower = peak;
    let support: Vec<(usize, f64)> = sol
        .x
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, y)| *y > 1e-15)
        .collect();
    if !support.is_empty() {
        let flat: Vec<f64> = support
            .iter()
            .flat_map(|&(k, y)| rows[k].0.iter().map(move |c| c * y.powf(1.0 / p)))
            .collect();
        let engine = WeakNorm::new(space, p, seed);
        let (w, _) = engine.eval(&flat, true)?;
        let num: f64 = support.iter().map(|&(k, y)| y * rows[k].1).sum::<f64>();
        if w > 0.0 {
            lower = lower.max(peak * num.powf(1.0 / p) / w);
        }
    }
    let mut meta = meta;
    meta.iterations = Some(sol.iterations);
    meta.runtime_ms = Some(started.elapsed().as_millis() as u64);
    let est = NormEstimate {
        lower: lower.min(upper * (1.0 + 1e-9)),
        upper: Some(upper),
        method: "domination-lp".into(),
        flags: Vec::new(),
        meta,
    };
    Ok(est.with_flag(FLAG_GRID_CERTIFIED).clamp_order())
}

/// Picks one representative per antipodal pair (first nonzero coordinate
/// positive) and merges duplicates, keeping the largest weight.
fn canonical_directions<W: Fn(&[f64]) -> f64>(pts: Vec<Vector>, weight: W) -> Vec<(Vec<f64>, f64)> {
    let mut out: Vec<(Vec<f64>, f64)> = Vec::with_capacity(pts.len());
    let mut seen = std::collections::HashMap::new();
    for v in pts {
        let mut x = v.into_inner();
        let first = x.iter().copied().find(|c| c.abs() > 1e-14).unwrap_or(0.0);
        if first < 0.0 {
            x.iter_mut().for_each(|c| *c = -*c);
        }
        let key: Vec<i64> = x.iter().map(|c| (c * 1e10).round() as i64).collect();
        let w = weight(&x);
        match seen.get(&key) {
            Some(&i) => {
                let slot: &mut (Vec<f64>, f64) = &mut out[i];
                if w > slot.1 {
                    slot.1 = w;
                }
            }
            None => {
                seen.insert(key, out.len());
                out.push((x, w));
            }
        }
    }
    out
}

/// `(‖f‖_∞ lower estimate, dim E · ‖f‖_∞ upper estimate)`, which brackets
/// every `FBL^(p)` norm of `f`.
pub fn sandwich_bounds<F: DualFunction + ?Sized>(f: &F, grid: usize, seed: u64) -> Result<(f64, f64)> {
    let est = fvl::sup_norm_on_dual_ball(f, grid, seed)?;
    let dim = f.space().dim() as f64;
    Ok((est.lower, dim * est.upper.unwrap_or(est.lower)))
}
