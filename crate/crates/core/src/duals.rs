//! Norms of finite sums of atoms `Σ_j x̂_j*` in the duals of free lattices.
//!
//! In `FBL^(p)[E]*` the norm is the supremum of
//! `(Σ_i ‖Σ_j a_ij x_j*‖^{p'})^{1/p'}` over matrices whose columns lie in the
//! unit ball of `ℓ_{p'}`; it reduces to `Σ_j ‖x_j*‖` at `p = ∞` and to
//! `max_± ‖Σ_j ±x_j*‖` at `p = 1`. In `FBL^{↑p}[E]*` it is pinned between the
//! partition value `L` and `K_p·L`, where `K_p` has no known numeric value.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{EstimateMeta, NormEstimate, FLAG_HEURISTIC};
use crate::exponent;
use crate::fblnorm::{lp_sum, WeakNorm};
use crate::fvl::DualFunction;
use crate::pap::ControllingFamilySpec;
use crate::solver::{self, AscentConfig};
use crate::spaces::{NormedSpace, Vector};

/// Largest family whose `p = 1` norm is found by full sign enumeration.
pub const SIGN_ENUMERATION_MAX: usize = 24;

/// Default size up to which partitions are enumerated exhaustively.
pub const DEFAULT_PARTITION_CAP: usize = 9;

/// Hard limit for exhaustive partition enumeration (Bell(12) ≈ 4.2e6).
pub const PARTITION_CAP_MAX: usize = 12;

/// Blocks up to this size get exact sign enumeration inside the local search.
const EXACT_BLOCK: usize = 12;

/// A formal sum of atoms `Σ_j x̂_j*`; weights are folded into the atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomCombination {
    pub space: NormedSpace,
    pub atoms: Vec<Vector>,
}

impl AtomCombination {
    /// The empty sum is allowed and acts as the zero functional.
    pub fn new(space: NormedSpace, atoms: Vec<Vector>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| a.dim() != space.dim()) {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: a.dim(),
            });
        }
        Ok(AtomCombination { space, atoms })
    }

    /// The atoms `e_1*, …, e_n*` of the canonical dual basis.
    pub fn canonical_basis(space: NormedSpace) -> Self {
        let n = space.dim();
        let atoms = (0..n).map(|i| Vector::basis(n, i)).collect();
        AtomCombination { space, atoms }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ_j f(x_j*)`.
    pub fn pair<F: DualFunction + ?Sized>(&self, f: &F) -> Result<f64> {
        pair(self, f)
    }

    fn dual_norms(&self) -> Vec<f64> {
        let dual = self.space.dual();
        self.atoms.iter().map(|a| dual.norm_raw(a)).collect()
    }

    fn flat(&self) -> Vec<f64> {
        self.atoms.iter().flat_map(|a| a.iter().copied()).collect()
    }
}

/// `Σ_j f(x_j*)`.
pub fn pair<F: DualFunction + ?Sized>(c: &AtomCombination, f: &F) -> Result<f64> {
    if f.space() != &c.space {
        return Err(Error::SpaceMismatch);
    }
    let total: f64 = c.atoms.iter().map(|a| f.value(a)).sum();
    if !total.is_finite() {
        return Err(Error::NonFinite("pairing".into()));
    }
    Ok(total)
}

/// Norm of `c` in `FBL^(p)[E]*`.
///
/// Exact at `p = ∞` and at `p = 1` (sign enumeration up to 24 atoms, or a
/// weak-norm engine that is exact for the space). For `1 < p < ∞` the lower
/// end comes from ascent over `m_cap × N` coefficient matrices and the upper
/// end is the `p = ∞` value.
pub fn atom_norm_fbl_p(c: &AtomCombination, p: f64, config: &AscentConfig, m_cap: usize) -> Result<NormEstimate> {
    exponent::check_closed(p, "p")?;
    config.validate()?;
    let started = Instant::now();
    let mut meta = EstimateMeta {
        seed: config.seed,
        ..Default::default()
    };
    let total: f64 = c.dual_norms().iter().sum();
    if c.is_empty() {
        return Ok(NormEstimate::exact(0.0, "empty", meta));
    }
    if p.is_infinite() || c.len() == 1 {
        return Ok(NormEstimate::exact(total, "closed-form", meta));
    }
    if p == 1.0 {
        let (value, exact, method) = sign_norm(c, config.seed)?;
        let est = NormEstimate::exact(value, method, meta);
        return Ok(if exact { est } else { est.with_flag(FLAG_HEURISTIC) });
    }
    if m_cap == 0 {
        return Err(Error::invalid("m_cap must be at least 1"));
    }
    let n_atoms = c.len();
    let m = m_cap;
    let q = exponent::conjugate(p);
    let dual = c.space.dual();
    let atoms: Vec<&[f64]> = c.atoms.iter().map(|a| a.as_slice()).collect();
    let dim = c.space.dim();
    let objective = |a: &[f64]| {
        let rows = a.chunks(n_atoms).map(|row| {
            let mut s = vec![0.0; dim];
            for (coef, x) in row.iter().zip(&atoms) {
                for (sk, xk) in s.iter_mut().zip(x.iter()) {
                    *sk += coef * xk;
                }
            }
            dual.norm_raw(&s)
        });
        lp_sum(rows.collect::<Vec<_>>().into_iter(), q)
    };
    let denominator = |a: &[f64]| {
        (0..n_atoms)
            .map(|j| lp_sum((0..m).map(|i| a[i * n_atoms + j].abs()), q))
            .fold(0.0, f64::max)
    };

    let mut inits = Vec::new();
    if m >= n_atoms {
        let mut id = vec![0.0; m * n_atoms];
        for j in 0..n_atoms {
            id[j * n_atoms + j] = 1.0;
        }
        inits.push(id);
    }
    let mut row = vec![0.0; m * n_atoms];
    let signs = best_signs(&atoms, &dual);
    row[..n_atoms].copy_from_slice(&signs);
    inits.push(row);
    let part = atom_norm_upper_p_bound(c, p, DEFAULT_PARTITION_CAP.min(n_atoms))?;
    if part.best_partition.len() <= m && part.best_partition.len() > 1 {
        let mut a = vec![0.0; m * n_atoms];
        for (k, (block, sg)) in part.best_partition.iter().zip(&part.best_signs).enumerate() {
            for (j, s) in block.iter().zip(sg) {
                a[k * n_atoms + j] = *s as f64;
            }
        }
        inits.push(a);
    }
    let r = solver::maximize_ratio_from(objective, denominator, m * n_atoms, config, &inits)?;
    meta.iterations = Some(r.iterations);
    meta.runtime_ms = Some(started.elapsed().as_millis() as u64);
    let est = NormEstimate {
        lower: r.value,
        upper: Some(total),
        method: "matrix-ascent".into(),
        flags: Vec::new(),
        meta,
    };
    Ok(est.clamp_order())
}

/// `max_± ‖Σ ±x_j*‖`, whether it is exact, and the method used.
fn sign_norm(c: &AtomCombination, seed: u64) -> Result<(f64, bool, &'static str)> {
    let engine = WeakNorm::new(c.space, 1.0, seed);
    // Polyhedral spaces and the plane have exact engines that scale better
    // than enumerating signs.
    if engine.is_exact_for(c.len()) {
        let (v, exact) = engine.eval(&c.flat(), true)?;
        return Ok((v, exact, "weak-1"));
    }
    if c.len() <= SIGN_ENUMERATION_MAX {
        let dual = c.space.dual();
        let atoms: Vec<&[f64]> = c.atoms.iter().map(|a| a.as_slice()).collect();
        return Ok((crate::fblnorm::sign_enumeration(&atoms, &dual), true, "sign-enumeration"));
    }
    let (v, exact) = engine.eval(&c.flat(), true)?;
    Ok((v, exact, "weak-1"))
}

/// Signs attaining `max_± ‖Σ ±x_j*‖` among an exhaustive search for short
/// families, or a greedy-and-flip search otherwise.
fn best_signs(atoms: &[&[f64]], dual: &NormedSpace) -> Vec<f64> {
    let cols: Vec<Vec<f64>> = atoms.iter().map(|a| a.to_vec()).collect();
    let (_, signs) = if atoms.len() <= EXACT_BLOCK {
        enumerate_signs(&cols, dual)
    } else {
        greedy_signs(&cols, dual)
    };
    signs.into_iter().map(f64::from).collect()
}

/// Lower end `L` of the `FBL^{↑p}[E]*` norm, attained by a signed partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionValue {
    pub value: f64,
    /// Blocks `S_k` as lists of atom indices.
    pub best_partition: Vec<Vec<usize>>,
    /// Sign of each atom within its block, aligned with `best_partition`.
    pub best_signs: Vec<Vec<i8>>,
    /// True when the partition came from local search rather than enumeration.
    pub heuristic: bool,
    /// The true norm lies in `[value, K_p·value]`.
    pub upper: String,
}

/// `L = sup_{S_k} (Σ_k max_± ‖Σ_{j ∈ S_k} ±x_j*‖^{p'})^{1/p'}` over set
/// partitions of the atoms.
///
/// Partitions are enumerated as restricted-growth strings when `N ≤ n_cap`;
/// ties keep the first partition in that order. Larger families use a local
/// search that moves single atoms between blocks, started from whichever of
/// the all-singletons and one-block partitions is better.
pub fn atom_norm_upper_p_bound(c: &AtomCombination, p: f64, n_cap: usize) -> Result<PartitionValue> {
    exponent::check_open(p, "p")?;
    if n_cap > PARTITION_CAP_MAX {
        return Err(Error::invalid(format!(
            "exhaustive partition enumeration is limited to {PARTITION_CAP_MAX} atoms"
        )));
    }
    let q = exponent::conjugate(p);
    let evaluator = BlockEval::new(c);
    let n = c.len();
    let (blocks, signs, heuristic) = if n == 0 {
        (Vec::new(), Vec::new(), false)
    } else if n <= n_cap {
        let (b, s) = enumerate_partitions(&evaluator, q);
        (b, s, false)
    } else {
        let (b, s) = local_search(&evaluator, q);
        (b, s, true)
    };
    let value = lp_sum(
        blocks
            .iter()
            .zip(&signs)
            .map(|(b, s)| evaluator.with_signs(b, s))
            .collect::<Vec<_>>()
            .into_iter(),
        q,
    );
    Ok(PartitionValue {
        value,
        best_partition: blocks,
        best_signs: signs,
        heuristic,
        upper: format!("K_p * {value}"),
    })
}

/// Atoms stored sparsely so that blocks of basis-like atoms in high
/// dimension are evaluated in time proportional to their support.
struct BlockEval {
    dual: NormedSpace,
    atoms: Vec<Vec<(usize, f64)>>,
}

impl BlockEval {
    fn new(c: &AtomCombination) -> Self {
        let atoms = c
            .atoms
            .iter()
            .map(|a| {
                a.iter()
                    .copied()
                    .enumerate()
                    .filter(|(_, v)| *v != 0.0)
                    .collect()
            })
            .collect();
        BlockEval {
            dual: c.space.dual(),
            atoms,
        }
    }

    /// Columns of the block restricted to the union of the supports.
    fn compact(&self, members: &[usize]) -> Vec<Vec<f64>> {
        let mut index: Vec<usize> = members
            .iter()
            .flat_map(|&j| self.atoms[j].iter().map(|(i, _)| *i))
            .collect();
        index.sort_unstable();
        index.dedup();
        members
            .iter()
            .map(|&j| {
                let mut col = vec![0.0; index.len()];
                for (i, v) in &self.atoms[j] {
                    let pos = index.binary_search(i).expect("index collected above");
                    col[pos] = *v;
                }
                col
            })
            .collect()
    }

    /// Best signs for the block: exhaustive for small blocks, else greedy
    /// with single flips.
    fn best(&self, members: &[usize]) -> (f64, Vec<i8>) {
        let cols = self.compact(members);
        if members.len() <= EXACT_BLOCK {
            enumerate_signs(&cols, &self.dual)
        } else {
            greedy_signs(&cols, &self.dual)
        }
    }

    fn with_signs(&self, members: &[usize], signs: &[i8]) -> f64 {
        let cols = self.compact(members);
        let mut sum = vec![0.0; cols.first().map_or(0, Vec::len)];
        for (col, s) in cols.iter().zip(signs) {
            for (a, b) in sum.iter_mut().zip(col) {
                *a += f64::from(*s) * b;
            }
        }
        magnitude_norm(&self.dual, &sum)
    }

    /// Improves given signs by single flips until none helps.
    fn refine(&self, members: &[usize], signs: &mut [i8]) -> f64 {
        let cols = self.compact(members);
        flip_search(&cols, &self.dual, signs)
    }
}

fn magnitude_norm(dual: &NormedSpace, v: &[f64]) -> f64 {
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).filter(|x| *x > 0.0).collect();
    dual.norm_of_magnitudes(&mut mags)
}

fn enumerate_signs(cols: &[Vec<f64>], dual: &NormedSpace) -> (f64, Vec<i8>) {
    let count = cols.len();
    if count == 0 {
        return (0.0, Vec::new());
    }
    let len = cols[0].len();
    let mut sum = vec![0.0; len];
    for col in cols {
        for (s, c) in sum.iter_mut().zip(col) {
            *s += c;
        }
    }
    let mut signs = vec![1i8; count];
    let mut best = (magnitude_norm(dual, &sum), signs.clone());
    for step in 1u64..(1u64 << (count - 1)) {
        let j = step.trailing_zeros() as usize + 1;
        signs[j] = -signs[j];
        for (s, c) in sum.iter_mut().zip(&cols[j]) {
            *s += 2.0 * f64::from(signs[j]) * c;
        }
        let v = magnitude_norm(dual, &sum);
        if v > best.0 {
            best = (v, signs.clone());
        }
    }
    best
}

fn greedy_signs(cols: &[Vec<f64>], dual: &NormedSpace) -> (f64, Vec<i8>) {
    let len = cols.first().map_or(0, Vec::len);
    let mut sum = vec![0.0; len];
    let mut signs = Vec::with_capacity(cols.len());
    for col in cols {
        let plus: Vec<f64> = sum.iter().zip(col).map(|(a, b)| a + b).collect();
        let minus: Vec<f64> = sum.iter().zip(col).map(|(a, b)| a - b).collect();
        if magnitude_norm(dual, &minus) > magnitude_norm(dual, &plus) {
            signs.push(-1);
            sum = minus;
        } else {
            signs.push(1);
            sum = plus;
        }
    }
    let v = flip_search(cols, dual, &mut signs);
    (v, signs)
}

fn flip_search(cols: &[Vec<f64>], dual: &NormedSpace, signs: &mut [i8]) -> f64 {
    let len = cols.first().map_or(0, Vec::len);
    let mut sum = vec![0.0; len];
    for (col, s) in cols.iter().zip(signs.iter()) {
        for (a, b) in sum.iter_mut().zip(col) {
            *a += f64::from(*s) * b;
        }
    }
    let mut value = magnitude_norm(dual, &sum);
    for _ in 0..20 {
        let mut changed = false;
        for j in 0..cols.len() {
            let flipped: Vec<f64> = sum
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| a - 2.0 * f64::from(signs[j]) * b)
                .collect();
            let v = magnitude_norm(dual, &flipped);
            if v > value * (1.0 + 1e-12) {
                value = v;
                sum = flipped;
                signs[j] = -signs[j];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    value
}

type Signed = (Vec<Vec<usize>>, Vec<Vec<i8>>);

/// Exhaustive search over restricted-growth strings.
fn enumerate_partitions(ev: &BlockEval, q: f64) -> Signed {
    let n = ev.atoms.len();
    // Block values and signs for every nonempty subset.
    let mut subset: Vec<(f64, Vec<i8>)> = vec![(0.0, Vec::new()); 1 << n];
    for (mask, slot) in subset.iter_mut().enumerate().skip(1) {
        let members: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        *slot = ev.best(&members);
    }
    let score = |masks: &[usize]| -> f64 {
        if q.is_infinite() {
            masks.iter().map(|&m| subset[m].0).fold(0.0, f64::max)
        } else {
            masks.iter().map(|&m| subset[m].0.powf(q)).sum()
        }
    };
    let mut rgs = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let blocks = rgs.iter().copied().max().unwrap_or(0) + 1;
        let mut masks = vec![0usize; blocks];
        for (j, &b) in rgs.iter().enumerate() {
            masks[b] |= 1 << j;
        }
        let s = score(&masks);
        if best.as_ref().is_none_or(|(v, _)| s > *v) {
            best = Some((s, masks));
        }
        if !next_rgs(&mut rgs) {
            break;
        }
    }
    let (_, masks) = best.expect("at least one partition");
    let blocks: Vec<Vec<usize>> = masks
        .iter()
        .map(|m| (0..n).filter(|j| m >> j & 1 == 1).collect())
        .collect();
    let signs = masks.iter().map(|m| subset[*m].1.clone()).collect();
    (blocks, signs)
}

/// Advances a restricted-growth string in lexicographic order.
fn next_rgs(a: &mut [usize]) -> bool {
    let n = a.len();
    for i in (1..n).rev() {
        let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
        if a[i] <= prefix_max {
            a[i] += 1;
            for x in a[i + 1..].iter_mut() {
                *x = 0;
            }
            return true;
        }
    }
    false
}

fn local_search(ev: &BlockEval, q: f64) -> Signed {
    let n = ev.atoms.len();
    let pow = |v: f64| v.powf(q);
    let singles: Vec<(f64, Vec<i8>)> = (0..n).map(|j| ev.best(&[j])).collect();
    let single_score: f64 = singles.iter().map(|(v, _)| pow(*v)).sum();
    let all: Vec<usize> = (0..n).collect();
    let one = ev.best(&all);

    let mut blocks: Vec<Vec<usize>>;
    let mut state: Vec<(f64, Vec<i8>)>;
    if pow(one.0) > single_score * (1.0 + 1e-12) {
        blocks = vec![all];
        state = vec![one];
    } else {
        blocks = (0..n).map(|j| vec![j]).collect();
        state = singles;
    }

    // Value of a block after a change: exact when small, otherwise the
    // carried signs improved by flips.
    let revalue = |members: &[usize], carried: Vec<i8>| -> (f64, Vec<i8>) {
        if members.is_empty() {
            (0.0, Vec::new())
        } else if members.len() <= EXACT_BLOCK {
            ev.best(members)
        } else {
            let mut s = carried;
            let v = ev.refine(members, &mut s);
            (v, s)
        }
    };

    for _pass in 0..50 {
        let mut improved = false;
        for j in 0..n {
            let from = blocks.iter().position(|b| b.contains(&j)).expect("every atom is placed");
            let pos = blocks[from].iter().position(|&x| x == j).expect("present");
            let mut rest = blocks[from].clone();
            rest.remove(pos);
            let mut rest_signs = state[from].1.clone();
            let own_sign = rest_signs.remove(pos);
            let rest_val = revalue(&rest, rest_signs);
            let base = pow(state[from].0);
            let total: f64 = state.iter().map(|(v, _)| pow(*v)).sum();
            let tol = 1e-12 * total.max(1.0);

            let mut best: Option<(f64, usize, (f64, Vec<i8>))> = None;
            for to in 0..=blocks.len() {
                if to == from || (to == blocks.len() && rest.is_empty()) {
                    continue;
                }
                let (members, carried, before) = if to == blocks.len() {
                    (vec![j], vec![own_sign], 0.0)
                } else {
                    let mut m = blocks[to].clone();
                    m.push(j);
                    let mut s = state[to].1.clone();
                    s.push(own_sign);
                    (m, s, pow(state[to].0))
                };
                let joined = revalue(&members, carried);
                let delta = pow(rest_val.0) + pow(joined.0) - base - before;
                if delta > tol && best.as_ref().is_none_or(|(d, _, _)| delta > *d) {
                    best = Some((delta, to, joined));
                }
            }
            if let Some((_, to, joined)) = best {
                if to == blocks.len() {
                    blocks.push(vec![j]);
                    state.push(joined);
                } else {
                    blocks[to].push(j);
                    state[to] = joined;
                }
                blocks[from] = rest;
                state[from] = rest_val;
                if blocks[from].is_empty() {
                    blocks.remove(from);
                    state.remove(from);
                }
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let signs = state.into_iter().map(|(_, s)| s).collect();
    (blocks, signs)
}

/// Atoms obtained from a weighted grid on the dual sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub combination: AtomCombination,
    /// Largest cell diameter of the grid, in the dual norm.
    pub diam: f64,
    pub omega: f64,
    /// `1 + dim E · ω(diam)`: the norm of the discretized functional exceeds
    /// that of the original by at most this factor.
    pub inflation_bound: f64,
}

/// Replaces a positive functional given by `weights` on grid `points` of
/// `S(E*)` with the atoms `μ_i x_i*`. Zero weights are dropped. The modulus
/// is that of the `FBL^(p)` controlling family.
pub fn discretize_functional(space: NormedSpace, points: &[Vector], weights: &[f64], p: f64) -> Result<Discretization> {
    exponent::check_closed(p, "p")?;
    if points.len() != weights.len() {
        return Err(Error::invalid("points and weights differ in length"));
    }
    if points.is_empty() {
        return Err(Error::invalid("the grid must be nonempty"));
    }
    let dual = space.dual();
    for (x, w) in points.iter().zip(weights) {
        if x.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: x.dim(),
            });
        }
        if !w.is_finite() {
            return Err(Error::NonFinite("grid weight".into()));
        }
        if *w < 0.0 {
            return Err(Error::invalid(format!("weights must be nonnegative, got {w}")));
        }
        if (dual.norm_raw(x) - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("grid points must lie on the dual unit sphere"));
        }
    }
    let atoms = points
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(x, w)| x.scaled(*w))
        .collect();
    let diam = cell_diameter(&dual, points)?;
    let spec = ControllingFamilySpec::fbl_p(p, space.dim())?;
    let omega = spec.modulus(diam);
    Ok(Discretization {
        combination: AtomCombination::new(space, atoms)?,
        diam,
        omega,
        inflation_bound: 1.0 + omega / spec.c(),
    })
}

/// Largest diameter of the cells that assign each sphere point to its grid
/// point: exact arc cells in the plane, twice the covering radius otherwise.
fn cell_diameter(dual: &NormedSpace, points: &[Vector]) -> Result<f64> {
    let dist = |a: &[f64], b: &[f64]| {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        dual.norm_raw(&d)
    };
    match dual.dim() {
        1 => Ok(0.0),
        2 => {
            use std::f64::consts::PI;
            let mut angles: Vec<f64> = points.iter().map(|x| x[1].atan2(x[0]).rem_euclid(2.0 * PI)).collect();
            angles.sort_by(f64::total_cmp);
            angles.dedup();
            if angles.len() == 1 {
                // One cell covers the whole sphere, whose diameter is 2.
                return Ok(2.0);
            }
            let k = angles.len();
            let at = |t: f64| {
                let mut u = [t.cos(), t.sin()];
                dual.normalize(&mut u);
                u
            };
            let mut diam = 0.0f64;
            for i in 0..k {
                let prev = if i == 0 { angles[k - 1] - 2.0 * PI } else { angles[i - 1] };
                let next = if i + 1 == k { angles[0] + 2.0 * PI } else { angles[i + 1] };
                let (lo, hi) = (0.5 * (prev + angles[i]), 0.5 * (angles[i] + next));
                let samples: Vec<[f64; 2]> = (0..=16).map(|s| at(lo + (hi - lo) * s as f64 / 16.0)).collect();
                for a in 0..samples.len() {
                    for b in 0..a {
                        diam = diam.max(dist(&samples[a], &samples[b]));
                    }
                }
            }
            Ok(diam)
        }
        _ => {
            let check = dual.sample_sphere(20 * points.len() + 2000, 3)?;
            let covering = check
                .iter()
                .map(|c| points.iter().map(|x| dist(c, x)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            Ok(2.0 * covering)
        }
    }
}
