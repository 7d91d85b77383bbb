//! Finite-dimensional normed spaces, their duals, and unit-sphere sampling.
//!
//! Three families are supported, all on `R^n` with the Euclidean pairing
//! `<x*, x> = Σ x*_i x_i` between a space and its dual:
//!
//! * `Lq(q)`: the usual `ℓ_q^n`, `q ∈ [1, ∞]`;
//! * `LorentzWeak(p)`: weak `ℓ_p`, normed by `sup_k k^{1/p-1} Σ_{i≤k} x*_i`;
//! * `LorentzL1(r)`: Lorentz `ℓ_{r,1}`, normed by `Σ_i (i^{1/r} - (i-1)^{1/r}) x*_i`,
//!
//! where `x*` is the decreasing rearrangement of `|x|`. The last two are
//! dual to each other with conjugate indices.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::exponent::{self, conjugate};

/// Upper limit on the number of extreme points enumerated for polyhedral balls.
pub const EXTREME_POINT_CAP: usize = 4096;

/// A coordinate vector with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("vector must have at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("vector coordinates".into()));
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The `i`-th canonical basis vector of `R^dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, c: f64) -> Vector {
        Vector(self.0.iter().map(|x| c * x).collect())
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Euclidean pairing of two coordinate slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn euclidean(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// The norm family of a space together with its index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceKind {
    Lq(f64),
    LorentzWeak(f64),
    LorentzL1(f64),
}

impl SpaceKind {
    pub fn param(&self) -> f64 {
        match *self {
            SpaceKind::Lq(q) | SpaceKind::LorentzWeak(q) | SpaceKind::LorentzL1(q) => q,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            SpaceKind::Lq(_) => "lq",
            SpaceKind::LorentzWeak(_) => "lorentz_weak",
            SpaceKind::LorentzL1(_) => "lorentz_l1",
        }
    }
}

/// A finite-dimensional normed space `(R^dim, kind)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct NormedSpace {
    kind: SpaceKind,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    kind: String,
    #[serde(with = "crate::exponent::serde_exp")]
    param: f64,
    dim: usize,
}

impl TryFrom<SpaceRepr> for NormedSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        let kind = match r.kind.to_ascii_lowercase().as_str() {
            "lq" | "l" => SpaceKind::Lq(r.param),
            "lorentz_weak" | "lorentzweak" | "weak" => SpaceKind::LorentzWeak(r.param),
            "lorentz_l1" | "lorentzl1" => SpaceKind::LorentzL1(r.param),
            other => return Err(Error::invalid(format!("unknown space kind {other:?}"))),
        };
        NormedSpace::new(kind, r.dim)
    }
}

impl From<NormedSpace> for SpaceRepr {
    fn from(s: NormedSpace) -> Self {
        SpaceRepr {
            kind: s.kind.tag().to_string(),
            param: s.kind.param(),
            dim: s.dim,
        }
    }
}

impl NormedSpace {
    pub fn new(kind: SpaceKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("space dimension must be positive"));
        }
        match kind {
            SpaceKind::Lq(q) => exponent::check_closed(q, "Lq index")?,
            SpaceKind::LorentzWeak(p) => exponent::check_open(p, "weak-Lp index")?,
            SpaceKind::LorentzL1(r) => exponent::check_open(r, "Lorentz index")?,
        }
        Ok(NormedSpace { kind, dim })
    }

    /// `ℓ_q^dim`.
    pub fn lq(q: f64, dim: usize) -> Result<Self> {
        NormedSpace::new(SpaceKind::Lq(q), dim)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The dual space under the Euclidean pairing.
    pub fn dual(&self) -> NormedSpace {
        let kind = match self.kind {
            SpaceKind::Lq(q) => SpaceKind::Lq(conjugate(q)),
            SpaceKind::LorentzWeak(p) => SpaceKind::LorentzL1(conjugate(p)),
            SpaceKind::LorentzL1(r) => SpaceKind::LorentzWeak(conjugate(r)),
        };
        NormedSpace {
            kind,
            dim: self.dim,
        }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("norm argument".into()));
        }
        Ok(())
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.norm_raw(x))
    }

    pub fn dual_norm(&self, xstar: &[f64]) -> Result<f64> {
        self.dual().norm(xstar)
    }

    /// Norm without input validation; callers guarantee length and finiteness.
    pub(crate) fn norm_raw(&self, x: &[f64]) -> f64 {
        match self.kind {
            SpaceKind::Lq(q) => lq_norm(q, x),
            _ => {
                let mut mags: Vec<f64> = x.iter().map(|c| c.abs()).collect();
                self.norm_of_magnitudes(&mut mags)
            }
        }
    }

    /// Norm of any vector whose nonzero entries have the given absolute
    /// values. Zeros may be omitted: every supported norm ignores them.
    /// The slice is reordered in place.
    pub(crate) fn norm_of_magnitudes(&self, mags: &mut [f64]) -> f64 {
        match self.kind {
            SpaceKind::Lq(q) => lq_norm(q, mags),
            SpaceKind::LorentzWeak(p) => {
                sort_descending(mags);
                let expo = 1.0 / p - 1.0;
                let mut best = 0.0f64;
                let mut partial = 0.0;
                for (k, m) in mags.iter().enumerate() {
                    partial += m;
                    best = best.max(partial * ((k + 1) as f64).powf(expo));
                }
                best
            }
            SpaceKind::LorentzL1(r) => {
                sort_descending(mags);
                let expo = 1.0 / r;
                let mut prev = 0.0;
                let mut total = 0.0;
                for (k, m) in mags.iter().enumerate() {
                    let cur = ((k + 1) as f64).powf(expo);
                    total += (cur - prev) * m;
                    prev = cur;
                }
                total
            }
        }
    }

    /// Vertices of the unit ball when it is a polytope with at most `cap`
    /// vertices; `None` for smooth balls or oversized vertex sets.
    pub fn extreme_points(&self, cap: usize) -> Option<Vec<Vec<f64>>> {
        let n = self.dim;
        match self.kind {
            SpaceKind::Lq(q) if q == 1.0 => {
                let mut pts = Vec::with_capacity(2 * n);
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; n];
                        v[i] = s;
                        pts.push(v);
                    }
                }
                Some(pts)
            }
            SpaceKind::Lq(q) if q.is_infinite() => {
                if n >= 32 || (1usize << n) > cap {
                    return None;
                }
                Some(sign_vectors(&vec![1.0; n]))
            }
            SpaceKind::LorentzL1(r) => {
                let count = 3usize.checked_pow(n as u32)?.checked_sub(1)?;
                if count > cap {
                    return None;
                }
                let mut pts = Vec::with_capacity(count);
                // Ternary digits 0, 1, 2 encode coordinate values 0, +1, -1.
                for code in 1..=count {
                    let mut v = vec![0.0; n];
                    let mut c = code;
                    let mut support = 0usize;
                    for coord in v.iter_mut() {
                        match c % 3 {
                            1 => {
                                *coord = 1.0;
                                support += 1;
                            }
                            2 => {
                                *coord = -1.0;
                                support += 1;
                            }
                            _ => {}
                        }
                        c /= 3;
                    }
                    let scale = (support as f64).powf(-1.0 / r);
                    v.iter_mut().for_each(|x| *x *= scale);
                    pts.push(v);
                }
                Some(pts)
            }
            SpaceKind::LorentzWeak(p) => {
                let fact: usize = (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))?;
                let count = fact.checked_mul(1usize.checked_shl(n as u32)?)?;
                if n >= 32 || count > cap {
                    return None;
                }
                let pp = conjugate(p);
                let w: Vec<f64> = (1..=n)
                    .map(|i| (i as f64).powf(1.0 / pp) - ((i - 1) as f64).powf(1.0 / pp))
                    .collect();
                let mut pts = Vec::with_capacity(count);
                for perm in permutations(&w) {
                    pts.extend(sign_vectors(&perm));
                }
                Some(pts)
            }
            SpaceKind::Lq(_) => None,
        }
    }

    /// `count` deterministic points of norm one.
    ///
    /// In dimension 2 the points sit at equiangular directions `2πk/count`
    /// (the seed is unused); in dimension 3 a Fibonacci lattice with a
    /// seed-dependent azimuthal offset; above that, Halton points with a
    /// seeded Cranley-Patterson shift pushed through the normal quantile.
    /// Every direction is then rescaled to unit norm in this space.
    pub fn sample_sphere(&self, count: usize, seed: u64) -> Result<Vec<Vector>> {
        if count == 0 {
            return Err(Error::invalid("sphere sample count must be at least 1"));
        }
        let dirs = euclidean_directions(self.dim, count, seed);
        Ok(dirs
            .into_iter()
            .map(|mut d| {
                let nrm = self.norm_raw(&d);
                d.iter_mut().for_each(|x| *x /= nrm);
                Vector(d)
            })
            .collect())
    }

    /// Projects `x != 0` radially onto the unit sphere of this space.
    pub(crate) fn normalize(&self, x: &mut [f64]) -> f64 {
        let nrm = self.norm_raw(x);
        if nrm > 0.0 {
            x.iter_mut().for_each(|c| *c /= nrm);
        }
        nrm
    }
}

impl fmt::Display for NormedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::Lq(q) => write!(f, "l{}:{}", exponent::format(q), self.dim),
            SpaceKind::LorentzWeak(p) => write!(f, "lorentzweak:{p}:{}", self.dim),
            SpaceKind::LorentzL1(r) => write!(f, "lorentzl1:{r}:{}", self.dim),
        }
    }
}

impl FromStr for NormedSpace {
    type Err = Error;

    /// Accepts `l1:4`, `l2:3`, `linf:2`, `l3.5:4`, `lq:3.5:4`,
    /// `lorentzweak:<p>:<n>` and `lorentzl1:<r>:<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::invalid(format!("cannot parse space {s:?}"));
        let dim = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let head = parts.first().ok_or_else(bad)?.to_ascii_lowercase();
        match (head.as_str(), parts.len()) {
            ("lq", 3) => NormedSpace::lq(exponent::parse(parts[1])?, dim(parts[2])?),
            ("lorentzweak" | "lorentz_weak" | "weak", 3) => NormedSpace::new(
                SpaceKind::LorentzWeak(exponent::parse(parts[1])?),
                dim(parts[2])?,
            ),
            ("lorentzl1" | "lorentz_l1", 3) => NormedSpace::new(
                SpaceKind::LorentzL1(exponent::parse(parts[1])?),
                dim(parts[2])?,
            ),
            (h, 2) if h.starts_with('l') => {
                NormedSpace::lq(exponent::parse(&h[1..]).map_err(|_| bad())?, dim(parts[1])?)
            }
            _ => Err(bad()),
        }
    }
}

/// `sup_{t>0} t · #{i : |x_i| > t}^{1/p}`, computed as
/// `max_k x*_k · k^{1/p}` over the decreasing rearrangement.
pub fn quasi_norm_pinfty(p: f64, x: &[f64]) -> Result<f64> {
    exponent::check_open(p, "weak-Lp index")?;
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("quasi-norm argument".into()));
    }
    let mut mags: Vec<f64> = x.iter().map(|c| c.abs()).collect();
    sort_descending(&mut mags);
    Ok(mags
        .iter()
        .enumerate()
        .map(|(k, m)| m * ((k + 1) as f64).powf(1.0 / p))
        .fold(0.0, f64::max))
}

fn lq_norm(q: f64, x: &[f64]) -> f64 {
    if q == 1.0 {
        return x.iter().map(|c| c.abs()).sum();
    }
    let peak = x.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if q.is_infinite() || peak == 0.0 {
        return peak;
    }
    if q == 2.0 {
        return peak * x.iter().map(|c| (c / peak).powi(2)).sum::<f64>().sqrt();
    }
    peak * x
        .iter()
        .map(|c| (c.abs() / peak).powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

fn sort_descending(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| b.total_cmp(a));
}

fn sign_vectors(base: &[f64]) -> Vec<Vec<f64>> {
    let n = base.len();
    (0..(1usize << n))
        .map(|mask| {
            base.iter()
                .enumerate()
                .map(|(i, b)| if mask >> i & 1 == 1 { -b } else { *b })
                .collect()
        })
        .collect()
}

fn permutations(items: &[f64]) -> Vec<Vec<f64>> {
    // Heap's algorithm.
    let mut a = items.to_vec();
    let n = a.len();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn euclidean_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match dim {
        1 => (0..count)
            .map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let offset = rng.random::<f64>() * 2.0 * PI;
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2 * k + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = 2.0 * PI * k as f64 / golden + offset;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            let bases = first_primes(dim);
            let normal = Normal::standard();
            let mut out = Vec::with_capacity(count);
            let mut index = 1u64;
            while out.len() < count {
                let v: Vec<f64> = bases
                    .iter()
                    .zip(&shift)
                    .map(|(&b, s)| {
                        let u = (radical_inverse(index, b) + s).fract();
                        normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12))
                    })
                    .collect();
                index += 1;
                let len = euclidean(&v);
                if len > 1e-12 {
                    out.push(v.into_iter().map(|c| c / len).collect());
                }
            }
            out
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn first_primes(k: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(k);
    let mut c = 2u64;
    while primes.len() < k {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn spaces_for_tests() -> Vec<NormedSpace> {
        let mut out = Vec::new();
        for n in [1, 2, 3, 5] {
            for q in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
                out.push(NormedSpace::lq(q, n).unwrap());
            }
            for p in [1.5, 2.0, 4.0] {
                out.push(NormedSpace::new(SpaceKind::LorentzWeak(p), n).unwrap());
                out.push(NormedSpace::new(SpaceKind::LorentzL1(p), n).unwrap());
            }
        }
        out
    }

    #[test]
    fn euclidean_example() {
        let s = NormedSpace::lq(2.0, 3).unwrap();
        assert!((s.norm(&[3.0, 4.0, 0.0]).unwrap() - 5.0).abs() < 1e-15);
        assert!((s.dual_norm(&[3.0, 4.0, 0.0]).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn l1_dual_is_sup() {
        let s = NormedSpace::lq(1.0, 3).unwrap();
        assert_eq!(s.dual_norm(&[1.0, -1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn lorentz_signed_indicator() {
        for pp in [1.25, 2.0, 3.0] {
            let s = NormedSpace::new(SpaceKind::LorentzL1(pp), 6).unwrap();
            let x = [1.0, 0.0, -1.0, 1.0, 0.0, -1.0];
            let expect = 4f64.powf(1.0 / pp);
            assert!((s.norm(&x).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_dual_of_basis_sum() {
        for p in [1.5, 2.0, 3.0] {
            let n = 7;
            let s = NormedSpace::new(SpaceKind::LorentzWeak(p), n).unwrap();
            let v = vec![1.0; n];
            let expect = (n as f64).powf(1.0 / conjugate(p));
            assert!((s.dual_norm(&v).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_norm_matches_subset_enumeration() {
        // Oracle: sup over nonempty subsets S of |S|^{1/p - 1} Σ_S |x_i|.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(1..=7);
            let p = 1.0 + 3.0 * rng.random::<f64>() + 0.01;
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let s = NormedSpace::new(SpaceKind::LorentzWeak(p), n).unwrap();
            let mut best = 0.0f64;
            for mask in 1usize..(1 << n) {
                let size = mask.count_ones() as f64;
                let sum: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| x[i].abs()).sum();
                best = best.max(size.powf(1.0 / p - 1.0) * sum);
            }
            assert!((s.norm(&x).unwrap() - best).abs() < 1e-12 * (1.0 + best));
        }
    }

    #[test]
    fn weak_example_with_harmonic_entries() {
        let s = NormedSpace::new(SpaceKind::LorentzWeak(2.0), 4).unwrap();
        let x: Vec<f64> = (1..=4).map(|j| (j as f64).powf(-0.5)).collect();
        // Enumerated by hand over k: k^{-1/2} Σ_{j≤k} j^{-1/2}.
        let mut expect = 0.0f64;
        let mut partial = 0.0;
        for k in 1..=4 {
            partial += (k as f64).powf(-0.5);
            expect = expect.max(partial / (k as f64).sqrt());
        }
        assert!((s.norm(&x).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn quasi_norm_examples() {
        for p in [1.5, 2.0, 3.0] {
            let x: Vec<f64> = (1..=20).map(|j| (j as f64).powf(-1.0 / p)).collect();
            assert!((quasi_norm_pinfty(p, &x).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(quasi_norm_pinfty(2.0, &[0.0; 4]).unwrap(), 0.0);
        assert_eq!(quasi_norm_pinfty(2.0, &[3.5, 0.0, 0.0]).unwrap(), 3.5);
        assert!(quasi_norm_pinfty(1.0, &[1.0]).is_err());
    }

    #[test]
    fn quasi_norm_matches_level_set_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(1..10);
            let p = 1.1 + 3.0 * rng.random::<f64>();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            // sup over t just below each |x_i| of t · #{|x| > t}^{1/p}.
            let mut best = 0.0f64;
            for &t0 in &x {
                let t = t0.abs();
                let count = x.iter().filter(|c| c.abs() >= t).count() as f64;
                best = best.max(t * count.powf(1.0 / p));
            }
            assert!((quasi_norm_pinfty(p, &x).unwrap() - best).abs() < 1e-12);
        }
    }

    #[test]
    fn quasi_norm_below_weak_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let n = rng.random_range(1..12);
            let p = 1.05 + 4.0 * rng.random::<f64>();
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let s = NormedSpace::new(SpaceKind::LorentzWeak(p), n).unwrap();
            assert!(quasi_norm_pinfty(p, &x).unwrap() <= s.norm(&x).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn norm_axioms_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in spaces_for_tests() {
            for _ in 0..(10_000 / 60) {
                let x: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-5.0..5.0)).collect();
                let y: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-5.0..5.0)).collect();
                let t = rng.random_range(-4.0..4.0);
                let nx = s.norm(&x).unwrap();
                let tx: Vec<f64> = x.iter().map(|c| t * c).collect();
                assert!((s.norm(&tx).unwrap() - t.abs() * nx).abs() <= 1e-10 * (1.0 + nx));
                let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                assert!(s.norm(&xy).unwrap() <= nx + s.norm(&y).unwrap() + 1e-10);
            }
            assert_eq!(s.norm(&vec![0.0; s.dim()]).unwrap(), 0.0);
        }
    }

    #[test]
    fn duality_pairing_bound() {
        // |<x*, x>| ≤ ||x*||_* ||x|| for every pair.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in spaces_for_tests() {
            for _ in 0..100 {
                let x: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let y: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let lhs = dot(&x, &y).abs();
                let rhs = s.norm(&x).unwrap() * s.dual_norm(&y).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-15, "{s}");
            }
        }
    }

    #[test]
    fn extreme_points_attain_dual_norm() {
        // The dual norm is the max pairing over vertices of the primal ball.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for s in spaces_for_tests() {
            let Some(ext) = s.extreme_points(EXTREME_POINT_CAP) else {
                continue;
            };
            for e in &ext {
                assert!((s.norm(e).unwrap() - 1.0).abs() < 1e-12, "{s}");
            }
            for _ in 0..50 {
                let y: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let via_ext = ext.iter().map(|e| dot(e, &y)).fold(f64::MIN, f64::max);
                assert!((via_ext - s.dual_norm(&y).unwrap()).abs() < 1e-12, "{s}");
            }
        }
    }

    #[test]
    fn bidual_has_same_parameters() {
        for s in spaces_for_tests() {
            let bd = s.dual().dual();
            assert_eq!(bd.dim(), s.dim());
            let (a, b) = (s.kind().param(), bd.kind().param());
            assert!(a == b || (a - b).abs() < 1e-12, "{s} vs {bd}");
            assert_eq!(
                std::mem::discriminant(&s.kind()),
                std::mem::discriminant(&bd.kind())
            );
        }
    }

    #[test]
    fn circle_samples_are_equiangular() {
        let s = NormedSpace::lq(2.0, 2).unwrap();
        let pts = s.sample_sphere(4, 123).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in pts.iter().zip(expect) {
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn samples_have_unit_norm_and_are_deterministic() {
        for s in spaces_for_tests() {
            let a = s.sample_sphere(37, 42).unwrap();
            let b = s.sample_sphere(37, 42).unwrap();
            assert_eq!(a, b);
            for x in &a {
                assert!((s.norm(x).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        assert!(NormedSpace::lq(2.0, 2).unwrap().sample_sphere(0, 0).is_err());
    }

    #[test]
    fn errors_on_bad_input() {
        let s = NormedSpace::lq(2.0, 3).unwrap();
        assert!(matches!(
            s.norm(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
        assert!(matches!(s.norm(&[1.0, f64::NAN, 0.0]), Err(Error::NonFinite(_))));
        assert!(NormedSpace::lq(0.5, 2).is_err());
        assert!(NormedSpace::new(SpaceKind::LorentzWeak(1.0), 2).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn parse_and_serialize_spaces() {
        let s: NormedSpace = "l1:4".parse().unwrap();
        assert_eq!(s, NormedSpace::lq(1.0, 4).unwrap());
        let s: NormedSpace = "linf:2".parse().unwrap();
        assert_eq!(s.kind(), SpaceKind::Lq(f64::INFINITY));
        let s: NormedSpace = "lorentzweak:2:4".parse().unwrap();
        assert_eq!(s.kind(), SpaceKind::LorentzWeak(2.0));
        let s: NormedSpace = "lq:3.5:5".parse().unwrap();
        assert_eq!(s.kind(), SpaceKind::Lq(3.5));
        assert!("banana:3".parse::<NormedSpace>().is_err());

        let json = serde_json::to_string(&NormedSpace::lq(f64::INFINITY, 3).unwrap()).unwrap();
        assert_eq!(json, r#"{"kind":"lq","param":"inf","dim":3}"#);
        let back: NormedSpace = serde_json::from_str(&json).unwrap();
        assert_eq!(back.kind(), SpaceKind::Lq(f64::INFINITY));
        let w: NormedSpace =
            serde_json::from_str(r#"{"kind":"lorentz_l1","param":2,"dim":3}"#).unwrap();
        assert_eq!(w.kind(), SpaceKind::LorentzL1(2.0));
        assert!(serde_json::from_str::<Vector>("[1.0, 2.0]").is_ok());
    }
}
