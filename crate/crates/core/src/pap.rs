//! Positive finite-rank approximation on `C(S(E*))`.
//!
//! A pointed partition of unity `α = (x_i*, f_i)` gives the positive operator
//! `P_α f = Σ_i f(x_i*) f_i`. For a norm controlled by an equicontinuous
//! family with modulus `ω` and constant `c` (`c‖·‖ ≤ ‖·‖_∞ ≤ ‖·‖`), its norm
//! is at most `1 + ω(diam α) / c`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent;
use crate::fblnorm::{self, DEFAULT_TUPLE_CAP};
use crate::fvl::{DualFunction, LatticeExpr};
use crate::solver::AscentConfig;
use crate::spaces::{dot, euclidean, NormedSpace, Vector};

/// Which convenient norm a controlling family describes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilyKind {
    /// `FBL^(p)`: the functions `(Σ λ_i |δ_{e_i}|^p)^{1/p}`, `e_i ∈ S(E)`,
    /// `λ` a probability vector; the constant `1` when `p = ∞`.
    FblP {
        #[serde(with = "crate::exponent::serde_exp")]
        p: f64,
    },
    /// The norm equivalent to `FBL^{↑p}` up to `K_p`: convex combinations of
    /// `∨_i |δ_{e_i}|` with `Σ ‖e_i‖^p ≤ 1`.
    UpperP {
        #[serde(with = "crate::exponent::serde_exp")]
        p: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllingFamilySpec {
    pub kind: FamilyKind,
    pub dim: usize,
}

impl ControllingFamilySpec {
    pub fn new(kind: FamilyKind, dim: usize) -> Result<Self> {
        match kind {
            FamilyKind::FblP { p } => exponent::check_closed(p, "p")?,
            FamilyKind::UpperP { p } => exponent::check_open(p, "p")?,
        }
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(ControllingFamilySpec { kind, dim })
    }

    pub fn fbl_p(p: f64, dim: usize) -> Result<Self> {
        Self::new(FamilyKind::FblP { p }, dim)
    }

    pub fn upper_p(p: f64, dim: usize) -> Result<Self> {
        Self::new(FamilyKind::UpperP { p }, dim)
    }

    /// Lower equivalence constant with the uniform norm: `‖f‖ ≤ dim·‖f‖_∞`.
    pub fn c(&self) -> f64 {
        1.0 / self.dim as f64
    }

    /// Modulus of equicontinuity of the family at distance `s`.
    pub fn modulus(&self, s: f64) -> f64 {
        modulus(self, s)
    }

    /// A random member of the family over `space`.
    pub fn sample_member<R: Rng>(&self, space: &NormedSpace, rng: &mut R) -> Result<FamilyMember> {
        if space.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: space.dim(),
            });
        }
        let unit = |rng: &mut R| loop {
            let mut v: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            if space.normalize(&mut v) > 1e-3 {
                break v;
            }
        };
        match self.kind {
            FamilyKind::FblP { p } if p.is_infinite() => Ok(FamilyMember::Unit(*space)),
            FamilyKind::FblP { p } => {
                let k = rng.random_range(1..=4);
                let lambda = simplex_point(rng, k);
                let gens: Vec<Vector> = lambda
                    .iter()
                    .map(|l| Vector::new(unit(rng)).map(|e| e.scaled(l.powf(1.0 / p))))
                    .collect::<Result<_>>()?;
                Ok(FamilyMember::Lattice(LatticeExpr::psum_of_deltas(*space, p, &gens)?))
            }
            FamilyKind::UpperP { p } => {
                let terms = rng.random_range(1..=3);
                let weights = simplex_point(rng, terms);
                let mut parts = Vec::with_capacity(terms);
                for t in weights {
                    let k = rng.random_range(1..=4);
                    let radii = simplex_point(rng, k);
                    let gens: Vec<Vector> = radii
                        .iter()
                        .map(|r| Vector::new(unit(rng)).map(|e| e.scaled(r.powf(1.0 / p))))
                        .collect::<Result<_>>()?;
                    let g = LatticeExpr::psum_of_deltas(*space, f64::INFINITY, &gens)?;
                    parts.push(g.scale(t)?);
                }
                Ok(FamilyMember::Lattice(LatticeExpr::sum(parts)?))
            }
        }
    }
}

/// `p^{1/p} s^{1/p}` for `FBL^(p)` with `p < ∞`, `0` for `p = ∞`, and `s`
/// for the upper-p family.
pub fn modulus(spec: &ControllingFamilySpec, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    match spec.kind {
        FamilyKind::FblP { p } if p.is_infinite() => 0.0,
        FamilyKind::FblP { p } => (p * s).powf(1.0 / p),
        FamilyKind::UpperP { .. } => s,
    }
}

fn simplex_point<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// A member of a controlling family.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyMember {
    Lattice(LatticeExpr),
    /// The constant `1` on `S(E*)`, i.e. the dual norm.
    Unit(NormedSpace),
}

impl DualFunction for FamilyMember {
    fn space(&self) -> &NormedSpace {
        match self {
            FamilyMember::Lattice(f) => f.space(),
            FamilyMember::Unit(s) => s,
        }
    }

    fn value(&self, xstar: &[f64]) -> f64 {
        match self {
            FamilyMember::Lattice(f) => f.value(xstar),
            FamilyMember::Unit(s) => s.dual().norm_raw(xstar),
        }
    }
}

#[derive(Clone, Debug)]
enum Layout {
    /// Trapezoidal hats in the angle of `x*`, centred at `2πi/K`.
    Circle,
    /// Normalized cone hats of angular radius `radius` around Euclidean
    /// directions `dirs`.
    Sphere { dirs: Vec<Vec<f64>>, radius: f64 },
}

/// A pointed partition of unity on the dual sphere.
#[derive(Clone, Debug)]
pub struct PointedPartition {
    space: NormedSpace,
    overlap: f64,
    peaks: Vec<Vector>,
    diam: f64,
    layout: Layout,
}

impl PointedPartition {
    /// Builds `sectors` hats on `S(E*)`.
    ///
    /// In dimension 2 the hats are trapezoids in angle: equal to one on the
    /// middle `1 − overlap` of each sector and linear across a band of
    /// relative width `overlap` around each boundary. With `overlap = 0`
    /// they are indicators of half-open sectors. In dimension 3
    /// the peaks form a Fibonacci lattice and the partition property is
    /// checked on a grid.
    pub fn build(space: NormedSpace, sectors: usize, overlap: f64) -> Result<Self> {
        if sectors < 3 {
            return Err(Error::invalid("a pointed partition needs at least 3 sectors"));
        }
        if !(0.0..1.0).contains(&overlap) {
            return Err(Error::invalid(format!("overlap must lie in [0, 1), got {overlap}")));
        }
        let dual = space.dual();
        match space.dim() {
            2 => {
                let peaks = dual.sample_sphere(sectors, 0)?;
                let half = PI / sectors as f64 * (1.0 + overlap);
                let mut diam = 0.0f64;
                for i in 0..sectors {
                    let centre = 2.0 * PI * i as f64 / sectors as f64;
                    diam = diam.max(arc_diameter(&dual, centre - half, centre + half));
                }
                Ok(PointedPartition {
                    space,
                    overlap,
                    peaks,
                    diam,
                    layout: Layout::Circle,
                })
            }
            3 => {
                let dirs: Vec<Vec<f64>> = NormedSpace::lq(2.0, 3)?
                    .sample_sphere(sectors, 0)?
                    .into_iter()
                    .map(Vector::into_inner)
                    .collect();
                let mut separation = f64::INFINITY;
                for i in 0..dirs.len() {
                    for j in 0..i {
                        separation = separation.min(angle(&dirs[i], &dirs[j]));
                    }
                }
                let check = NormedSpace::lq(2.0, 3)?.sample_sphere(20 * sectors + 2000, 7)?;
                let covering = check
                    .iter()
                    .map(|x| dirs.iter().map(|d| angle(x, d)).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max);
                // Hats must vanish at the other peaks, so the radius never
                // exceeds the separation.
                let radius = (covering * (1.0 + overlap) * 1.05).min(separation * (1.0 - 1e-9));
                let peaks = dirs
                    .iter()
                    .map(|d| {
                        let mut x = d.clone();
                        dual.normalize(&mut x);
                        Vector::new(x)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let diam = dirs
                    .iter()
                    .map(|d| cap_diameter(&dual, d, radius))
                    .fold(0.0, f64::max);
                Ok(PointedPartition {
                    space,
                    overlap,
                    peaks,
                    diam,
                    layout: Layout::Sphere { dirs, radius },
                })
            }
            d => Err(Error::invalid(format!(
                "pointed partitions are built in dimensions 2 and 3, not {d}"
            ))),
        }
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    /// The peak points `x_i*` on the dual sphere.
    pub fn peaks(&self) -> &[Vector] {
        &self.peaks
    }

    /// Largest diameter of a hat support, measured in the dual norm.
    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Nonzero hat values `(i, f_i(x*))` at a nonzero `x*`; the hats depend
    /// only on the direction of `x*`.
    pub fn hats(&self, xstar: &[f64]) -> Vec<(usize, f64)> {
        let k = self.peaks.len();
        match &self.layout {
            Layout::Circle => {
                let width = 2.0 * PI / k as f64;
                let theta = xstar[1].atan2(xstar[0]).rem_euclid(2.0 * PI);
                let nearest = (theta / width).round() as i64;
                if self.overlap == 0.0 {
                    return vec![(nearest.rem_euclid(k as i64) as usize, 1.0)];
                }
                let mut out = Vec::with_capacity(2);
                for i in [nearest - 1, nearest, nearest + 1] {
                    let d = (theta - i as f64 * width).abs();
                    let v = trapezoid(d / width, self.overlap);
                    if v > 0.0 {
                        out.push((i.rem_euclid(k as i64) as usize, v));
                    }
                }
                out
            }
            Layout::Sphere { dirs, radius } => {
                let mut out: Vec<(usize, f64)> = dirs
                    .iter()
                    .enumerate()
                    .filter_map(|(i, d)| {
                        let w = 1.0 - angle(xstar, d) / radius;
                        (w > 0.0).then_some((i, w))
                    })
                    .collect();
                let total: f64 = out.iter().map(|(_, w)| w).sum();
                if total > 0.0 {
                    out.iter_mut().for_each(|(_, w)| *w /= total);
                    out
                } else {
                    // Off-grid holes in the cover fall back to the nearest peak.
                    let i = (0..k)
                        .min_by(|&a, &b| angle(xstar, &dirs[a]).total_cmp(&angle(xstar, &dirs[b])))
                        .unwrap_or(0);
                    vec![(i, 1.0)]
                }
            }
        }
    }

    /// `f_i(x*)`.
    pub fn hat(&self, i: usize, xstar: &[f64]) -> f64 {
        self.hats(xstar)
            .into_iter()
            .find(|(j, _)| *j == i)
            .map_or(0.0, |(_, v)| v)
    }

    /// `max |Σ_i f_i − 1|` over a dual-sphere grid of `grid` points.
    pub fn unity_residual(&self, grid: usize) -> Result<f64> {
        let pts = self.space.dual().sample_sphere(grid, 1)?;
        Ok(pts
            .iter()
            .map(|x| (self.hats(x).iter().map(|(_, v)| v).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max))
    }
}

/// Hat profile at relative distance `t` (in sector widths) from the centre,
/// for `overlap > 0`.
fn trapezoid(t: f64, overlap: f64) -> f64 {
    ((0.5 * (1.0 + overlap) - t) / overlap).clamp(0.0, 1.0)
}

fn angle(x: &[f64], d: &[f64]) -> f64 {
    let c = dot(x, d) / (euclidean(x) * euclidean(d));
    c.clamp(-1.0, 1.0).acos()
}

fn on_dual_sphere(dual: &NormedSpace, theta: f64) -> [f64; 2] {
    let mut u = [theta.cos(), theta.sin()];
    dual.normalize(&mut u);
    u
}

fn max_pairwise(dual: &NormedSpace, pts: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in 0..i {
            let diff: Vec<f64> = pts[i].iter().zip(&pts[j]).map(|(a, b)| a - b).collect();
            best = best.max(dual.norm_raw(&diff));
        }
    }
    best
}

/// Diameter of the arc of `S(E*)` between two angles, in the dual norm.
fn arc_diameter(dual: &NormedSpace, from: f64, to: f64) -> f64 {
    const SAMPLES: usize = 48;
    let pts: Vec<Vec<f64>> = (0..=SAMPLES)
        .map(|k| on_dual_sphere(dual, from + (to - from) * k as f64 / SAMPLES as f64).to_vec())
        .collect();
    max_pairwise(dual, &pts)
}

/// Diameter of the spherical cap of angular radius `radius` around the unit
/// direction `d`, carried to `S(E*)`.
fn cap_diameter(dual: &NormedSpace, d: &[f64], radius: f64) -> f64 {
    // Orthonormal frame (d, a, b).
    let seed = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let proj = dot(&seed, d);
    let mut a: Vec<f64> = seed.iter().zip(d).map(|(s, c)| s - proj * c).collect();
    let na = euclidean(&a);
    a.iter_mut().for_each(|c| *c /= na);
    let b = [
        d[1] * a[2] - d[2] * a[1],
        d[2] * a[0] - d[0] * a[2],
        d[0] * a[1] - d[1] * a[0],
    ];
    let mut pts = vec![];
    for ring in [0.5, 1.0] {
        let r = ring * radius;
        for k in 0..24 {
            let phi = 2.0 * PI * k as f64 / 24.0;
            let mut x: Vec<f64> = (0..3)
                .map(|i| r.cos() * d[i] + r.sin() * (phi.cos() * a[i] + phi.sin() * b[i]))
                .collect();
            dual.normalize(&mut x);
            pts.push(x);
        }
    }
    let mut centre = d.to_vec();
    dual.normalize(&mut centre);
    pts.push(centre);
    max_pairwise(dual, &pts)
}

/// The finite-rank image `P_α f = Σ_i f(x_i*) f_i`, extended positively
/// homogeneously off the sphere.
pub struct FiniteRankImage<'a> {
    alpha: &'a PointedPartition,
    coeffs: Vec<f64>,
}

impl FiniteRankImage<'_> {
    /// The values `f(x_i*)` at the peaks.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }
}

impl DualFunction for FiniteRankImage<'_> {
    fn space(&self) -> &NormedSpace {
        &self.alpha.space
    }

    fn value(&self, xstar: &[f64]) -> f64 {
        let r = self.alpha.space.dual().norm_raw(xstar);
        if r == 0.0 {
            return 0.0;
        }
        r * self
            .alpha
            .hats(xstar)
            .into_iter()
            .map(|(i, v)| self.coeffs[i] * v)
            .sum::<f64>()
    }
}

/// `P_α f`.
pub fn apply_p<'a, F: DualFunction + ?Sized>(alpha: &'a PointedPartition, f: &F) -> Result<FiniteRankImage<'a>> {
    if f.space() != alpha.space() {
        return Err(Error::SpaceMismatch);
    }
    let coeffs: Vec<f64> = alpha.peaks.iter().map(|x| f.value(x)).collect();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("function at the partition peaks".into()));
    }
    Ok(FiniteRankImage { alpha, coeffs })
}

/// `max |g − h|` over a dual-sphere grid.
pub fn sup_distance<F, G>(g: &F, h: &G, grid: usize) -> Result<f64>
where
    F: DualFunction + ?Sized,
    G: DualFunction + ?Sized,
{
    let pts = g.space().dual().sample_sphere(grid, 1)?;
    Ok(pts
        .iter()
        .map(|x| (g.value(x) - h.value(x)).abs())
        .fold(0.0, f64::max))
}

/// Outcome of [`verify_pap_bound`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PapReport {
    pub sectors: usize,
    pub diam: f64,
    pub omega: f64,
    /// `1 + ω(diam α) / c`.
    pub bound: f64,
    /// Lower estimate of `‖P_α f‖`.
    pub measured: f64,
    /// The same estimator applied to `f`.
    pub reference: f64,
    /// `|measured − reference|`, the visible effect of replacing `f` by `P_α f`.
    pub excess: f64,
    /// `measured / bound`.
    pub ratio: f64,
    /// `max |P_α f − f|` on the verification grid.
    pub sup_deviation: f64,
}

/// Grid used for uniform-distance checks.
pub const VERIFY_GRID: usize = 2880;

/// Measures `‖P_α f‖` in `FBL^(p)[E]` and compares it with the bound
/// `1 + ω(diam α)/c` of the given controlling family. The caller normalizes
/// `f` to norm at most one.
pub fn verify_pap_bound<F: DualFunction + ?Sized>(
    alpha: &PointedPartition,
    spec: &ControllingFamilySpec,
    f: &F,
    p: f64,
    config: &AscentConfig,
) -> Result<PapReport> {
    exponent::check_closed(p, "p")?;
    if spec.dim != alpha.space().dim() {
        return Err(Error::DimensionMismatch {
            expected: alpha.space().dim(),
            found: spec.dim,
        });
    }
    let image = apply_p(alpha, f)?;
    let measured = fblnorm::fbl_p_lower(&image, p, DEFAULT_TUPLE_CAP, config)?.lower;
    let reference = fblnorm::fbl_p_lower(f, p, DEFAULT_TUPLE_CAP, config)?.lower;
    let diam = alpha.diam();
    let omega = spec.modulus(diam);
    let bound = 1.0 + omega / spec.c();
    Ok(PapReport {
        sectors: alpha.len(),
        diam,
        omega,
        bound,
        measured,
        reference,
        excess: (measured - reference).abs(),
        ratio: measured / bound,
        sup_deviation: sup_distance(&image, f, VERIFY_GRID)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fvl::SphereFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modulus_closed_forms() {
        let s = 0.04;
        assert!((ControllingFamilySpec::fbl_p(1.0, 2).unwrap().modulus(s) - 0.04).abs() < 1e-15);
        let two = ControllingFamilySpec::fbl_p(2.0, 2).unwrap();
        assert!((two.modulus(s) - (2.0f64 * s).sqrt()).abs() < 1e-15);
        assert_eq!(ControllingFamilySpec::upper_p(3.0, 2).unwrap().modulus(s), s);
        assert_eq!(ControllingFamilySpec::fbl_p(f64::INFINITY, 2).unwrap().modulus(s), 0.0);
        assert_eq!(two.modulus(0.0), 0.0);
        assert_eq!(two.c(), 0.5);
        assert!(ControllingFamilySpec::upper_p(1.0, 2).is_err());
    }

    #[test]
    fn partition_of_unity_and_peaks() {
        for space in ["l2:2", "l1:2", "linf:2", "lorentzweak:3:2"] {
            let space: NormedSpace = space.parse().unwrap();
            for overlap in [0.0, 0.3, 0.9] {
                for k in [3, 4, 7, 16] {
                    let a = PointedPartition::build(space, k, overlap).unwrap();
                    assert!(a.unity_residual(4000).unwrap() < 1e-12);
                    for (i, x) in a.peaks().iter().enumerate() {
                        assert!((a.hat(i, x) - 1.0).abs() < 1e-12);
                        assert!((space.dual_norm(x).unwrap() - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn indicator_hats_without_overlap() {
        let a = PointedPartition::build(NormedSpace::lq(2.0, 2).unwrap(), 4, 0.0).unwrap();
        let x = [0.3f64.cos(), 0.3f64.sin()];
        assert_eq!(a.hats(&x), vec![(0, 1.0)]);
    }

    #[test]
    fn diam_halves_when_sectors_double() {
        let space = NormedSpace::lq(2.0, 2).unwrap();
        let d8 = PointedPartition::build(space, 8, 0.5).unwrap().diam();
        let d16 = PointedPartition::build(space, 16, 0.5).unwrap().diam();
        // Chord of an arc of angle θ is 2 sin(θ/2).
        let exact = 2.0 * (PI / 8.0 * 1.5 / 2.0 * 2.0).sin();
        assert!((d8 - exact).abs() < 1e-12, "{d8} vs {exact}");
        assert!((d8 / d16 - 2.0).abs() < 0.2);
    }

    #[test]
    fn three_dimensional_partition() {
        let space = NormedSpace::lq(1.0, 3).unwrap();
        let a = PointedPartition::build(space, 40, 0.3).unwrap();
        assert!(a.unity_residual(3000).unwrap() < 1e-12);
        for (i, x) in a.peaks().iter().enumerate() {
            assert!((a.hat(i, x) - 1.0).abs() < 1e-12);
        }
        assert!(a.diam() > 0.0 && a.diam() < 2.0);
        assert!(PointedPartition::build(NormedSpace::lq(2.0, 4).unwrap(), 8, 0.0).is_err());
    }

    #[test]
    fn bad_partitions() {
        let space = NormedSpace::lq(2.0, 2).unwrap();
        assert!(PointedPartition::build(space, 2, 0.0).is_err());
        assert!(PointedPartition::build(space, 8, 1.0).is_err());
    }

    #[test]
    fn operator_properties() {
        let space = NormedSpace::lq(2.0, 2).unwrap();
        let a = PointedPartition::build(space, 12, 0.5).unwrap();
        let one = SphereFunction::new(space, |_| 1.0);
        let img = apply_p(&a, &one).unwrap();
        assert!(sup_distance(&img, &one, 1000).unwrap() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = crate::fvl::random_expr(&space, &mut rng, 3, 4);
        let img = apply_p(&a, &f).unwrap();
        let pts = space.dual().sample_sphere(1000, 0).unwrap();
        let sup_f = pts.iter().map(|x| f.value(x).abs()).fold(0.0, f64::max);
        let sup_img = pts.iter().map(|x| img.value(x).abs()).fold(0.0, f64::max);
        assert!(sup_img <= sup_f * (1.0 + 1e-9) + 1e-12);

        let pos = f.clone().abs();
        let img = apply_p(&a, &pos).unwrap();
        assert!(pts.iter().all(|x| img.value(x) >= -1e-12));
    }

    #[test]
    fn members_respect_the_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for space in ["l2:2", "l1:3", "lorentzweak:2:2"] {
            let space: NormedSpace = space.parse().unwrap();
            let dual = space.dual();
            for spec in [
                ControllingFamilySpec::fbl_p(1.0, space.dim()).unwrap(),
                ControllingFamilySpec::fbl_p(2.5, space.dim()).unwrap(),
                ControllingFamilySpec::fbl_p(f64::INFINITY, space.dim()).unwrap(),
                ControllingFamilySpec::upper_p(2.0, space.dim()).unwrap(),
            ] {
                for _ in 0..20 {
                    let g = spec.sample_member(&space, &mut rng).unwrap();
                    for _ in 0..50 {
                        let mut x: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
                        let mut y: Vec<f64> = x.iter().map(|c| c + rng.random_range(-0.2..0.2)).collect();
                        dual.normalize(&mut x);
                        dual.normalize(&mut y);
                        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
                        let s = dual.norm_raw(&d);
                        let gap = (g.value(&x) - g.value(&y)).abs();
                        assert!(gap <= spec.modulus(s) * (1.0 + 1e-9) + 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn constant_is_reproduced_exactly() {
        let space = NormedSpace::lq(2.0, 2).unwrap();
        let a = PointedPartition::build(space, 16, 0.5).unwrap();
        let spec = ControllingFamilySpec::fbl_p(f64::INFINITY, 2).unwrap();
        let one = SphereFunction::new(space, |_| 1.0);
        let r = verify_pap_bound(&a, &spec, &one, f64::INFINITY, &AscentConfig::default()).unwrap();
        assert!((r.measured - 1.0).abs() < 1e-12);
        assert!((r.reference - 1.0).abs() < 1e-12);
        assert_eq!(r.bound, 1.0);
    }
}
