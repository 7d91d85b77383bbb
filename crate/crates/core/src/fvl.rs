//! Free-vector-lattice elements as expression trees.
//!
//! An expression is built from generators `δ_e : x* ↦ <x*, e>` with linear
//! and lattice operations, and is evaluated pointwise on `E*` as a positively
//! homogeneous function.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{EstimateMeta, NormEstimate, FLAG_HEURISTIC_UPPER};
use crate::exponent;
use crate::solver::{self, AscentConfig};
use crate::spaces::{dot, NormedSpace, Vector};

/// A positively homogeneous function on the dual of a finite-dimensional space.
pub trait DualFunction: Sync {
    /// The space `E` whose dual is the evaluation domain.
    fn space(&self) -> &NormedSpace;

    /// Value at `xstar`; a non-finite result signals a failed evaluation.
    fn value(&self, xstar: &[f64]) -> f64;
}

/// Expression node. Serialized as `{"op": ..., ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Node {
    Delta {
        e: Vector,
    },
    Scale {
        c: f64,
        arg: Box<Node>,
    },
    Sum {
        args: Vec<Node>,
    },
    Abs {
        arg: Box<Node>,
    },
    Max {
        args: Vec<Node>,
    },
    Min {
        args: Vec<Node>,
    },
    /// `(Σ |child|^p)^{1/p}`, or `max |child|` when `p = ∞`.
    Psum {
        #[serde(with = "crate::exponent::serde_exp")]
        p: f64,
        args: Vec<Node>,
    },
}

impl Node {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Node::Delta { e } => dot(x, e),
            Node::Scale { c, arg } => c * arg.eval(x),
            Node::Sum { args } => args.iter().map(|a| a.eval(x)).sum(),
            Node::Abs { arg } => arg.eval(x).abs(),
            Node::Max { args } => args
                .iter()
                .map(|a| a.eval(x))
                .fold(f64::NEG_INFINITY, f64::max),
            Node::Min { args } => args.iter().map(|a| a.eval(x)).fold(f64::INFINITY, f64::min),
            Node::Psum { p, args } => {
                if p.is_infinite() {
                    args.iter().map(|a| a.eval(x).abs()).fold(0.0, f64::max)
                } else {
                    let vals: Vec<f64> = args.iter().map(|a| a.eval(x).abs()).collect();
                    let peak = vals.iter().fold(0.0f64, |m, v| m.max(*v));
                    if peak == 0.0 || !peak.is_finite() {
                        return peak;
                    }
                    peak * vals
                        .iter()
                        .map(|v| (v / peak).powf(*p))
                        .sum::<f64>()
                        .powf(1.0 / p)
                }
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Node::Delta { e } => {
                if e.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: e.dim(),
                    });
                }
                Ok(())
            }
            Node::Scale { c, arg } => {
                if !c.is_finite() {
                    return Err(Error::NonFinite("scale coefficient".into()));
                }
                arg.validate(dim)
            }
            Node::Abs { arg } => arg.validate(dim),
            Node::Sum { args } => args.iter().try_for_each(|a| a.validate(dim)),
            Node::Max { args } | Node::Min { args } => {
                if args.is_empty() {
                    return Err(Error::invalid("max/min need at least one argument"));
                }
                args.iter().try_for_each(|a| a.validate(dim))
            }
            Node::Psum { p, args } => {
                exponent::check_closed(*p, "psum exponent")?;
                if args.is_empty() {
                    return Err(Error::invalid("psum needs at least one argument"));
                }
                args.iter().try_for_each(|a| a.validate(dim))
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Node::Delta { .. } => 0,
            Node::Scale { arg, .. } | Node::Abs { arg } => arg.size(),
            Node::Sum { args }
            | Node::Max { args }
            | Node::Min { args }
            | Node::Psum { args, .. } => args.iter().map(Node::size).sum(),
        }
    }
}

/// An element of the free vector lattice over `space`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeExpr {
    space: NormedSpace,
    node: Node,
}

impl LatticeExpr {
    /// Wraps a parsed tree after checking it against `space`.
    pub fn from_node(space: NormedSpace, node: Node) -> Result<Self> {
        node.validate(space.dim())?;
        Ok(LatticeExpr { space, node })
    }

    pub fn from_json(space: NormedSpace, json: &str) -> Result<Self> {
        let node: Node = serde_json::from_str(json)
            .map_err(|e| Error::invalid(format!("malformed expression JSON: {e}")))?;
        LatticeExpr::from_node(space, node)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.node).expect("expression trees always serialize")
    }

    pub fn delta(space: NormedSpace, e: Vector) -> Result<Self> {
        LatticeExpr::from_node(space, Node::Delta { e })
    }

    /// The zero element (an empty sum).
    pub fn zero(space: NormedSpace) -> Self {
        LatticeExpr {
            space,
            node: Node::Sum { args: Vec::new() },
        }
    }

    pub fn scale(self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite("scale coefficient".into()));
        }
        Ok(LatticeExpr {
            space: self.space,
            node: Node::Scale {
                c,
                arg: Box::new(self.node),
            },
        })
    }

    pub fn neg(self) -> Self {
        let space = self.space;
        LatticeExpr {
            space,
            node: Node::Scale {
                c: -1.0,
                arg: Box::new(self.node),
            },
        }
    }

    pub fn abs(self) -> Self {
        LatticeExpr {
            space: self.space,
            node: Node::Abs {
                arg: Box::new(self.node),
            },
        }
    }

    pub fn sum(items: Vec<LatticeExpr>) -> Result<Self> {
        let (space, args) = LatticeExpr::unzip(items, false)?;
        Ok(LatticeExpr {
            space,
            node: Node::Sum { args },
        })
    }

    pub fn max(items: Vec<LatticeExpr>) -> Result<Self> {
        let (space, args) = LatticeExpr::unzip(items, true)?;
        Ok(LatticeExpr {
            space,
            node: Node::Max { args },
        })
    }

    pub fn min(items: Vec<LatticeExpr>) -> Result<Self> {
        let (space, args) = LatticeExpr::unzip(items, true)?;
        Ok(LatticeExpr {
            space,
            node: Node::Min { args },
        })
    }

    pub fn psum(p: f64, items: Vec<LatticeExpr>) -> Result<Self> {
        exponent::check_closed(p, "psum exponent")?;
        let (space, args) = LatticeExpr::unzip(items, true)?;
        Ok(LatticeExpr {
            space,
            node: Node::Psum { p, args },
        })
    }

    /// `(Σ_i |δ_{e_i}|^p)^{1/p}` over the given generators.
    pub fn psum_of_deltas(space: NormedSpace, p: f64, gens: &[Vector]) -> Result<Self> {
        let items = gens
            .iter()
            .map(|e| LatticeExpr::delta(space, e.clone()))
            .collect::<Result<Vec<_>>>()?;
        LatticeExpr::psum(p, items)
    }

    fn unzip(items: Vec<LatticeExpr>, nonempty: bool) -> Result<(NormedSpace, Vec<Node>)> {
        let Some(first) = items.first() else {
            return Err(Error::invalid("cannot combine an empty list of expressions"));
        };
        let space = first.space;
        if items.iter().any(|i| i.space != space) {
            return Err(Error::SpaceMismatch);
        }
        if nonempty && items.is_empty() {
            return Err(Error::invalid("operation needs at least one argument"));
        }
        Ok((space, items.into_iter().map(|i| i.node).collect()))
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn evaluate(&self, xstar: &[f64]) -> Result<f64> {
        if xstar.len() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: xstar.len(),
            });
        }
        if xstar.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("evaluation point".into()));
        }
        let v = self.node.eval(xstar);
        if !v.is_finite() {
            return Err(Error::NonFinite("expression value".into()));
        }
        Ok(v)
    }
}

impl DualFunction for LatticeExpr {
    fn space(&self) -> &NormedSpace {
        &self.space
    }

    fn value(&self, xstar: &[f64]) -> f64 {
        self.node.eval(xstar)
    }
}

/// A function given on the unit sphere of `E*`, extended positively homogeneously.
pub struct SphereFunction<F> {
    space: NormedSpace,
    on_sphere: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> SphereFunction<F> {
    pub fn new(space: NormedSpace, on_sphere: F) -> Self {
        SphereFunction { space, on_sphere }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> DualFunction for SphereFunction<F> {
    fn space(&self) -> &NormedSpace {
        &self.space
    }

    fn value(&self, xstar: &[f64]) -> f64 {
        let r = self.space.dual().norm_raw(xstar);
        if r == 0.0 {
            return 0.0;
        }
        let unit: Vec<f64> = xstar.iter().map(|c| c / r).collect();
        r * (self.on_sphere)(&unit)
    }
}

/// Default dual-sphere grid for sup-norm estimates.
pub fn default_sup_grid(dim: usize) -> usize {
    match dim {
        1 => 2,
        2 => 720,
        3 => 2000,
        _ => 4000,
    }
}

/// Non-rigorous relative slack between a refined grid maximum and the true
/// supremum, from the angular spacing of a `grid`-point sphere sample.
pub fn grid_slack(dim: usize, grid: usize) -> f64 {
    if dim <= 1 {
        return 0.0;
    }
    let spacing = if dim == 2 {
        2.0 * std::f64::consts::PI / grid as f64
    } else {
        let area = 2.0 * std::f64::consts::PI.powf(dim as f64 / 2.0)
            / statrs::function::gamma::gamma(dim as f64 / 2.0);
        (area / grid as f64).powf(1.0 / (dim as f64 - 1.0))
    };
    1.0 / (0.5 * spacing).min(1.2).cos() - 1.0
}

/// Estimate of `sup |f|` over the unit sphere of `E*`.
///
/// The lower end is attained at a sampled point after local refinement, so it
/// is a valid lower bound; the upper end adds [`grid_slack`] and is flagged
/// heuristic.
pub fn sup_norm_on_dual_ball<F: DualFunction + ?Sized>(
    f: &F,
    grid: usize,
    seed: u64,
) -> Result<NormEstimate> {
    if grid < 8 && f.space().dim() > 1 {
        return Err(Error::invalid("sup-norm grid must have at least 8 points"));
    }
    let (value, _) = sup_with_argmax(f, grid, seed)?;
    let dim = f.space().dim();
    let slack = grid_slack(dim, grid);
    let meta = EstimateMeta {
        seed,
        grid: vec![grid],
        ..Default::default()
    };
    let mut est = NormEstimate {
        lower: value,
        upper: Some(value * (1.0 + slack)),
        method: "sup-dual-sphere".into(),
        flags: Vec::new(),
        meta,
    };
    if slack > 0.0 {
        est = est.with_flag(FLAG_HEURISTIC_UPPER);
    }
    Ok(est)
}

/// Refined maximum of `|f|` on the dual sphere and the point attaining it.
pub(crate) fn sup_with_argmax<F: DualFunction + ?Sized>(
    f: &F,
    grid: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    let space = *f.space();
    let dual = space.dual();
    let pts = dual.sample_sphere(grid.max(2), seed)?;
    let vals: Vec<f64> = pts.iter().map(|x| f.value(x).abs()).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("function on the dual sphere".into()));
    }
    let order = peak_order(&vals, space.dim() == 2);
    let mut best = (0.0, pts[0].to_vec());
    for (i, v) in vals.iter().enumerate() {
        if *v > best.0 {
            best = (*v, pts[i].to_vec());
        }
    }
    if best.0 == 0.0 {
        return Ok(best);
    }
    match space.dim() {
        1 => {}
        2 => {
            let h = 2.0 * std::f64::consts::PI / pts.len() as f64;
            for &i in order.iter().take(3) {
                let theta = pts[i][1].atan2(pts[i][0]);
                let g = |t: f64| {
                    let mut u = [t.cos(), t.sin()];
                    dual.normalize(&mut u);
                    f.value(&u).abs()
                };
                let (t, v) = solver::golden_max(&g, theta - h, theta + h, 1e-13);
                if v > best.0 {
                    let mut u = vec![t.cos(), t.sin()];
                    dual.normalize(&mut u);
                    best = (v, u);
                }
            }
        }
        _ => {
            let init: Vec<Vec<f64>> = order.iter().take(3).map(|&i| pts[i].to_vec()).collect();
            let config = AscentConfig {
                starts: 1,
                max_iters: 150,
                ..AscentConfig::default()
            };
            let res = solver::maximize_ratio_from(
                |x: &[f64]| f.value(x).abs(),
                |x: &[f64]| dual.norm_raw(x),
                space.dim(),
                &config,
                &init,
            )?;
            if res.value > best.0 {
                let mut u = res.argmax;
                dual.normalize(&mut u);
                best = (res.value, u);
            }
        }
    }
    Ok(best)
}

/// Indices of grid values sorted by decreasing value, local maxima first when
/// the grid is a closed circle.
pub(crate) fn peak_order(vals: &[f64], circular: bool) -> Vec<usize> {
    let n = vals.len();
    let mut idx: Vec<usize> = (0..n).collect();
    if circular && n >= 3 {
        idx.retain(|&i| {
            let prev = vals[(i + n - 1) % n];
            let next = vals[(i + 1) % n];
            vals[i] >= prev && vals[i] >= next
        });
    }
    idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    idx
}

/// A random element of the free vector lattice: a tree of depth at most
/// `max_depth` over at most `max_generators` generators drawn from the unit
/// ball, with scale coefficients in `[-1, 1]`.
pub fn random_expr<R: Rng>(
    space: &NormedSpace,
    rng: &mut R,
    max_depth: usize,
    max_generators: usize,
) -> LatticeExpr {
    let count = rng.random_range(1..=max_generators.max(1));
    let gens: Vec<Vector> = (0..count)
        .map(|_| loop {
            let mut v: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nrm = space.norm_raw(&v);
            if nrm > 1e-3 {
                let radius = rng.random_range(0.25..1.0);
                v.iter_mut().for_each(|c| *c *= radius / nrm);
                break Vector::new(v).expect("finite by construction");
            }
        })
        .collect();
    let node = random_node(rng, &gens, max_depth, true);
    LatticeExpr {
        space: *space,
        node,
    }
}

fn random_node<R: Rng>(rng: &mut R, gens: &[Vector], depth: usize, root: bool) -> Node {
    if depth == 0 || (!root && rng.random::<f64>() < 0.3) {
        let e = gens[rng.random_range(0..gens.len())].clone();
        return Node::Delta { e };
    }
    let children = |rng: &mut R| -> Vec<Node> {
        let k = rng.random_range(2..=3);
        (0..k).map(|_| random_node(rng, gens, depth - 1, false)).collect()
    };
    match rng.random_range(0..6) {
        0 => Node::Scale {
            c: rng.random_range(-1.0..1.0),
            arg: Box::new(random_node(rng, gens, depth - 1, false)),
        },
        1 => Node::Sum {
            args: children(rng),
        },
        2 => Node::Abs {
            arg: Box::new(random_node(rng, gens, depth - 1, false)),
        },
        3 => Node::Max {
            args: children(rng),
        },
        4 => Node::Min {
            args: children(rng),
        },
        _ => {
            let p = [1.0, 2.0, f64::INFINITY][rng.random_range(0..3)];
            Node::Psum {
                p,
                args: children(rng),
            }
        }
    }
}
