//! Finite-dimensional growth estimates: the exponent `α(p, q)` bounding the
//! formal identity `FBL^(q)[E] → FBL^(p)[E]`, the distance witness between
//! `FBL^(∞)[ℓ_1^n]` and `FBL[ℓ_1^n]`, and the harmonic-sum construction on
//! `ℓ_{p∞}^n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duals::{self, AtomCombination, DEFAULT_PARTITION_CAP};
use crate::error::{Error, Result};
use crate::exponent;
use crate::fblnorm::{self, DEFAULT_LP_GRID, DEFAULT_TUPLE_CAP};
use crate::fvl::{self, LatticeExpr};
use crate::solver::AscentConfig;
use crate::spaces::{quasi_norm_pinfty, NormedSpace, SpaceKind, Vector};

/// `α(p, q)`, with its defining case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    #[serde(with = "crate::exponent::serde_exp")]
    pub p: f64,
    #[serde(with = "crate::exponent::serde_exp")]
    pub q: f64,
    pub alpha: f64,
    /// `"p>=q"`, `"p<=min(2,q)"` or `"2<p<q"`.
    pub case: String,
}

/// Exponent of `n` in the norm of `id : FBL^(q)[E] → FBL^(p)[E]`:
/// `0` if `p ≥ q`, `1/p − 1/q` if `p ≤ min{2, q}`, `p(1/p − 1/q)/2` if
/// `2 < p < q`.
pub fn alpha(p: f64, q: f64) -> Result<f64> {
    Ok(exponent_table(p, q)?.alpha)
}

pub fn exponent_table(p: f64, q: f64) -> Result<ExponentTable> {
    exponent::check_closed(p, "p")?;
    exponent::check_closed(q, "q")?;
    let (alpha, case) = if p >= q {
        (0.0, "p>=q")
    } else if p <= 2.0 {
        (1.0 / p - 1.0 / q, "p<=min(2,q)")
    } else {
        (p * (1.0 / p - 1.0 / q) / 2.0, "2<p<q")
    };
    Ok(ExponentTable {
        p,
        q,
        alpha,
        case: case.into(),
    })
}

/// `H_n = Σ_{j ≤ n} 1/j`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|j| 1.0 / j as f64).sum()
}

/// The vectors `x_k = (β_ik)_i` with `β_ik = ((i + k − 1) mod n)^{−1/p}`,
/// residues taken in `{1, …, n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzWitness {
    pub n: usize,
    pub p: f64,
    /// `beta[i][k]`, zero-based.
    pub beta: Vec<Vec<f64>>,
    pub harmonic: f64,
}

impl LorentzWitness {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        exponent::check_open(p, "p")?;
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        // With one-based i, k the residue of i + k − 1 is ((i0 + k0) mod n) + 1.
        let beta = (0..n)
            .map(|i| (0..n).map(|k| (((i + k) % n + 1) as f64).powf(-1.0 / p)).collect())
            .collect();
        Ok(LorentzWitness {
            n,
            p,
            beta,
            harmonic: harmonic(n),
        })
    }

    /// The vector `x_k` (zero-based `k`).
    pub fn vector(&self, k: usize) -> Vector {
        Vector::new(self.beta.iter().map(|row| row[k]).collect()).expect("finite entries")
    }

    /// `Σ_k β_ik^p` for each `i`.
    pub fn row_power_sums(&self) -> Vec<f64> {
        self.beta
            .iter()
            .map(|row| {
                let mut terms: Vec<f64> = row.iter().map(|b| b.powf(self.p)).collect();
                terms.sort_by(f64::total_cmp);
                terms.iter().sum()
            })
            .collect()
    }

    /// The space `ℓ_{p∞}^n` carrying the vectors.
    pub fn space(&self) -> NormedSpace {
        NormedSpace::new(SpaceKind::LorentzWeak(self.p), self.n).expect("validated in new")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Remark67Report {
    pub n: usize,
    /// Norm of `Σ_i ê_i*` in `FBL[ℓ_1^n]*`.
    pub a: f64,
    /// Norm of `Σ_i ê_i*` in `FBL^(∞)[ℓ_1^n]*`.
    pub b: f64,
    /// `b / a`, a lower bound for the lattice distance.
    pub ratio: f64,
}

/// Dual norms of the canonical basis sum over `E = ℓ_1^n` at `p = 1` and
/// `p = ∞`; expected `(1, n, n)`.
pub fn remark_6_7(n: usize) -> Result<Remark67Report> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let c = AtomCombination::canonical_basis(NormedSpace::lq(1.0, n)?);
    let config = AscentConfig::default();
    let a = duals::atom_norm_fbl_p(&c, 1.0, &config, 1)?.lower;
    let b = duals::atom_norm_fbl_p(&c, f64::INFINITY, &config, 1)?.lower;
    Ok(Remark67Report { n, a, b, ratio: b / a })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Remark68Report {
    pub n: usize,
    pub p: f64,
    pub harmonic: f64,
    /// Largest `|quasi_norm_pinfty(x_k) − 1|` over `k`.
    pub quasi_norm_error: f64,
    /// Largest `|Σ_k β_ik^p − H_n|` over `i`.
    pub row_sum_error: f64,
    /// `P = <Σ_i ê_i*, (Σ_k |δ_{x_k}|^p)^{1/p}> = n·H_n^{1/p}`.
    pub pairing: f64,
    /// Partition lower bound `D` for the dual norm of `Σ_i ê_i*` in
    /// `FBL^{↑p}[ℓ_{p∞}^n]*`, expected `n^{1/p'}`.
    pub dual_bound: f64,
    pub dual_heuristic: bool,
    /// `R = P / (D·n^{1/p})`, equal to `H_n^{1/p}`.
    pub growth: f64,
}

/// Builds the witness on `ℓ_{p∞}^n` and evaluates the growth factor
/// `R(n) = H_n^{1/p}`. Constants `K_p` and the equivalence constant of the
/// weak-`L_p` quasi-norm stay symbolic.
pub fn remark_6_8(n: usize, p: f64) -> Result<Remark68Report> {
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let w = LorentzWitness::new(n, p)?;
    let space = w.space();
    let mut quasi_norm_error = 0.0f64;
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let x = w.vector(k);
        quasi_norm_error = quasi_norm_error.max((quasi_norm_pinfty(p, &x)? - 1.0).abs());
        vectors.push(x);
    }
    let row_sum_error = w
        .row_power_sums()
        .iter()
        .map(|s| (s - w.harmonic).abs())
        .fold(0.0, f64::max);
    let f = LatticeExpr::psum_of_deltas(space, p, &vectors)?;
    let basis = AtomCombination::canonical_basis(space);
    let pairing = duals::pair(&basis, &f)?;
    let part = duals::atom_norm_upper_p_bound(&basis, p, DEFAULT_PARTITION_CAP)?;
    let growth = pairing / (part.value * (n as f64).powf(1.0 / p));
    Ok(Remark68Report {
        n,
        p,
        harmonic: w.harmonic,
        quasi_norm_error,
        row_sum_error,
        pairing,
        dual_bound: part.value,
        dual_heuristic: part.heuristic,
        growth,
    })
}

/// One CSV row: `n, p, q, value, bound, ratio`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub n: usize,
    #[serde(with = "crate::exponent::serde_exp")]
    pub p: f64,
    #[serde(with = "crate::exponent::serde_exp")]
    pub q: f64,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

pub const CSV_HEADER: &str = "n,p,q,value,bound,ratio";

impl CsvRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            exponent::format(self.p),
            exponent::format(self.q),
            self.value,
            self.bound,
            self.ratio
        )
    }
}

/// Growth of `R(n) = H_n^{1/p}` against `(ln n)^{1/p}`. In the rows `q` is
/// unused (`inf`), `value = R(n)`, `bound = (ln n)^{1/p}` and `ratio` their
/// quotient.
pub fn cor_6_5_trend(p: f64, n_list: &[usize]) -> Result<Vec<CsvRow>> {
    exponent::check_open(p, "p")?;
    n_list
        .par_iter()
        .map(|&n| {
            let r = remark_6_8(n, p)?;
            let log_term = (n as f64).ln().powf(1.0 / p);
            Ok(CsvRow {
                n,
                p,
                q: f64::INFINITY,
                value: r.growth,
                bound: log_term,
                ratio: r.growth / log_term,
            })
        })
        .collect()
}

/// Settings for [`check_id_ratio`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdRatioConfig {
    pub trials: usize,
    pub seed: u64,
    /// Relative slack granted to the estimators.
    pub slack: f64,
    pub grid_mass: usize,
    pub grid_test: usize,
    pub tuple_cap: usize,
    pub ascent: AscentConfig,
}

impl Default for IdRatioConfig {
    fn default() -> Self {
        IdRatioConfig {
            trials: 20,
            seed: 0,
            slack: 0.05,
            grid_mass: DEFAULT_LP_GRID,
            grid_test: DEFAULT_LP_GRID,
            tuple_cap: DEFAULT_TUPLE_CAP,
            ascent: AscentConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdRatioReport {
    pub space: NormedSpace,
    #[serde(with = "crate::exponent::serde_exp")]
    pub p: f64,
    #[serde(with = "crate::exponent::serde_exp")]
    pub q: f64,
    pub alpha: f64,
    /// `n^α`.
    pub bound: f64,
    pub max_ratio: f64,
    pub violations: usize,
    /// One row per expression: `value` is the `FBL^(p)` lower estimate,
    /// `bound` the `FBL^(q)` upper estimate, `ratio` their quotient.
    pub rows: Vec<CsvRow>,
}

/// Compares `‖f‖_{FBL^(p)}` (lower estimate) with `n^α ‖f‖_{FBL^(q)}`
/// (upper estimate) on random lattice expressions of depth at most 3 over at
/// most 4 generators. Row `i` uses the seed `config.seed + i`.
pub fn check_id_ratio(space: NormedSpace, p: f64, q: f64, config: &IdRatioConfig) -> Result<IdRatioReport> {
    let a = alpha(p, q)?;
    let n = space.dim();
    let bound = (n as f64).powf(a);
    let rows: Vec<CsvRow> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = fvl::random_expr(&space, &mut rng, 3, 4);
            let ascent = AscentConfig {
                seed,
                ..config.ascent.clone()
            };
            let lower = fblnorm::fbl_p_lower(&f, p, config.tuple_cap, &ascent)?.lower;
            let upper = if q.is_infinite() {
                let est = fvl::sup_norm_on_dual_ball(&f, fvl::default_sup_grid(n), seed)?;
                est.upper.unwrap_or(est.lower)
            } else {
                fblnorm::fbl_p_upper_lp(&f, q, config.grid_mass, config.grid_test, seed)?
                    .upper
                    .expect("the program reports an upper end")
            };
            let ratio = if upper > 0.0 { lower / upper } else { 0.0 };
            Ok(CsvRow {
                n,
                p,
                q,
                value: lower,
                bound: upper,
                ratio,
            })
        })
        .collect::<Result<_>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let violations = rows
        .iter()
        .filter(|r| r.ratio > bound * (1.0 + config.slack))
        .count();
    Ok(IdRatioReport {
        space,
        p,
        q,
        alpha: a,
        bound,
        max_ratio,
        violations,
        rows,
    })
}
