use serde::{Deserialize, Serialize};

/// Everything needed to rerun an estimate.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateMeta {
    pub seed: u64,
    /// Grid sizes in the order the method documents (e.g. `[mass, test]`).
    pub grid: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tuple_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<u64>,
}

/// An interval `[lower, upper]` for a norm; `upper` may be unknown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: Option<f64>,
    pub method: String,
    /// Caveats on the interval, e.g. that the upper end is only grid-certified.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
    pub meta: EstimateMeta,
}

pub const FLAG_HEURISTIC_UPPER: &str = "upper-heuristic";
pub const FLAG_GRID_CERTIFIED: &str = "grid-certified only at tested directions";
pub const FLAG_HEURISTIC: &str = "heuristic";

impl NormEstimate {
    pub fn exact(value: f64, method: impl Into<String>, meta: EstimateMeta) -> Self {
        NormEstimate {
            lower: value,
            upper: Some(value),
            method: method.into(),
            flags: Vec::new(),
            meta,
        }
    }

    pub fn with_flag(mut self, flag: &str) -> Self {
        if !self.flags.iter().any(|f| f == flag) {
            self.flags.push(flag.to_string());
        }
        self
    }

    /// Midpoint when both ends are known, otherwise the lower end.
    pub fn point(&self) -> f64 {
        match self.upper {
            Some(u) => 0.5 * (self.lower + u),
            None => self.lower,
        }
    }

    pub(crate) fn clamp_order(mut self) -> Self {
        if let Some(u) = self.upper {
            if u < self.lower {
                self.upper = Some(self.lower);
            }
        }
        self
    }
}
