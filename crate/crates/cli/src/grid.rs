use anyhow::{bail, Context, Result};
use hl_core::bounds::uniform_grid;

/// An α value with the text it was given as, so that the arbitrary precision
/// path sees the same decimal that is printed.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub text: String,
    pub value: f64,
}

impl GridPoint {
    pub fn from_f64(value: f64) -> Self {
        GridPoint { text: value.to_string(), value }
    }
}

/// `"0.1,0.5,1"`, `"uniform:N"` (the points `k/(N+1)`), or `""` for no points.
pub fn parse_grid(spec: &str) -> Result<Vec<GridPoint>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(n) = spec.strip_prefix("uniform:") {
        let n: usize = n.trim().parse().with_context(|| format!("bad grid size in {spec:?}"))?;
        return Ok(uniform_grid(n).into_iter().map(GridPoint::from_f64).collect());
    }
    spec.split(',')
        .map(|s| {
            let s = s.trim();
            let value: f64 = s.parse().with_context(|| format!("bad grid value {s:?}"))?;
            if !value.is_finite() {
                bail!("grid value {s:?} is not finite");
            }
            Ok(GridPoint { text: s.to_string(), value })
        })
        .collect()
}
