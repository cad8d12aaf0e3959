//! Discrete Wasserstein-1 distances between empirical manifold-valued
//! distributions with geodesic ground cost.

mod hungarian;
mod simplex;
mod sinkhorn;

pub use sinkhorn::SinkhornOutcome;

use crate::error::{Error, Result};
use crate::geometry::{self, GeometryTag, ManifoldPoint, TangentBasis};
use crate::imaging::ManifoldImage;

const WEIGHT_SUM_TOL: f64 = 1e-12;
const MARGINAL_TOL: f64 = 1e-9;

/// Empirical distribution: weighted support on one geometry.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub tag: GeometryTag,
    pub items: Vec<ManifoldPoint>,
    pub weights: Vec<f64>,
}

impl SampleSet {
    pub fn new(items: Vec<ManifoldPoint>, weights: Vec<f64>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Config("empty sample set".into()));
        }
        if items.len() != weights.len() {
            return Err(Error::DimensionMismatch("items vs weights".into()));
        }
        let tag = items[0].tag();
        for p in &items {
            if p.tag() != tag {
                return Err(Error::TagMismatch {
                    expected: tag,
                    got: p.tag(),
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Config(format!(
                "weights must be nonnegative and sum to 1 (sum = {sum})"
            )));
        }
        Ok(SampleSet { tag, items, weights })
    }

    pub fn uniform(items: Vec<ManifoldPoint>) -> Result<Self> {
        let n = items.len();
        if n == 0 {
            return Err(Error::Config("empty sample set".into()));
        }
        let w = 1.0 / n as f64;
        SampleSet::new(items, vec![w; n])
    }

    /// Flatten an image's pixels into a uniform sample set.
    pub fn from_image(img: &ManifoldImage) -> Result<Self> {
        SampleSet::uniform(img.pixels.clone())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Coupling matrix with its marginal targets and transport cost.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub matrix: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub row_marginals: Vec<f64>,
    pub col_marginals: Vec<f64>,
    pub cost: f64,
}

impl TransportPlan {
    /// Largest violation of the prescribed marginals.
    pub fn marginal_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            let sum: f64 = (0..self.cols).map(|j| self.matrix[i * self.cols + j]).sum();
            worst = worst.max((sum - self.row_marginals[i]).abs());
        }
        for j in 0..self.cols {
            let sum: f64 = (0..self.rows).map(|i| self.matrix[i * self.cols + j]).sum();
            worst = worst.max((sum - self.col_marginals[j]).abs());
        }
        worst
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.matrix.iter().any(|v| *v < -1e-15) {
            return Err(Error::Config("negative coupling entry".into()));
        }
        let v = self.marginal_violation();
        if v > tol {
            return Err(Error::Config(format!("marginal violation {v} > {tol}")));
        }
        Ok(())
    }
}

/// Ground cost used for the coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    /// Geodesic distance d(x, y) (base point of the log taken at the
    /// second argument, so the cost is a true metric).
    Geodesic,
    /// || log_a(x) - log_a(y) || in the tangent space at a fixed anchor;
    /// an anchor-dependent pseudo-metric kept for comparison because the
    /// training objective operates in a fixed-anchor tangent space.
    Anchored,
}

/// Pairwise geodesic cost matrix: entry (i, j) = d(a_i, b_j).
pub fn cost_matrix(a: &SampleSet, b: &SampleSet) -> Result<Vec<f64>> {
    if a.tag != b.tag {
        return Err(Error::TagMismatch {
            expected: a.tag,
            got: b.tag,
        });
    }
    let m = b.len();
    let mut out = vec![0.0; a.len() * m];
    for (i, x) in a.items.iter().enumerate() {
        for (j, y) in b.items.iter().enumerate() {
            out[i * m + j] = geometry::distance(x, y)?;
        }
    }
    Ok(out)
}

/// Pairwise cost in the tangent space at `anchor`.
pub fn cost_matrix_anchored(
    a: &SampleSet,
    b: &SampleSet,
    anchor: &ManifoldPoint,
) -> Result<Vec<f64>> {
    if a.tag != b.tag {
        return Err(Error::TagMismatch {
            expected: a.tag,
            got: b.tag,
        });
    }
    let basis = TangentBasis::new(anchor)?;
    let coords = |set: &SampleSet| -> Result<Vec<Vec<f64>>> {
        set.items
            .iter()
            .map(|p| basis.ambient_to_basis(&geometry::log(anchor, p)?))
            .collect()
    };
    let ca = coords(a)?;
    let cb = coords(b)?;
    let m = b.len();
    let mut out = vec![0.0; a.len() * m];
    for (i, x) in ca.iter().enumerate() {
        for (j, y) in cb.iter().enumerate() {
            out[i * m + j] = x
                .iter()
                .zip(y)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
        }
    }
    Ok(out)
}

/// Exact Wasserstein-1: assignment fast path for uniform equal-size sets,
/// transportation simplex otherwise.
pub fn solve_w1_exact(cost: &[f64], wa: &[f64], wb: &[f64]) -> Result<TransportPlan> {
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("cost matrix".into()));
    }
    let n = wa.len();
    let m = wb.len();
    let (sa, sb): (f64, f64) = (wa.iter().sum(), wb.iter().sum());
    if (sa - sb).abs() > MARGINAL_TOL {
        return Err(Error::InfeasibleWeights {
            source_sum: sa,
            target_sum: sb,
        });
    }
    let uniform = {
        let w = 1.0 / n as f64;
        n == m
            && wa.iter().all(|x| (x - w).abs() <= WEIGHT_SUM_TOL)
            && wb.iter().all(|x| (x - w).abs() <= WEIGHT_SUM_TOL)
    };
    let matrix = if uniform {
        let assignment = hungarian::solve_assignment(cost, n);
        let w = 1.0 / n as f64;
        let mut mat = vec![0.0; n * m];
        for (i, j) in assignment.into_iter().enumerate() {
            mat[i * m + j] = w;
        }
        mat
    } else {
        simplex::solve_transportation(cost, wa, wb)?
    };
    let value: f64 = matrix.iter().zip(cost).map(|(g, c)| g * c).sum();
    Ok(TransportPlan {
        matrix,
        rows: n,
        cols: m,
        row_marginals: wa.to_vec(),
        col_marginals: wb.to_vec(),
        cost: value,
    })
}

/// Entropic approximation; non-convergence is reported in the outcome,
/// never silent.
pub fn solve_w1_sinkhorn(
    cost: &[f64],
    wa: &[f64],
    wb: &[f64],
    epsilon: f64,
    max_iter: usize,
) -> Result<(TransportPlan, SinkhornOutcome)> {
    if epsilon <= 0.0 {
        return Err(Error::Config(format!("epsilon {epsilon} must be > 0")));
    }
    let (sa, sb): (f64, f64) = (wa.iter().sum(), wb.iter().sum());
    if (sa - sb).abs() > MARGINAL_TOL {
        return Err(Error::InfeasibleWeights {
            source_sum: sa,
            target_sum: sb,
        });
    }
    let outcome = sinkhorn::solve_sinkhorn(cost, wa, wb, epsilon, max_iter);
    let plan = TransportPlan {
        matrix: outcome.plan.clone(),
        rows: wa.len(),
        cols: wb.len(),
        row_marginals: wa.to_vec(),
        col_marginals: wb.to_vec(),
        cost: outcome.value,
    };
    Ok((plan, outcome))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum W1Method {
    Exact,
    Sinkhorn { epsilon: f64, max_iter: usize },
    /// Exact when n*m <= 250_000, Sinkhorn at epsilon = 0.01 * mean cost above.
    Auto,
}

/// Wasserstein-1 between two sample sets under the geodesic ground cost.
pub fn w1(a: &SampleSet, b: &SampleSet, method: W1Method) -> Result<f64> {
    w1_with_cost(a, b, method, CostKind::Geodesic, None)
}

pub fn w1_with_cost(
    a: &SampleSet,
    b: &SampleSet,
    method: W1Method,
    cost_kind: CostKind,
    anchor: Option<&ManifoldPoint>,
) -> Result<f64> {
    let cost = match cost_kind {
        CostKind::Geodesic => cost_matrix(a, b)?,
        CostKind::Anchored => {
            let anchor = anchor
                .ok_or_else(|| Error::Config("anchored cost needs an anchor".into()))?;
            cost_matrix_anchored(a, b, anchor)?
        }
    };
    match method {
        W1Method::Exact => Ok(solve_w1_exact(&cost, &a.weights, &b.weights)?.cost),
        W1Method::Sinkhorn { epsilon, max_iter } => {
            let (_, outcome) = solve_w1_sinkhorn(&cost, &a.weights, &b.weights, epsilon, max_iter)?;
            Ok(outcome.value)
        }
        W1Method::Auto => {
            if a.len() * b.len() <= 250_000 {
                Ok(solve_w1_exact(&cost, &a.weights, &b.weights)?.cost)
            } else {
                let mean = cost.iter().sum::<f64>() / cost.len() as f64;
                let eps = (0.01 * mean).max(1e-9);
                let (_, outcome) =
                    solve_w1_sinkhorn(&cost, &a.weights, &b.weights, eps, 10_000)?;
                Ok(outcome.value)
            }
        }
    }
}
