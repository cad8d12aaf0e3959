//! Entropic-regularized optimal transport, iterated in the log domain for
//! stability at small regularization.

#[derive(Debug, Clone)]
pub struct SinkhornOutcome {
    pub plan: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub marginal_violation: f64,
    pub converged: bool,
}

const MARGINAL_TOL: f64 = 1e-6;

fn logsumexp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Sinkhorn iterations on potentials f, g with coupling
/// gamma_ij = a_i b_j exp((f_i + g_j - C_ij) / eps).
pub fn solve_sinkhorn(
    cost: &[f64],
    a: &[f64],
    b: &[f64],
    epsilon: f64,
    max_iter: usize,
) -> SinkhornOutcome {
    let n = a.len();
    let m = b.len();
    let log_a: Vec<f64> = a.iter().map(|x| x.max(1e-300).ln()).collect();
    let log_b: Vec<f64> = b.iter().map(|x| x.max(1e-300).ln()).collect();
    let mut f = vec![0.0f64; n];
    let mut g = vec![0.0f64; m];

    let mut iterations = 0;
    let mut violation = f64::INFINITY;
    for it in 0..max_iter {
        for i in 0..n {
            let lse = logsumexp((0..m).map(|j| log_b[j] + (g[j] - cost[i * m + j]) / epsilon));
            f[i] = -epsilon * lse;
        }
        for j in 0..m {
            let lse = logsumexp((0..n).map(|i| log_a[i] + (f[i] - cost[i * m + j]) / epsilon));
            g[j] = -epsilon * lse;
        }
        iterations = it + 1;
        // after the g update the column marginals hold by construction;
        // the residual lives in the rows
        violation = 0.0;
        for i in 0..n {
            let row: f64 = (0..m)
                .map(|j| (log_a[i] + log_b[j] + (f[i] + g[j] - cost[i * m + j]) / epsilon).exp())
                .sum();
            violation = violation.max((row - a[i]).abs());
        }
        if violation < MARGINAL_TOL {
            break;
        }
    }

    let mut plan = vec![0.0f64; n * m];
    let mut value = 0.0;
    for i in 0..n {
        for j in 0..m {
            let p = (log_a[i] + log_b[j] + (f[i] + g[j] - cost[i * m + j]) / epsilon).exp();
            plan[i * m + j] = p;
            value += p * cost[i * m + j];
        }
    }
    SinkhornOutcome {
        plan,
        value,
        iterations,
        marginal_violation: violation,
        converged: violation < MARGINAL_TOL,
    }
}
