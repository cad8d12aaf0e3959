//! Transportation simplex on the bipartite transportation polytope.
//!
//! Deterministic pivoting: the entering cell is the lowest-index cell with
//! negative reduced cost (Bland's rule) and the leaving arc is the
//! lowest-index cell among the tie set, which rules out cycling.

use crate::error::{Error, Result};

const REDUCED_COST_TOL: f64 = 1e-11;

/// Solve min sum_ij flow_ij cost_ij subject to row sums = supply and
/// column sums = demand. Returns the dense flow matrix.
pub fn solve_transportation(
    cost: &[f64],
    supply: &[f64],
    demand: &[f64],
) -> Result<Vec<f64>> {
    let n = supply.len();
    let m = demand.len();
    assert_eq!(cost.len(), n * m);

    let mut flow = vec![0.0f64; n * m];
    let mut basic = vec![false; n * m];

    // northwest-corner initial basis: exactly n + m - 1 basic cells,
    // inserting degenerate zeros when supply and demand exhaust together
    {
        let mut s: Vec<f64> = supply.to_vec();
        let mut d: Vec<f64> = demand.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let q = s[i].min(d[j]);
            flow[i * m + j] = q;
            basic[i * m + j] = true;
            s[i] -= q;
            d[j] -= q;
            if i == n - 1 && j == m - 1 {
                break;
            }
            if j == m - 1 || (s[i] <= d[j] && i < n - 1) {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let max_pivots = 50 * (n + m) * (n + m) + 1000;
    for _pivot in 0..max_pivots {
        // potentials from the basis tree: u[i] + v[j] = c[i][j] on basics
        let mut u = vec![f64::NAN; n];
        let mut v = vec![f64::NAN; m];
        u[0] = 0.0;
        let mut queue = vec![0usize]; // node ids: rows 0..n, cols n..n+m
        while let Some(node) = queue.pop() {
            if node < n {
                let i = node;
                for j in 0..m {
                    if basic[i * m + j] && v[j].is_nan() {
                        v[j] = cost[i * m + j] - u[i];
                        queue.push(n + j);
                    }
                }
            } else {
                let j = node - n;
                for i in 0..n {
                    if basic[i * m + j] && u[i].is_nan() {
                        u[i] = cost[i * m + j] - v[j];
                        queue.push(i);
                    }
                }
            }
        }

        // entering cell: Bland's rule
        let mut entering = None;
        'scan: for i in 0..n {
            for j in 0..m {
                if basic[i * m + j] {
                    continue;
                }
                if cost[i * m + j] - u[i] - v[j] < -REDUCED_COST_TOL {
                    entering = Some((i, j));
                    break 'scan;
                }
            }
        }
        let (ei, ej) = match entering {
            Some(c) => c,
            None => return Ok(flow),
        };

        // unique tree path from row ei to col ej through basic cells
        let path = tree_path(&basic, n, m, ei, ej).ok_or_else(|| {
            Error::Config("transportation basis lost connectivity".into())
        })?;
        // cycle: entering (+), then path cells alternate (-, +, -, ...)
        let minus_cells: Vec<(usize, usize)> = path
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(_, &c)| c)
            .collect();
        let theta = minus_cells
            .iter()
            .map(|&(i, j)| flow[i * m + j])
            .fold(f64::INFINITY, f64::min);
        let (li, lj) = minus_cells
            .iter()
            .cloned()
            .filter(|&(i, j)| flow[i * m + j] <= theta + 1e-15)
            .min_by_key(|&(i, j)| i * m + j)
            .expect("cycle has at least one '-' cell");

        flow[ei * m + ej] = theta;
        basic[ei * m + ej] = true;
        for (k, &(i, j)) in path.iter().enumerate() {
            if k % 2 == 0 {
                flow[i * m + j] -= theta;
            } else {
                flow[i * m + j] += theta;
            }
        }
        flow[li * m + lj] = 0.0;
        basic[li * m + lj] = false;
    }
    Err(Error::Config("transportation simplex exceeded pivot budget".into()))
}

/// Alternating path of basic cells from row `si` to col `tj` in the basis
/// tree; returned as the list of cells traversed, starting with the basic
/// cell leaving row `si`.
fn tree_path(basic: &[bool], n: usize, m: usize, si: usize, tj: usize) -> Option<Vec<(usize, usize)>> {
    // BFS over the bipartite tree; nodes: rows 0..n, cols n..n+m
    let total = n + m;
    let start = si;
    let goal = n + tj;
    let mut prev = vec![usize::MAX; total];
    let mut seen = vec![false; total];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    while let Some(node) = queue.pop_front() {
        if node == goal {
            break;
        }
        if node < n {
            let i = node;
            for j in 0..m {
                if basic[i * m + j] && !seen[n + j] {
                    seen[n + j] = true;
                    prev[n + j] = node;
                    queue.push_back(n + j);
                }
            }
        } else {
            let j = node - n;
            for i in 0..n {
                if basic[i * m + j] && !seen[i] {
                    seen[i] = true;
                    prev[i] = node;
                    queue.push_back(i);
                }
            }
        }
    }
    if !seen[goal] {
        return None;
    }
    // walk back from goal to start collecting edges, then reverse
    let mut cells_rev = Vec::new();
    let mut node = goal;
    while node != start {
        let p = prev[node];
        let (i, j) = if node < n { (node, p - n) } else { (p, node - n) };
        cells_rev.push((i, j));
        node = p;
    }
    cells_rev.reverse();
    Some(cells_rev)
}
