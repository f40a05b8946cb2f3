//! Low-order spectrum of the combinatorial graph Laplacian `L = D - A`,
//! computed with cyclic Jacobi rotations on the dense symmetric matrix.
//! Adequate and fully deterministic for the few hundred states these
//! domains have.

use crate::error::{Error, Result};

/// The `m` smallest-eigenvalue pairs of the combinatorial Laplacian of an
/// undirected graph, excluding the constant eigenvector of eigenvalue 0.
///
/// Requires a connected graph and `m < n`. Eigenvectors are unit-norm,
/// mutually orthogonal, and sign-fixed so their first nonzero component is
/// positive.
pub fn laplacian_eigens(adjacency: &[Vec<usize>], m: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = adjacency.len();
    if n == 0 || !connected(adjacency) {
        return Err(Error::DisconnectedGraph);
    }
    if m >= n {
        return Err(Error::TooManyEigenpairs {
            m,
            available: n - 1,
        });
    }
    let mut lap = vec![vec![0.0f64; n]; n];
    for (u, nbrs) in adjacency.iter().enumerate() {
        for &v in nbrs {
            if v == u {
                continue;
            }
            lap[u][v] -= 1.0;
            lap[u][u] += 1.0;
        }
    }
    let (eigenvalues, vectors) = jacobi_eigen(lap);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
    // The graph is connected, so exactly one eigenvalue is (numerically)
    // zero; skip it and take the next m.
    let mut out = Vec::with_capacity(m);
    for &idx in order.iter().skip(1).take(m) {
        let mut v: Vec<f64> = (0..n).map(|i| vectors[i][idx]).collect();
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-9) {
            if *first < 0.0 {
                for x in &mut v {
                    *x = -*x;
                }
            }
        }
        out.push((eigenvalues[idx], v));
    }
    Ok(out)
}

fn connected(adjacency: &[Vec<usize>]) -> bool {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues and the matrix whose columns are the eigenvectors.
#[allow(clippy::needless_range_loop)] // paired-column rotations
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    for _sweep in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off.sqrt() < 1e-13 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[i][p];
                    let viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a[i][i]).collect();
    (eigenvalues, v)
}
