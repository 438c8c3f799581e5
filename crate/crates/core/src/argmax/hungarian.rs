use crate::error::{Error, Result};
use crate::structures::Vertex;

/// Permutation matrix (row-major, `n * n` bits) maximizing `sum u_ij x_ij`.
///
/// `u` is the row-major flattening of a square matrix. Shortest augmenting
/// paths with dual potentials, `O(n^3)`.
pub fn hungarian_match(u: &[f64]) -> Result<Vertex> {
    let n = (u.len() as f64).sqrt().round() as usize;
    if n * n != u.len() || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "utility of length {} is not a non-empty square matrix",
            u.len()
        )));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("utilities must be finite".into()));
    }
    let cost = |i: usize, j: usize| -u[(i - 1) * n + (j - 1)];

    // 1-based indices; column 0 is the virtual start
    let mut row_pot = vec![0.0; n + 1];
    let mut col_pot = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - row_pot[i0] - col_pot[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    row_pot[row_of[j]] += delta;
                    col_pot[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut bits = vec![0u8; n * n];
    for j in 1..=n {
        bits[(row_of[j] - 1) * n + (j - 1)] = 1;
    }
    Ok(Vertex::new(bits))
}
