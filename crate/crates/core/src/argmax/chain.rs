//! Exact MAP for correlated k-subsets: a chain of binary variables with
//! unary utilities `u[..n]`, pairwise utilities `u[n + i]` earned when
//! positions `i` and `i + 1` are both on, and exactly `k` positions on.

use crate::structures::Vertex;

/// Max-sum dynamic program over `(position, count, state)`.
///
/// Returns the optimal embedding and whether an exact tie was broken.
pub(crate) fn corr_k_subsets_map(n: usize, k: usize, u: &[f64]) -> (Vertex, bool) {
    let neg = f64::NEG_INFINITY;
    // best[i][c][s]: best prefix score ending at position i with c ones, x_i = s
    let mut best = vec![vec![[neg; 2]; k + 1]; n];
    let mut back = vec![vec![[0u8; 2]; k + 1]; n];
    let mut tie = false;
    best[0][0][0] = 0.0;
    best[0][1][1] = u[0];
    for i in 1..n {
        for c in 0..=k {
            for s in 0..2usize {
                if s > c {
                    continue;
                }
                let prev_c = c - s;
                let mut top = neg;
                let mut arg = 0u8;
                for p in 0..2usize {
                    let prev = best[i - 1][prev_c][p];
                    if prev == neg {
                        continue;
                    }
                    let gain = if s == 1 { u[i] } else { 0.0 } + if s == 1 && p == 1 { u[n + i - 1] } else { 0.0 };
                    let cand = prev + gain;
                    if cand > top {
                        top = cand;
                        arg = p as u8;
                    } else if cand == top {
                        tie = true;
                    }
                }
                best[i][c][s] = top;
                back[i][c][s] = arg;
            }
        }
    }
    let last = &best[n - 1][k];
    let mut s = if last[1] > last[0] { 1 } else { 0 };
    tie |= last[0] == last[1] && last[0] != neg;

    let mut bits = vec![0u8; 2 * n - 1];
    let mut c = k;
    for i in (0..n).rev() {
        bits[i] = s as u8;
        let prev = back[i][c][s] as usize;
        c -= s;
        s = prev;
    }
    for i in 0..n - 1 {
        bits[n + i] = bits[i] * bits[i + 1];
    }
    (Vertex::new(bits), tie)
}
