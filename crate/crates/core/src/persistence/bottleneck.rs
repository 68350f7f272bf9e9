//! Exact bottleneck distance between persistence diagrams.
//!
//! The distance is the smallest `t` such that a perfect matching exists
//! between the diagrams augmented with diagonal projections, where points
//! may pair if their L-infinity distance is at most `t` and a point may
//! retire to the diagonal at half its persistence. Since the optimum is
//! always one of finitely many candidate values (pairwise distances and
//! diagonal costs), a binary search over the sorted candidates with a
//! Hopcroft-Karp feasibility test is exact.

use super::PersistenceDiagram;
use crate::error::{Error, Result};

pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::parameter(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let pa = a.pairs();
    let pb = b.pairs();
    if pa.is_empty() && pb.is_empty() {
        return Ok(0.0);
    }

    let diag = |&(b, d): &(f64, f64)| (d - b) / 2.0;
    let dist = |&(b1, d1): &(f64, f64), &(b2, d2): &(f64, f64)| {
        (b1 - b2).abs().max((d1 - d2).abs())
    };

    let mut candidates: Vec<f64> = Vec::with_capacity(pa.len() * pb.len() + pa.len() + pb.len());
    candidates.push(0.0);
    candidates.extend(pa.iter().map(diag));
    candidates.extend(pb.iter().map(diag));
    for x in pa {
        for y in pb {
            candidates.push(dist(x, y));
        }
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
    candidates.dedup();

    // Smallest candidate admitting a perfect matching.
    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    debug_assert!(feasible(pa, pb, candidates[hi]));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(pa, pb, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Is there a perfect matching at threshold `t`?
///
/// Left side: points of `a` then `|b|` diagonal slots; right side: points of
/// `b` then `|a|` diagonal slots. Diagonal slots absorb unmatched points and
/// match each other freely.
fn feasible(pa: &[(f64, f64)], pb: &[(f64, f64)], t: f64) -> bool {
    let n = pa.len();
    let m = pb.len();
    let left = n + m;
    let right = m + n;

    let diag = |&(b, d): &(f64, f64)| (d - b) / 2.0;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); left];
    for (i, x) in pa.iter().enumerate() {
        for (j, y) in pb.iter().enumerate() {
            if (x.0 - y.0).abs().max((x.1 - y.1).abs()) <= t {
                adj[i].push(j as u32);
            }
        }
        if diag(x) <= t {
            // a_i may retire to its own diagonal slot.
            adj[i].push((m + i) as u32);
        }
    }
    for (j, y) in pb.iter().enumerate() {
        // Diagonal slot j on the left may take b_j or any diagonal slot.
        if diag(y) <= t {
            adj[n + j].push(j as u32);
        }
        for i in 0..n {
            adj[n + j].push((m + i) as u32);
        }
    }

    hopcroft_karp(&adj, left, right) == left
}

fn hopcroft_karp(adj: &[Vec<u32>], left: usize, right: usize) -> usize {
    const NIL: u32 = u32::MAX;
    let mut match_l = vec![NIL; left];
    let mut match_r = vec![NIL; right];
    let mut dist = vec![0u32; left];
    let mut matching = 0usize;

    loop {
        // BFS layering from free left vertices.
        let mut queue = std::collections::VecDeque::new();
        for u in 0..left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u as u32);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found_augmenting = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u as usize] {
                let w = match_r[v as usize];
                if w == NIL {
                    found_augmenting = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found_augmenting {
            break;
        }

        fn dfs(
            u: u32,
            adj: &[Vec<u32>],
            match_l: &mut [u32],
            match_r: &mut [u32],
            dist: &mut [u32],
        ) -> bool {
            const NIL: u32 = u32::MAX;
            for idx in 0..adj[u as usize].len() {
                let v = adj[u as usize][idx];
                let w = match_r[v as usize];
                if w == NIL
                    || (dist[w as usize] == dist[u as usize] + 1
                        && dfs(w, adj, match_l, match_r, dist))
                {
                    match_l[u as usize] = v;
                    match_r[v as usize] = u;
                    return true;
                }
            }
            dist[u as usize] = u32::MAX;
            false
        }

        for u in 0..left {
            if match_l[u] == NIL && dfs(u as u32, adj, &mut match_l, &mut match_r, &mut dist) {
                matching += 1;
            }
        }
    }
    matching
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(pairs: &[(f64, f64)]) -> PersistenceDiagram {
        let gm = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
        PersistenceDiagram::new(0, pairs.to_vec(), gm).unwrap()
    }

    #[test]
    fn identity_is_zero() {
        let d = pd(&[(0.0, 2.0), (1.0, 3.5), (0.2, 0.9)]);
        assert_eq!(bottleneck_distance(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn single_point_to_empty_is_half_persistence() {
        let d = pd(&[(0.0, 2.0)]);
        let e = PersistenceDiagram::empty(0, 0.0);
        assert_eq!(bottleneck_distance(&d, &e).unwrap(), 1.0);
        assert_eq!(bottleneck_distance(&e, &d).unwrap(), 1.0);
    }

    #[test]
    fn shifted_birth_hand_case() {
        // Matching the points costs 0.5; sending both to the diagonal costs
        // max(1.0, 0.75) = 1.0.
        let d = pd(&[(0.0, 2.0)]);
        let e = pd(&[(0.5, 2.0)]);
        assert_eq!(bottleneck_distance(&d, &e).unwrap(), 0.5);
    }

    #[test]
    fn prefers_diagonal_when_cheaper() {
        // Far-apart low-persistence points: retiring both beats matching.
        let d = pd(&[(0.0, 0.2)]);
        let e = pd(&[(10.0, 10.2)]);
        let got = bottleneck_distance(&d, &e).unwrap();
        assert!((got - 0.1).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let d = pd(&[(0.0, 1.0)]);
        let e = PersistenceDiagram::new(1, vec![(0.0, 1.0)], 1.0).unwrap();
        assert!(bottleneck_distance(&d, &e).is_err());
    }

    #[test]
    fn symmetric_and_triangleish_on_small_sets() {
        let d1 = pd(&[(0.0, 1.0), (0.5, 3.0)]);
        let d2 = pd(&[(0.1, 1.2), (0.4, 2.8), (2.0, 2.1)]);
        let d3 = pd(&[(0.0, 0.8)]);
        let ab = bottleneck_distance(&d1, &d2).unwrap();
        let ba = bottleneck_distance(&d2, &d1).unwrap();
        assert_eq!(ab, ba);
        let ac = bottleneck_distance(&d1, &d3).unwrap();
        let bc = bottleneck_distance(&d2, &d3).unwrap();
        assert!(ac <= ab + bc + 1e-15);
    }
}
