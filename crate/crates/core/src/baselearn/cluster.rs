//! k-medoids (greedy BUILD + first-improvement SWAP) and k-means (k-means++ + Lloyd).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distance::squared_euclidean_unchecked;
use crate::error::{MimlError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Medoids {
    /// Item indices of the medoids, in selection order.
    pub medoids: Vec<usize>,
    /// Per item, the position in `medoids` of its nearest medoid.
    pub assignment: Vec<usize>,
    pub cost: f64,
    /// Total cost after BUILD and after every accepted swap.
    pub cost_trace: Vec<f64>,
}

const MAX_SWAPS: usize = 10_000;

struct Nearest {
    slot: Vec<usize>,
    near: Vec<f64>,
    second: Vec<f64>,
}

fn nearest(n: usize, medoids: &[usize], dist: &impl Fn(usize, usize) -> f64) -> Nearest {
    let mut out = Nearest {
        slot: vec![0; n],
        near: vec![f64::INFINITY; n],
        second: vec![f64::INFINITY; n],
    };
    for j in 0..n {
        for (s, &m) in medoids.iter().enumerate() {
            let d = if m == j { 0.0 } else { dist(j, m) };
            let better = d < out.near[j] || (m == j && d <= out.near[j]);
            if better {
                out.second[j] = out.near[j];
                out.near[j] = d;
                out.slot[j] = s;
            } else if d < out.second[j] {
                out.second[j] = d;
            }
        }
    }
    out
}

/// Partitions `n` items around `k` medoids under the dissimilarity `dist`.
///
/// BUILD greedily adds the candidate that most lowers total cost, scanning
/// candidates in a seeded random order (ties keep the earlier candidate).
/// SWAP then applies the first improving (medoid, non-medoid) exchange until
/// none remains, so the result is a local optimum under single swaps.
pub fn k_medoids(
    n: usize,
    k: usize,
    dist: impl Fn(usize, usize) -> f64,
    seed: u64,
) -> Result<Medoids> {
    if k == 0 {
        return Err(MimlError::invalid("k-medoids needs k >= 1"));
    }
    if k > n {
        return Err(MimlError::invalid(format!("k-medoids with k={k} > {n} items")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut is_medoid = vec![false; n];
    let mut near = vec![f64::INFINITY; n];
    while medoids.len() < k {
        let mut best = (f64::INFINITY, usize::MAX);
        for &c in order.iter().filter(|&&c| !is_medoid[c]) {
            let total: f64 = (0..n)
                .map(|j| if j == c { 0.0 } else { near[j].min(dist(j, c)) })
                .sum();
            if total < best.0 {
                best = (total, c);
            }
        }
        let c = best.1;
        is_medoid[c] = true;
        medoids.push(c);
        for (j, d) in near.iter_mut().enumerate() {
            *d = if j == c { 0.0 } else { d.min(dist(j, c)) };
        }
    }

    let mut state = nearest(n, &medoids, &dist);
    let mut cost: f64 = state.near.iter().sum();
    let mut cost_trace = vec![cost];
    let mut swaps = 0;
    'outer: loop {
        for slot in 0..k {
            for &c in &order {
                if is_medoid[c] {
                    continue;
                }
                let mut delta = 0.0;
                for j in 0..n {
                    let dc = if j == c { 0.0 } else { dist(j, c) };
                    let new = if state.slot[j] == slot {
                        state.second[j].min(dc)
                    } else {
                        state.near[j].min(dc)
                    };
                    delta += new - state.near[j];
                }
                if delta < -1e-12 * (1.0 + cost.abs()) {
                    is_medoid[medoids[slot]] = false;
                    is_medoid[c] = true;
                    medoids[slot] = c;
                    state = nearest(n, &medoids, &dist);
                    cost = state.near.iter().sum();
                    cost_trace.push(cost);
                    swaps += 1;
                    if swaps >= MAX_SWAPS {
                        break 'outer;
                    }
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(Medoids {
        medoids,
        assignment: state.slot,
        cost,
        cost_trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    /// Within-cluster sum of squares after each Lloyd iteration.
    pub wcss_trace: Vec<f64>,
}

const KMEANS_MAX_ITERS: usize = 300;

fn assign(vectors: &[&[f64]], centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    vectors
        .iter()
        .map(|v| {
            let mut best = (0, f64::INFINITY);
            for (c, cen) in centroids.iter().enumerate() {
                let d = squared_euclidean_unchecked(v, cen);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

/// Lloyd's k-means with k-means++ seeding. Empty clusters are re-seeded from
/// the point farthest from its current centroid.
pub fn k_means<X: AsRef<[f64]>>(vectors: &[X], k: usize, seed: u64) -> Result<KMeans> {
    let n = vectors.len();
    if k == 0 {
        return Err(MimlError::invalid("k-means needs k >= 1"));
    }
    if k > n {
        return Err(MimlError::invalid(format!("k-means with k={k} > {n} vectors")));
    }
    let vs: Vec<&[f64]> = vectors.iter().map(|v| v.as_ref()).collect();
    let dim = vs[0].len();
    if let Some(bad) = vs.iter().find(|v| v.len() != dim) {
        return Err(MimlError::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = vec![vs[rng.random_range(0..n)].to_vec()];
    let mut d2: Vec<f64> = vs.iter().map(|v| squared_euclidean_unchecked(v, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && r < d {
                    pick = i;
                    break;
                }
                r -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centroids.push(vs[pick].to_vec());
        for (i, v) in vs.iter().enumerate() {
            d2[i] = d2[i].min(squared_euclidean_unchecked(v, &centroids[centroids.len() - 1]));
        }
    }

    let (mut assignment, _) = assign(&vs, &centroids);
    let mut wcss_trace = Vec::new();
    for _ in 0..KMEANS_MAX_ITERS {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (v, &a) in vs.iter().zip(&assignment) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(v.iter()) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let (far, _) = vs
                    .iter()
                    .zip(&assignment)
                    .enumerate()
                    .filter(|(_, (_, &a))| counts[a] > 1)
                    .map(|(i, (v, &a))| (i, squared_euclidean_unchecked(v, &centroids[a])))
                    .fold((usize::MAX, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
                if far != usize::MAX {
                    counts[assignment[far]] -= 1;
                    centroids[c] = vs[far].to_vec();
                    assignment[far] = c;
                    counts[c] = 1;
                }
            }
        }
        let (next, dists) = assign(&vs, &centroids);
        wcss_trace.push(dists.iter().sum());
        if next == assignment {
            break;
        }
        assignment = next;
    }
    Ok(KMeans {
        centroids,
        assignment,
        wcss_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> impl Fn(usize, usize) -> f64 + '_ {
        move |i, j| (points[i] - points[j]).abs()
    }

    /// Exhaustive oracle: the medoid set with minimal total cost.
    fn brute_force_medoids(points: &[f64], k: usize) -> (f64, Vec<usize>) {
        let n = points.len();
        let mut best = (f64::INFINITY, vec![]);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let meds: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let cost: f64 = (0..n)
                .map(|j| meds.iter().map(|&m| (points[j] - points[m]).abs()).fold(f64::INFINITY, f64::min))
                .sum();
            if cost < best.0 {
                best = (cost, meds);
            }
        }
        best
    }

    #[test]
    fn k_equal_n_is_identity() {
        let pts = [3.0, 1.0, 4.0, 1.5, 9.0];
        let m = k_medoids(5, 5, line(&pts), 11).unwrap();
        assert_eq!(m.cost, 0.0);
        for (j, &slot) in m.assignment.iter().enumerate() {
            assert_eq!(m.medoids[slot], j);
        }
    }

    #[test]
    fn two_clusters_on_a_line() {
        let pts = [0.0, 1.0, 10.0, 11.0];
        let (oracle_cost, _) = brute_force_medoids(&pts, 2);
        assert_eq!(oracle_cost, 2.0);
        for seed in 0..20 {
            let m = k_medoids(4, 2, line(&pts), seed).unwrap();
            assert_eq!(m.cost, oracle_cost);
            assert_eq!(m.assignment[0], m.assignment[1]);
            assert_eq!(m.assignment[2], m.assignment[3]);
            assert_ne!(m.assignment[0], m.assignment[2]);
        }
    }

    #[test]
    fn deterministic_and_locally_optimal() {
        let pts: Vec<f64> = (0..25).map(|i| ((i * 37 % 23) as f64).powf(1.3)).collect();
        let a = k_medoids(pts.len(), 4, line(&pts), 5).unwrap();
        let b = k_medoids(pts.len(), 4, line(&pts), 5).unwrap();
        assert_eq!(a, b);
        assert!(a.cost_trace.windows(2).all(|w| w[1] <= w[0]));
        let cost_of = |meds: &[usize]| -> f64 {
            (0..pts.len())
                .map(|j| meds.iter().map(|&m| (pts[j] - pts[m]).abs()).fold(f64::INFINITY, f64::min))
                .sum()
        };
        for slot in 0..4 {
            for c in 0..pts.len() {
                if a.medoids.contains(&c) {
                    continue;
                }
                let mut alt = a.medoids.clone();
                alt[slot] = c;
                assert!(cost_of(&alt) >= a.cost - 1e-9);
            }
        }
    }

    #[test]
    fn too_many_medoids() {
        assert!(k_medoids(3, 4, |_, _| 1.0, 0).is_err());
        assert!(k_medoids(3, 0, |_, _| 1.0, 0).is_err());
    }

    #[test]
    fn k_means_single_cluster_is_mean() {
        let vs = vec![vec![0.0, 2.0], vec![4.0, 0.0], vec![2.0, 4.0]];
        let km = k_means(&vs, 1, 3).unwrap();
        assert_eq!(km.centroids, vec![vec![2.0, 2.0]]);
    }

    #[test]
    fn k_means_two_clusters_on_a_line() {
        let vs: Vec<Vec<f64>> = [0.0, 1.0, 10.0, 11.0].iter().map(|&x| vec![x]).collect();
        for seed in 0..20 {
            let km = k_means(&vs, 2, seed).unwrap();
            let mut c: Vec<f64> = km.centroids.iter().map(|c| c[0]).collect();
            c.sort_by(f64::total_cmp);
            assert_eq!(c, vec![0.5, 10.5]);
            assert!(km.wcss_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
        assert_eq!(k_means(&vs, 2, 9).unwrap(), k_means(&vs, 2, 9).unwrap());
        assert!(k_means(&vs, 5, 0).is_err());
    }

    #[test]
    fn k_means_handles_duplicates() {
        let vs = vec![vec![1.0]; 6];
        let km = k_means(&vs, 3, 1).unwrap();
        assert_eq!(km.centroids.len(), 3);
        assert!(km.centroids.iter().all(|c| c[0] == 1.0));
    }
}
