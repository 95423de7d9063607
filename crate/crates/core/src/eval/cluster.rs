//! k-means over L2-normalized vectors and partition-agreement scores.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / norm).collect()
    }
}

/// Lloyd's algorithm with k-means++ seeding on L2-normalized copies of
/// `vectors`. Stops after `max_iters` rounds or once no centroid moves by
/// 1e-9 or more. Empty clusters are re-seeded at the point farthest from its
/// assigned centroid.
pub fn kmeans(vectors: &[Vec<f64>], k: usize, max_iters: usize, seed: u64) -> Result<KMeans> {
    let n = vectors.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, points: n });
    }
    let dim = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionError {
            left: v.len(),
            right: dim,
        });
    }
    let points: Vec<Vec<f64>> = vectors.iter().map(|v| normalized(v)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            if nearest[pick] == 0.0 {
                pick = (0..n).rev().find(|&i| nearest[i] > 0.0).expect("total > 0");
            }
            pick
        } else {
            // every point coincides with a centroid: take an unchosen index
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (d, p) in nearest.iter_mut().zip(&points) {
            *d = d.min(sq_dist(p, &points[next]));
        }
    }
    let mut centroids: Vec<Vec<f64>> = chosen.iter().map(|&i| points[i].clone()).collect();

    let assign = |centroids: &[Vec<f64>], labels: &mut [usize]| {
        for (label, p) in labels.iter_mut().zip(&points) {
            let mut best = (f64::INFINITY, 0);
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best.0 {
                    best = (d, c);
                }
            }
            *label = best.1;
        }
    };

    let mut labels = vec![0; n];
    assign(&centroids, &mut labels);
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut updated: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .map(|(s, &c)| s.into_iter().map(|x| x / c.max(1) as f64).collect())
            .collect();
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(&points[a], &centroids[labels[a]])
                            .total_cmp(&sq_dist(&points[b], &centroids[labels[b]]))
                            .then(b.cmp(&a))
                    })
                    .expect("n >= 1");
                updated[c] = points[far].clone();
            }
        }
        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        assign(&centroids, &mut labels);
        if shift < 1e-9 {
            break;
        }
    }
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centroids[l]))
        .sum();
    Ok(KMeans {
        labels,
        centroids,
        inertia,
        iterations,
    })
}

type Contingency = (Vec<f64>, Vec<f64>, Vec<(usize, usize, f64)>);

/// Row sums, column sums and the non-zero cells `(row, col, count)`.
fn contingency(a: &[usize], b: &[usize]) -> Contingency {
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        let nr = rows.len();
        let r = *rows.entry(x).or_insert(nr);
        let nc = cols.len();
        let c = *cols.entry(y).or_insert(nc);
        *cells.entry((r, c)).or_default() += 1.0;
    }
    let mut row_sums = vec![0.0; rows.len()];
    let mut col_sums = vec![0.0; cols.len()];
    let mut joint: Vec<(usize, usize, f64)> = cells.into_iter().map(|((r, c), v)| (r, c, v)).collect();
    // fixed summation order
    joint.sort_by_key(|&(r, c, _)| (r, c));
    for &(r, c, v) in &joint {
        row_sums[r] += v;
        col_sums[c] += v;
    }
    (row_sums, col_sums, joint)
}

fn entropy(counts: &[f64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| -(c / n) * (c / n).ln())
        .sum()
}

/// Normalized mutual information with geometric-mean normalization.
///
/// Two single-cluster partitions score 1.0; otherwise a zero entropy on
/// either side scores 0.0.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionError {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InsufficientData("nmi needs at least one point"));
    }
    let n = a.len() as f64;
    let (rows, cols, cells) = contingency(a, b);
    if same_partition(&rows, &cols, &cells) {
        return Ok(1.0);
    }
    let (ha, hb) = (entropy(&rows, n), entropy(&cols, n));
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    let mi: f64 = cells
        .iter()
        .map(|&(r, c, v)| (v / n) * ((n * v) / (rows[r] * cols[c])).ln())
        .sum();
    Ok((mi / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

/// Equal up to relabeling: every cluster of one side maps onto exactly one
/// cluster of the other.
fn same_partition(rows: &[f64], cols: &[f64], cells: &[(usize, usize, f64)]) -> bool {
    rows.len() == cols.len() && cells.len() == rows.len()
}

fn choose2(x: f64) -> f64 {
    x * (x - 1.0) / 2.0
}

/// Adjusted Rand index from the contingency table.
///
/// When the denominator vanishes the score is 1.0 for equal partitions and
/// 0.0 otherwise.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionError {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InsufficientData("ari needs at least two points"));
    }
    let n = a.len() as f64;
    let (rows, cols, cells) = contingency(a, b);
    if same_partition(&rows, &cols, &cells) {
        return Ok(1.0);
    }
    let index: f64 = cells.iter().map(|&(_, _, c)| choose2(c)).sum();
    let sum_a: f64 = rows.iter().map(|&c| choose2(c)).sum();
    let sum_b: f64 = cols.iter().map(|&c| choose2(c)).sum();
    let expected = sum_a * sum_b / choose2(n);
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return Ok(0.0);
    }
    Ok((index - expected) / (max - expected))
}
