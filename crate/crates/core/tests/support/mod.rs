//! Independent reference implementations and fixture corpora shared by the
//! integration and acceptance tests. Nothing here calls into the code paths
//! it is used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Embedding by literal-state pair enumeration, one feature at a time.
pub fn brute_embedding(states: &[u16], clauses: usize, dim: usize, weights_for_word: &[i32]) -> Vec<i32> {
    let positive: Vec<usize> = (0..clauses).filter(|&j| weights_for_word[j] > 0).collect();
    let t = positive.len() as i64;
    let mut e = vec![0i32; dim];
    for (i, slot) in e.iter_mut().enumerate() {
        let mut v: i64 = 0;
        for &j in &positive {
            for l in 0..2 * dim {
                let n = states[j * 2 * dim + l] as i64;
                if l == i {
                    v += n;
                } else if l == dim + i {
                    v -= n;
                }
            }
        }
        if t > 0 {
            let q = v / t;
            *slot = if v % t != 0 && v < 0 { q - 1 } else { q } as i32;
        }
    }
    e
}

fn naive_pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

/// Rank by counting: 1 + #smaller + (#equal - 1) / 2.
pub fn counting_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let less = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn brute_spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    naive_pearson(&counting_ranks(xs), &counting_ranks(ys))
}

/// Tau-b by enumerating every pair.
pub fn brute_kendall(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    let (mut conc, mut disc, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = xs[i] - xs[j];
            let dy = ys[i] - ys[j];
            if dx == 0.0 {
                tie_x += 1;
            }
            if dy == 0.0 {
                tie_y += 1;
            }
            if dx != 0.0 && dy != 0.0 {
                if (dx > 0.0) == (dy > 0.0) {
                    conc += 1;
                } else {
                    disc += 1;
                }
            }
        }
    }
    let n0 = (n * (n.saturating_sub(1)) / 2) as i64;
    let denom = ((n0 - tie_x) as f64 * (n0 - tie_y) as f64).sqrt();
    (n >= 2 && denom > 0.0).then(|| (conc - disc) as f64 / denom)
}

/// NMI from per-label counts gathered by scanning.
pub fn brute_nmi(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut la: Vec<usize> = a.to_vec();
    la.sort_unstable();
    la.dedup();
    let mut lb: Vec<usize> = b.to_vec();
    lb.sort_unstable();
    lb.dedup();
    if la.len() == 1 && lb.len() == 1 {
        return 1.0;
    }
    let h = |labels: &[usize], xs: &[usize]| -> f64 {
        labels
            .iter()
            .map(|&l| {
                let p = xs.iter().filter(|&&x| x == l).count() as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let (ha, hb) = (h(&la, a), h(&lb, b));
    let mut mi = 0.0;
    for &x in &la {
        for &y in &lb {
            let nxy = (0..a.len()).filter(|&i| a[i] == x && b[i] == y).count() as f64;
            if nxy == 0.0 {
                continue;
            }
            let nx = a.iter().filter(|&&v| v == x).count() as f64;
            let ny = b.iter().filter(|&&v| v == y).count() as f64;
            mi += nxy / n * (n * nxy / (nx * ny)).ln();
        }
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    mi / (ha * hb).sqrt()
}

/// Whether two labelings describe the same partition (pairwise check).
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

/// ARI from the four pair-agreement counts over all point pairs.
pub fn brute_ari(a: &[usize], b: &[usize]) -> f64 {
    let (mut ss, mut sd, mut ds, mut dd) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => ss += 1.0,
                (true, false) => sd += 1.0,
                (false, true) => ds += 1.0,
                (false, false) => dd += 1.0,
            }
        }
    }
    let denom = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
    if denom == 0.0 {
        return if same_partition(a, b) { 1.0 } else { 0.0 };
    }
    2.0 * (ss * dd - sd * ds) / denom
}

fn draw<R: Rng>(rng: &mut R, p: f64) -> bool {
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.random::<f64>() < p
    }
}

pub struct ReplayConfig {
    pub clauses: usize,
    pub threshold: i64,
    pub s: f64,
    pub half: u16,
    pub epochs: usize,
    pub examples: usize,
    pub accumulation: usize,
    pub boost: bool,
    pub seed: u64,
}

/// Scripted trainer over plain vectors, consuming the random stream in the
/// documented order: weight signs clause-major, then per example the document
/// draws, one update draw per clause, and per-literal draws for Type I.
pub fn replay_train(docs: &[Vec<u32>], dim: usize, outputs: &[u32], cfg: &ReplayConfig) -> (Vec<u16>, Vec<i32>) {
    let c = cfg.clauses;
    let m = outputs.len();
    let lits = 2 * dim;
    let n = cfg.half;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut weights: Vec<i32> = (0..c * m).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    let mut states = vec![n; c * lits];

    for _epoch in 0..cfg.epochs {
        for (k, &target) in outputs.iter().enumerate() {
            for ex in 0..cfg.examples {
                let label = ex % 2 == 0;
                let qualifying: Vec<usize> = (0..docs.len())
                    .filter(|&i| docs[i].contains(&target) == label)
                    .collect();
                let mut x = vec![false; lits];
                for i in 0..dim {
                    x[dim + i] = true;
                }
                for _ in 0..cfg.accumulation {
                    let doc = qualifying[rng.random_range(0..qualifying.len())];
                    for &f in &docs[doc] {
                        x[f as usize] = true;
                        x[dim + f as usize] = false;
                    }
                }
                x[target as usize] = false;
                x[dim + target as usize] = true;

                let fires: Vec<bool> = (0..c)
                    .map(|j| {
                        let row = &states[j * lits..(j + 1) * lits];
                        let included: Vec<usize> = (0..lits).filter(|&l| row[l] > n).collect();
                        included.is_empty() || included.iter().all(|&l| x[l])
                    })
                    .collect();
                let raw: i64 = (0..c).filter(|&j| fires[j]).map(|j| weights[j * m + k] as i64).sum();
                let v = raw.clamp(-cfg.threshold, cfg.threshold) as f64;
                let t = cfg.threshold as f64;
                let p = if label { (t - v) / (2.0 * t) } else { (t + v) / (2.0 * t) };

                for j in 0..c {
                    if !draw(&mut rng, p) {
                        continue;
                    }
                    let w = &mut weights[j * m + k];
                    let row = &mut states[j * lits..(j + 1) * lits];
                    let type_one = (*w >= 0) == label;
                    if type_one && fires[j] {
                        let p_up = if cfg.boost { 1.0 } else { (cfg.s - 1.0) / cfg.s };
                        for l in 0..lits {
                            if x[l] {
                                if draw(&mut rng, p_up) && row[l] < 2 * n {
                                    row[l] += 1;
                                }
                            } else if draw(&mut rng, 1.0 / cfg.s) && row[l] > 1 {
                                row[l] -= 1;
                            }
                        }
                    } else if type_one {
                        for s in row.iter_mut() {
                            if draw(&mut rng, 1.0 / cfg.s) && *s > 1 {
                                *s -= 1;
                            }
                        }
                    } else if fires[j] {
                        for l in 0..lits {
                            if !x[l] && row[l] <= n {
                                row[l] += 1;
                            }
                        }
                    }
                    if fires[j] {
                        *w += if label { 1 } else { -1 };
                    }
                }
            }
        }
    }
    (states, weights)
}

/// Six documents over six words; every word appears in some but not all
/// documents.
pub fn toy_corpus() -> Vec<Vec<String>> {
    [
        "sun moon star",
        "moon tide sea",
        "sea fish tide",
        "fish sun",
        "star sea moon",
        "tide sun fish star",
    ]
    .iter()
    .map(|s| s.split(' ').map(String::from).collect())
    .collect()
}

/// Two-topic corpus: 200 documents alternating between topic `a` and topic
/// `b` (18 words each), six tokens per document, each token replaced by one
/// of four noise words with probability 0.05.
pub fn two_topic_corpus(seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
    (0..200)
        .map(|i| {
            let topic = if i % 2 == 0 { "a" } else { "b" };
            (0..6)
                .map(|_| {
                    if rng.random::<f64>() < 0.05 {
                        format!("noise{}", rng.random_range(0..4))
                    } else {
                        format!("{topic}{}", rng.random_range(0..18))
                    }
                })
                .collect()
        })
        .collect()
}

pub fn topic_of(token: &str) -> Option<char> {
    if token.starts_with("noise") {
        None
    } else {
        token.chars().next()
    }
}

/// 60 documents of four filler words; every third also holds "happy" and
/// "fox", and some others hold "fox" alone.
pub fn fox_corpus(seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..60)
        .map(|i| {
            let mut d: Vec<String> = (0..4).map(|_| format!("w{}", rng.random_range(0..30))).collect();
            if i % 3 == 0 {
                d.push("happy".into());
                d.push("fox".into());
            } else if i % 3 == 1 && rng.random::<f64>() < 0.3 {
                d.push("fox".into());
            }
            d
        })
        .collect()
}

/// Random `(states, weights)` for a `clauses × 2·dim` bank with N = `half`.
pub fn random_machine<R: Rng>(rng: &mut R, clauses: usize, dim: usize, outputs: usize, half: u16) -> (Vec<u16>, Vec<i32>) {
    let states = (0..clauses * 2 * dim).map(|_| rng.random_range(1..=2 * half)).collect();
    let weights = (0..clauses * outputs).map(|_| rng.random_range(-5..=5)).collect();
    (states, weights)
}
