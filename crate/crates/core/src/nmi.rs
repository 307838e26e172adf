//! Normalized mutual information between two overlapping covers.
//!
//! Each community is a binary membership vector over the `n` vertices. For a
//! community `X_k` the conditional entropy given the other cover is the
//! smallest `H(X_k | Y_l)` over the communities `Y_l` that actually carry
//! information about it, i.e. those whose joint distribution satisfies
//! `h(P11) + h(P00) > h(P10) + h(P01)`; if no `Y_l` qualifies it is `H(X_k)`.
//! The score is `1 - (H(X|Y)_norm + H(Y|X)_norm) / 2`, where each normalized
//! term averages `H(X_k | Y) / H(X_k)` over the communities.
//!
//! Only communities sharing a member with `X_k` are scanned individually;
//! disjoint ones are handled once per distinct community size.

use alloc::vec::Vec;

use crate::postprocess::Cover;

fn h(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * libm::log2(p)
    }
}

fn binary_entropy(size: usize, n: f64) -> f64 {
    let p = size as f64 / n;
    h(p) + h(1.0 - p)
}

/// `H(X | Y)` for a pair of sizes and their overlap, or `None` when the pair
/// fails the information condition.
fn conditional(x: usize, y: usize, common: usize, n: f64) -> Option<f64> {
    let d = common as f64 / n;
    let b = (x - common) as f64 / n;
    let c = (y - common) as f64 / n;
    let a = (n - (x + y - common) as f64) / n;
    if h(a) + h(d) > h(b) + h(c) {
        Some(h(a) + h(b) + h(c) + h(d) - binary_entropy(y, n))
    } else {
        None
    }
}

/// Average normalized `H(X_k | Y)` over the communities of `x`.
fn normalized_conditional(x: &Cover, y: &Cover, n: usize) -> f64 {
    let nf = n as f64;
    let y_sets: Vec<&[u32]> = y.sets().collect();

    let mut index: Vec<Vec<u32>> = alloc::vec![Vec::new(); n];
    for (l, set) in y_sets.iter().enumerate() {
        for &v in *set {
            index[v as usize].push(l as u32);
        }
    }

    let mut sizes: Vec<usize> = y_sets.iter().map(|s| s.len()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let size_slot: Vec<usize> = y_sets
        .iter()
        .map(|s| sizes.binary_search(&s.len()).unwrap())
        .collect();
    let mut per_size = alloc::vec![0usize; sizes.len()];
    for &slot in &size_slot {
        per_size[slot] += 1;
    }

    let mut common = alloc::vec![0usize; y_sets.len()];
    let mut touched: Vec<u32> = Vec::new();
    let mut overlapping_per_size = alloc::vec![0usize; sizes.len()];

    let mut total = 0.0;
    for set in x.sets() {
        let hx = binary_entropy(set.len(), nf);
        touched.clear();
        for &v in set {
            for &l in &index[v as usize] {
                if common[l as usize] == 0 {
                    touched.push(l);
                }
                common[l as usize] += 1;
            }
        }
        let mut best = hx;
        for &l in &touched {
            let l = l as usize;
            if let Some(hc) = conditional(set.len(), y_sets[l].len(), common[l], nf) {
                best = best.min(hc);
            }
            overlapping_per_size[size_slot[l]] += 1;
        }
        for (slot, &size) in sizes.iter().enumerate() {
            if per_size[slot] > overlapping_per_size[slot] {
                if let Some(hc) = conditional(set.len(), size, 0, nf) {
                    best = best.min(hc);
                }
            }
        }
        for &l in &touched {
            common[l as usize] = 0;
            overlapping_per_size[size_slot[l as usize]] = 0;
        }
        if hx > 0.0 {
            total += best / hx;
        }
    }
    total / x.len() as f64
}

/// Overlapping NMI in `[0, 1]`; 0 when either cover is empty.
pub fn onmi(x: &Cover, y: &Cover, n: usize) -> f64 {
    if x.is_empty() || y.is_empty() || n == 0 {
        return 0.0;
    }
    let hxy = normalized_conditional(x, y, n);
    let hyx = normalized_conditional(y, x, n);
    (1.0 - 0.5 * (hxy + hyx)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct transcription over all community pairs, for cross-checking the
    /// indexed version.
    fn brute(x: &Cover, y: &Cover, n: usize) -> f64 {
        let nf = n as f64;
        let side = |x: &Cover, y: &Cover| {
            let mut total = 0.0;
            for a in x.sets() {
                let hx = binary_entropy(a.len(), nf);
                let mut best = hx;
                for b in y.sets() {
                    let common = a.iter().filter(|v| b.contains(v)).count();
                    if let Some(hc) = conditional(a.len(), b.len(), common, nf) {
                        best = best.min(hc);
                    }
                }
                if hx > 0.0 {
                    total += best / hx;
                }
            }
            total / x.len() as f64
        };
        (1.0 - 0.5 * (side(x, y) + side(y, x))).clamp(0.0, 1.0)
    }

    fn cover(n: usize, sets: &[&[u32]]) -> Cover {
        Cover::from_sets(n, sets.iter().map(|s| s.to_vec()))
    }

    #[test]
    fn identical_covers_score_one() {
        let x = cover(10, &[&[0, 1, 2, 3], &[3, 4, 5], &[7, 8]]);
        assert!((onmi(&x, &x, 10) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_cover_scores_zero() {
        let x = cover(10, &[&[0, 1, 2]]);
        assert_eq!(onmi(&x, &Cover::default(), 10), 0.0);
    }

    #[test]
    fn matches_brute_force() {
        let x = cover(12, &[&[0, 1, 2, 3, 4], &[4, 5, 6, 7], &[8, 9, 10, 11], &[0, 11]]);
        let y = cover(
            12,
            &[
                &[0, 1, 2, 3],
                &[3, 4, 5, 6, 7],
                &[9, 10, 11],
                &[1, 2, 3, 4, 5, 6, 7, 8],
            ],
        );
        let fast = onmi(&x, &y, 12);
        assert!((fast - brute(&x, &y, 12)).abs() < 1e-12);
        assert!(fast > 0.0 && fast < 1.0);
        assert_eq!(fast, onmi(&y, &x, 12));
    }

    #[test]
    fn anticorrelated_pairs_are_rejected() {
        // Complementary halves determine each other, but only through
        // non-membership; the condition discards such pairs.
        let x = cover(10, &[&[0, 1, 2, 3, 4]]);
        let y = cover(10, &[&[5, 6, 7, 8, 9]]);
        assert_eq!(onmi(&x, &y, 10), brute(&x, &y, 10));
        assert_eq!(onmi(&x, &y, 10), 0.0);
    }
}
