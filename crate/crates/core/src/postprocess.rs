//! Cleaning merged communities into a final cover.
//!
//! Members seen in too few constituent partials (`S < t_S`) or attached to too
//! small a fraction of them (`S / l <= t_S/l`) are pruned first; communities
//! built from fewer than `t_l` partials, or left with fewer than `min_size`
//! members, are then dropped.

use alloc::vec::Vec;

use crate::graph::VertexId;
use crate::merger::Community;
use crate::{Error, Result};

/// How the `S / l` cut is chosen per community.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatioCut {
    Uniform,
    /// `t_S/l = factor * g(C)`.
    ScaledByG(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub t_fs: f64,
    pub t_l: u32,
    pub t_s: u32,
    pub t_sl: f64,
    pub t_f0: f64,
    pub min_size: usize,
    pub ratio_cut: RatioCut,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            t_fs: 0.1,
            t_l: 10,
            t_s: 4,
            t_sl: 0.1,
            t_f0: 4.0,
            min_size: 3,
            ratio_cut: RatioCut::Uniform,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.t_fs > 0.0 && self.t_fs < 1.0) {
            return bad("t_fs", "must lie in (0, 1)");
        }
        if self.t_s < 3 {
            return bad("t_s", "must be at least 3");
        }
        if self.t_sl.is_nan() || self.t_sl < 0.0 {
            return bad("t_sl", "must be nonnegative");
        }
        if self.t_f0.is_nan() || self.t_f0 < 0.0 {
            return bad("t_f0", "must be nonnegative");
        }
        if let RatioCut::ScaledByG(f) = self.ratio_cut {
            if f.is_nan() || f < 0.0 {
                return bad("ratio factor", "must be nonnegative");
            }
        }
        Ok(())
    }

    /// The `S / l` cut applied to a community with overlap density `g`.
    pub fn ratio_cut_for(&self, g: f64) -> f64 {
        match self.ratio_cut {
            RatioCut::Uniform => self.t_sl,
            RatioCut::ScaledByG(f) => f * g,
        }
    }
}

/// A community with its merger history frozen: `l` and `g` describe how it
/// was assembled and are not recomputed by pruning; `w` follows the members.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCommunity {
    pub members: Vec<(VertexId, u32)>,
    pub l: u32,
    pub w: u64,
    pub g: f64,
}

impl From<&Community> for ScoredCommunity {
    fn from(c: &Community) -> Self {
        ScoredCommunity {
            members: c.members().to_vec(),
            l: c.l(),
            w: c.w(),
            g: c.g(),
        }
    }
}

impl From<Community> for ScoredCommunity {
    fn from(c: Community) -> Self {
        ScoredCommunity::from(&c)
    }
}

impl ScoredCommunity {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Removes members with `S < t_s`, then members with `S / l <= ratio_cut`.
pub fn prune_members(c: &ScoredCommunity, t_s: u32, ratio_cut: f64) -> ScoredCommunity {
    let l = c.l as f64;
    let members: Vec<(VertexId, u32)> = c
        .members
        .iter()
        .copied()
        .filter(|&(_, s)| s >= t_s)
        .filter(|&(_, s)| s as f64 / l > ratio_cut)
        .collect();
    ScoredCommunity {
        w: members.iter().map(|&(_, s)| s as u64).sum(),
        members,
        l: c.l,
        g: c.g,
    }
}

/// Merge history attached to a cover community.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeStats {
    /// Aligned with [`CoverCommunity::members`].
    pub scores: Vec<u32>,
    pub l: u32,
    pub w: u64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverCommunity {
    /// Sorted ascending, duplicate free.
    pub members: Vec<VertexId>,
    pub stats: Option<MergeStats>,
}

impl CoverCommunity {
    pub fn plain(mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        CoverCommunity { members, stats: None }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_scored(&self) -> Option<ScoredCommunity> {
        let stats = self.stats.as_ref()?;
        Some(ScoredCommunity {
            members: self
                .members
                .iter()
                .copied()
                .zip(stats.scores.iter().copied())
                .collect(),
            l: stats.l,
            w: stats.w,
            g: stats.g,
        })
    }
}

impl From<ScoredCommunity> for CoverCommunity {
    fn from(c: ScoredCommunity) -> Self {
        let (members, scores) = c.members.into_iter().unzip();
        CoverCommunity {
            members,
            stats: Some(MergeStats {
                scores,
                l: c.l,
                w: c.w,
                g: c.g,
            }),
        }
    }
}

/// A set of possibly overlapping communities over `n` vertices. Vertices in no
/// community are allowed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Cover {
    pub n: usize,
    pub communities: Vec<CoverCommunity>,
}

impl Cover {
    /// Builds a plain cover, dropping empty sets.
    pub fn from_sets<I>(n: usize, sets: I) -> Self
    where
        I: IntoIterator<Item = Vec<VertexId>>,
    {
        Cover {
            n,
            communities: sets
                .into_iter()
                .map(CoverCommunity::plain)
                .filter(|c| !c.is_empty())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn sets(&self) -> impl Iterator<Item = &[VertexId]> {
        self.communities.iter().map(|c| c.members.as_slice())
    }

    /// Number of communities each vertex belongs to.
    pub fn membership_counts(&self) -> Vec<u32> {
        let n = self
            .sets()
            .flat_map(|s| s.last())
            .map(|&v| v as usize + 1)
            .max()
            .unwrap_or(0)
            .max(self.n);
        let mut counts = alloc::vec![0; n];
        for s in self.sets() {
            for &v in s {
                counts[v as usize] += 1;
            }
        }
        counts
    }

    /// Largest first; ties by smallest member, then lexicographically.
    pub fn sort_canonical(&mut self) {
        self.communities.sort_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| a.members.first().cmp(&b.members.first()))
                .then_with(|| a.members.cmp(&b.members))
        });
    }
}

/// Keeps communities with `l >= t_l` and at least `min_size` members.
pub fn filter_communities<I>(pool: I, t_l: u32, min_size: usize, n: usize) -> Cover
where
    I: IntoIterator<Item = ScoredCommunity>,
{
    let mut cover = Cover {
        n,
        communities: pool
            .into_iter()
            .filter(|c| c.l >= t_l && c.len() >= min_size && !c.is_empty())
            .map(CoverCommunity::from)
            .collect(),
    };
    cover.sort_canonical();
    cover
}

/// Prunes every community, then filters; see the module docs.
pub fn postprocess<I>(pool: I, th: &Thresholds, n: usize) -> Cover
where
    I: IntoIterator<Item = ScoredCommunity>,
{
    let pruned: Vec<ScoredCommunity> = pool
        .into_iter()
        .map(|c| {
            let cut = th.ratio_cut_for(c.g);
            prune_members(&c, th.t_s, cut)
        })
        .collect();
    filter_communities(pruned, th.t_l, th.min_size, n)
}

/// Runs [`postprocess`] again on an annotated cover. Plain communities (no
/// merge stats) pass through the size filter only.
pub fn postprocess_cover(cover: &Cover, th: &Thresholds) -> Cover {
    let mut plain = Vec::new();
    let mut scored = Vec::new();
    for c in &cover.communities {
        match c.to_scored() {
            Some(s) => scored.push(s),
            None if c.len() >= th.min_size => plain.push(c.clone()),
            None => {}
        }
    }
    let mut out = postprocess(scored, th, cover.n);
    out.communities.extend(plain);
    out.sort_canonical();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn scored(members: &[(VertexId, u32)], l: u32) -> ScoredCommunity {
        ScoredCommunity {
            members: members.to_vec(),
            l,
            w: members.iter().map(|&(_, s)| s as u64).sum(),
            g: 0.5,
        }
    }

    #[test]
    fn low_scores_removed() {
        let c = scored(&[(1, 2), (2, 5)], 10);
        let p = prune_members(&c, 4, 0.1);
        assert_eq!(p.members, vec![(2, 5)]);
        assert_eq!(p.w, 5);
        assert_eq!(p.l, 10);
    }

    #[test]
    fn ratio_cut_is_strict() {
        let big_l = scored(&[(1, 5)], 100);
        assert!(prune_members(&big_l, 4, 0.1).is_empty());
        let small_l = scored(&[(1, 5)], 40);
        assert_eq!(prune_members(&small_l, 4, 0.1).len(), 1);
        let exact = scored(&[(1, 5)], 50);
        assert!(prune_members(&exact, 4, 0.1).is_empty());
    }

    #[test]
    fn l_boundary_kept() {
        let pool = [2, 9, 10, 49].map(|l| scored(&[(1, 1), (2, 1), (3, 1)], l));
        let cover = filter_communities(pool, 10, 3, 4);
        assert_eq!(cover.len(), 2);
    }

    #[test]
    fn small_communities_dropped() {
        let cover = filter_communities([scored(&[(1, 5), (2, 5)], 20)], 10, 3, 3);
        assert!(cover.is_empty());
    }

    #[test]
    fn empty_pool() {
        let cover = postprocess(Vec::new(), &Thresholds::default(), 0);
        assert!(cover.is_empty());
    }

    #[test]
    fn output_is_canonically_sorted() {
        let a = scored(&[(5, 12), (6, 12), (7, 12)], 12);
        let b = scored(&[(1, 12), (2, 12), (3, 12), (4, 12)], 12);
        let c = scored(&[(0, 12), (8, 12), (9, 12)], 12);
        let cover = postprocess(vec![a, b, c], &Thresholds::default(), 10);
        let firsts: Vec<_> = cover.sets().map(|s| s[0]).collect();
        assert_eq!(firsts, vec![1, 0, 5]);
    }

    #[test]
    fn scaled_ratio_cut_uses_g() {
        let th = Thresholds {
            ratio_cut: RatioCut::ScaledByG(0.5),
            t_l: 1,
            ..Thresholds::default()
        };
        // g = 0.5, so the cut is 0.25: S/l of 4/20 = 0.2 goes, 6/20 stays.
        let c = scored(&[(1, 4), (2, 6), (3, 6), (4, 6)], 20);
        let cover = postprocess(vec![c], &th, 5);
        assert_eq!(cover.communities[0].members, vec![2, 3, 4]);
    }

    #[test]
    fn threshold_validation() {
        assert!(Thresholds::default().validate().is_ok());
        assert!(Thresholds {
            t_s: 2,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(Thresholds {
            t_fs: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(Thresholds {
            t_sl: -0.1,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn annotated_round_trip_is_idempotent() {
        let a = scored(&[(1, 12), (2, 3), (3, 12), (4, 12), (5, 1)], 12);
        let th = Thresholds::default();
        let once = postprocess(vec![a], &th, 6);
        let twice = postprocess_cover(&once, &th);
        assert_eq!(once, twice);
    }
}
