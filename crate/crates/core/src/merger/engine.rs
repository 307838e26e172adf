use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::community::{merge, Community, Similarity};
use crate::graph::VertexId;

pub type CommunityId = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergerConfig {
    /// Mutual best candidates merge only when their similarity exceeds this.
    pub t_fs: f64,
    /// Suppression mass for small-community mergers; 0 disables suppression.
    pub t_f0: f64,
}

impl Default for MergerConfig {
    fn default() -> Self {
        MergerConfig { t_fs: 0.1, t_f0: 4.0 }
    }
}

/// The evolving community pool with a vertex-to-community incidence index
/// that also records each member's score.
///
/// Community ids are the input positions. A merged community takes the smaller
/// id of its two parts, so every live id is the smallest id among the partials
/// it was built from, regardless of merge order.
#[derive(Debug, Clone)]
pub struct MergerState {
    pool: Vec<Option<Community>>,
    incidence: Vec<Vec<(CommunityId, u32)>>,
    pending: VecDeque<CommunityId>,
    /// Set once a community's best candidate is at or below the threshold.
    finished: Vec<bool>,
    /// Per-community `score_dot` accumulator; nonzero only during a scan.
    dot: Vec<u64>,
    scratch: Vec<CommunityId>,
    merges: usize,
}

impl MergerState {
    pub fn new<I: IntoIterator<Item = Community>>(communities: I) -> Self {
        let pool: Vec<Option<Community>> = communities.into_iter().map(Some).collect();
        let universe = pool
            .iter()
            .flatten()
            .flat_map(|c| c.members().last())
            .map(|&(v, _)| v as usize + 1)
            .max()
            .unwrap_or(0);
        let mut incidence = alloc::vec![Vec::new(); universe];
        for (id, c) in pool.iter().enumerate() {
            for &(v, s) in c.as_ref().unwrap().members() {
                incidence[v as usize].push((id as CommunityId, s));
            }
        }
        let count = pool.len();
        MergerState {
            pool,
            incidence,
            pending: (0..count as CommunityId).collect(),
            finished: alloc::vec![false; count],
            dot: alloc::vec![0; count],
            scratch: Vec::new(),
            merges: 0,
        }
    }

    pub fn community(&self, id: CommunityId) -> Option<&Community> {
        self.pool.get(id as usize).and_then(Option::as_ref)
    }

    pub fn live_count(&self) -> usize {
        self.pool.iter().flatten().count()
    }

    pub fn merges(&self) -> usize {
        self.merges
    }

    /// Live communities containing `v`, in no particular order.
    pub fn containing(&self, v: VertexId) -> impl Iterator<Item = CommunityId> + '_ {
        self.incidence
            .get(v as usize)
            .into_iter()
            .flatten()
            .map(|&(c, _)| c)
    }

    /// Scores every live community other than `id` that shares a member with
    /// it: leaves the candidates in `self.scratch`, in first-encounter order,
    /// and their `score_dot` with `id` in `self.dot`. Callers must clear
    /// `self.dot` for the candidates afterwards.
    fn collect_candidates(&mut self, id: CommunityId) {
        self.scratch.clear();
        let community = self.pool[id as usize].as_ref().unwrap();
        for &(v, s) in community.members() {
            for &(other, t) in &self.incidence[v as usize] {
                if other == id {
                    continue;
                }
                let slot = &mut self.dot[other as usize];
                if *slot == 0 {
                    self.scratch.push(other);
                }
                *slot += s as u64 * t as u64;
            }
        }
    }

    fn clear_candidates(&mut self) {
        for &other in &self.scratch {
            self.dot[other as usize] = 0;
        }
    }

    /// The best merger candidate of `id`: the community maximizing the
    /// suppressed similarity, ties to the smallest id. `None` when no
    /// candidate has positive similarity.
    pub fn best_merger_candidate(&mut self, id: CommunityId, t_f0: f64) -> Option<(CommunityId, Similarity)> {
        let mut best: Option<(CommunityId, Similarity)> = None;
        self.collect_candidates(id);
        let a = self.pool[id as usize].as_ref().unwrap();
        for &other in &self.scratch {
            let b = self.pool[other as usize].as_ref().unwrap();
            let sim = Similarity::with_dot(a, b, self.dot[other as usize], t_f0);
            if sim.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((best_id, best_sim)) => sim > best_sim || (sim == best_sim && other < best_id),
            };
            if better {
                best = Some((other, sim));
            }
        }
        self.clear_candidates();
        best
    }

    fn merge_pair(&mut self, a: CommunityId, b: CommunityId) -> CommunityId {
        let (keep, drop) = (a.min(b), a.max(b));
        let dropped = self.pool[drop as usize].take().unwrap();
        let kept = self.pool[keep as usize].take().unwrap();
        for &(v, s) in dropped.members() {
            let list = &mut self.incidence[v as usize];
            let at = list.iter().position(|&(c, _)| c == drop).unwrap();
            list.swap_remove(at);
            match list.iter_mut().find(|(c, _)| *c == keep) {
                Some(entry) => entry.1 += s,
                None => list.push((keep, s)),
            }
        }
        self.pool[keep as usize] = Some(merge(&kept, &dropped));
        self.finished[keep as usize] = false;
        self.merges += 1;
        keep
    }

    /// Reopens finished communities that a new merged community now beats the
    /// threshold with. Only reachable under suppression: without it the
    /// similarity to a union never exceeds the larger similarity to its parts.
    fn reopen_neighbors(&mut self, id: CommunityId, cfg: &MergerConfig) {
        self.collect_candidates(id);
        let a = self.pool[id as usize].as_ref().unwrap();
        let reopen: Vec<CommunityId> = self
            .scratch
            .iter()
            .copied()
            .filter(|&other| {
                let b = self.pool[other as usize].as_ref().unwrap();
                self.finished[other as usize]
                    && Similarity::with_dot(a, b, self.dot[other as usize], cfg.t_f0).exceeds(cfg.t_fs)
            })
            .collect();
        self.clear_candidates();
        for other in reopen {
            self.finished[other as usize] = false;
            self.pending.push_back(other);
        }
    }

    fn is_open(&self, id: CommunityId) -> bool {
        self.pool[id as usize].is_some() && !self.finished[id as usize]
    }

    /// Merges until every live community's best candidate is at or below
    /// `cfg.t_fs`.
    ///
    /// Each walk follows best merger candidates from a pending community until
    /// two communities are each other's best candidate, then merges them. The
    /// similarity strictly increases along a walk (ties resolved by id), so
    /// walks cannot cycle. The walk stack is kept across merges.
    pub fn run(&mut self, cfg: &MergerConfig) {
        let suppression = cfg.t_f0 > 0.0;
        let mut stack: Vec<CommunityId> = Vec::new();
        while let Some(start) = self.pending.pop_front() {
            if !self.is_open(start) {
                continue;
            }
            stack.clear();
            stack.push(start);
            while let Some(&a) = stack.last() {
                if self.pool[a as usize].is_none() {
                    stack.pop();
                    continue;
                }
                let Some((b, _)) = self
                    .best_merger_candidate(a, cfg.t_f0)
                    .filter(|(_, sim)| sim.exceeds(cfg.t_fs))
                else {
                    self.finished[a as usize] = true;
                    stack.pop();
                    continue;
                };
                let len = stack.len();
                let mutual = len >= 2
                    && stack[len - 2] == b
                    && (!suppression || self.best_merger_candidate(b, cfg.t_f0).map(|(id, _)| id) == Some(a));
                if mutual {
                    stack.truncate(len - 2);
                    let merged = self.merge_pair(a, b);
                    self.pending.push_back(merged);
                    if suppression {
                        self.reopen_neighbors(merged, cfg);
                    }
                } else {
                    self.finished[b as usize] = false;
                    stack.push(b);
                }
            }
        }
    }

    /// Live communities in id order.
    pub fn into_communities(self) -> Vec<Community> {
        self.pool.into_iter().flatten().collect()
    }

    /// Live communities with their ids.
    pub fn communities(&self) -> impl Iterator<Item = (CommunityId, &Community)> {
        self.pool
            .iter()
            .enumerate()
            .filter_map(|(id, c)| c.as_ref().map(|c| (id as CommunityId, c)))
    }
}

/// Merges `communities` to a fixed point; see [`MergerState::run`].
pub fn run_merger<I: IntoIterator<Item = Community>>(communities: I, cfg: &MergerConfig) -> Vec<Community> {
    let mut state = MergerState::new(communities);
    state.run(cfg);
    state.into_communities()
}
