//! Quadratic-space reference merger: a global priority queue over all pairs,
//! always merging the most similar pair first. Only used to cross-check
//! [`run_merger`](super::run_merger).

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::community::{merge, Community, Similarity};
use super::engine::MergerConfig;

type Entry = (Similarity, Reverse<(u32, u32)>, u32, u32);

/// Greedy agglomeration: pop the most similar pair (ties to the smallest id
/// pair), stop once it is at or below `t_fs`. Merged communities take the
/// smaller id, as in the optimized engine.
pub fn run_merger_naive(communities: Vec<Community>, cfg: &MergerConfig) -> Vec<Community> {
    let mut pool: Vec<Option<Community>> = communities.into_iter().map(Some).collect();
    let mut version = alloc::vec![0u32; pool.len()];
    let mut heap: BinaryHeap<Entry> = BinaryHeap::new();

    let push =
        |heap: &mut BinaryHeap<Entry>, pool: &[Option<Community>], version: &[u32], i: usize, j: usize| {
            let sim = Similarity::suppressed(pool[i].as_ref().unwrap(), pool[j].as_ref().unwrap(), cfg.t_f0);
            if !sim.is_zero() {
                let (a, b) = (i.min(j), i.max(j));
                heap.push((sim, Reverse((a as u32, b as u32)), version[a], version[b]));
            }
        };

    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            push(&mut heap, &pool, &version, i, j);
        }
    }

    while let Some((sim, Reverse((a, b)), va, vb)) = heap.pop() {
        let (a, b) = (a as usize, b as usize);
        if pool[a].is_none() || pool[b].is_none() || version[a] != va || version[b] != vb {
            continue;
        }
        if !sim.exceeds(cfg.t_fs) {
            break;
        }
        let dropped = pool[b].take().unwrap();
        let kept = pool[a].take().unwrap();
        pool[a] = Some(merge(&kept, &dropped));
        version[a] += 1;
        for other in 0..pool.len() {
            if other != a && pool[other].is_some() {
                push(&mut heap, &pool, &version, a, other);
            }
        }
    }
    pool.into_iter().flatten().collect()
}
