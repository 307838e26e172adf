use core::cmp::Ordering;

use alloc::vec::Vec;

use crate::graph::VertexId;

/// A scored member set. `S` (the occurrence score of a member) counts how many
/// of the `l` merged partial communities contain it; absent vertices have
/// `S = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    /// Sorted by vertex id; every score is in `1..=l`.
    members: Vec<(VertexId, u32)>,
    l: u32,
    w: u64,
    /// Sum over ordered pairs of distinct constituent partials `(x, y)` of
    /// `|x ∩ y|`, which equals `w (l - 1) g`.
    overlap_mass: u64,
}

impl Community {
    /// A partial community: unit scores and `l = 1`.
    pub fn from_partial(members: &[VertexId]) -> Self {
        let mut ids = members.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let w = ids.len() as u64;
        Community {
            members: ids.into_iter().map(|v| (v, 1)).collect(),
            l: 1,
            w,
            overlap_mass: 0,
        }
    }

    /// Rebuilds a community from its recorded state. Returns `None` when the
    /// scores violate `1 <= S <= l` or repeat a vertex.
    pub fn from_parts(mut members: Vec<(VertexId, u32)>, l: u32, overlap_mass: u64) -> Option<Self> {
        members.sort_unstable();
        if l == 0
            || members.windows(2).any(|w| w[0].0 == w[1].0)
            || members.iter().any(|&(_, s)| s == 0 || s > l)
        {
            return None;
        }
        let w = members.iter().map(|&(_, s)| s as u64).sum();
        Some(Community {
            members,
            l,
            w,
            overlap_mass,
        })
    }

    pub fn members(&self) -> &[(VertexId, u32)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn score(&self, v: VertexId) -> u32 {
        self.members
            .binary_search_by_key(&v, |&(id, _)| id)
            .map_or(0, |i| self.members[i].1)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search_by_key(&v, |&(id, _)| id).is_ok()
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn w(&self) -> u64 {
        self.w
    }

    pub fn overlap_mass(&self) -> u64 {
        self.overlap_mass
    }

    /// Average overlap portion between the constituent partials; 1 for a
    /// partial.
    pub fn g(&self) -> f64 {
        if self.l == 1 {
            1.0
        } else {
            self.overlap_mass as f64 / (self.w as f64 * (self.l - 1) as f64)
        }
    }
}

/// `sum_i S_{i,a} S_{i,b}`, walking the smaller member list.
pub fn score_dot(a: &Community, b: &Community) -> u64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let large = &large.members;
    let mut lo = 0;
    let mut sum = 0u64;
    for &(v, s) in &small.members {
        // Both lists are sorted, so the search window only moves forward.
        match large[lo..].binary_search_by_key(&v, |&(id, _)| id) {
            Ok(i) => {
                sum += s as u64 * large[lo + i].1 as u64;
                lo += i + 1;
            }
            Err(i) => lo += i,
        }
        if lo == large.len() {
            break;
        }
    }
    sum
}

/// Member-wise score sum; `l` and `w` add, and the overlap mass gains the
/// cross term `2 sum_i S_{i,a} S_{i,b}`.
pub fn merge(a: &Community, b: &Community) -> Community {
    let mut members = Vec::with_capacity(a.len() + b.len());
    let (x, y) = (&a.members, &b.members);
    let (mut i, mut j) = (0, 0);
    let mut dot = 0u64;
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            Ordering::Less => {
                members.push(x[i]);
                i += 1;
            }
            Ordering::Greater => {
                members.push(y[j]);
                j += 1;
            }
            Ordering::Equal => {
                dot += x[i].1 as u64 * y[j].1 as u64;
                members.push((x[i].0, x[i].1 + y[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    members.extend_from_slice(&x[i..]);
    members.extend_from_slice(&y[j..]);
    Community {
        members,
        l: a.l + b.l,
        w: a.w + b.w,
        overlap_mass: a.overlap_mass + b.overlap_mass + 2 * dot,
    }
}

/// Asymmetric overlap `f(a, b) = sum_i (S_{i,b} / l_b)(S_{i,a} / w_a)`: how far
/// the core of `a` lies inside the core of `b`.
pub fn f_asym(a: &Community, b: &Community) -> f64 {
    score_dot(a, b) as f64 / (a.w as f64 * b.l as f64)
}

/// The symmetric merger similarity as an exact fraction, so that ties are
/// detected exactly and every caller orders pairs identically.
#[derive(Debug, Clone, Copy)]
pub struct Similarity {
    num: u64,
    den: u64,
}

impl Similarity {
    pub const ZERO: Similarity = Similarity { num: 0, den: 1 };

    /// Unsuppressed `f_s(a, b) = 2 sum_i S_{i,a} S_{i,b} / (w_a l_b + w_b l_a)`.
    pub fn raw(a: &Community, b: &Community) -> Self {
        Self::from_dot(a, b, score_dot(a, b))
    }

    fn from_dot(a: &Community, b: &Community, dot: u64) -> Self {
        Similarity {
            num: 2 * dot,
            den: a.w * b.l as u64 + b.w * a.l as u64,
        }
    }

    /// [`Similarity::raw`], forced to zero when the shared score mass per
    /// merged partial, `sum_i S_{i,a} S_{i,b} / max(l_a, l_b)`, is below
    /// `t_f0`. This suppresses mergers of small communities that share only
    /// one or two members.
    pub fn suppressed(a: &Community, b: &Community, t_f0: f64) -> Self {
        Self::with_dot(a, b, score_dot(a, b), t_f0)
    }

    /// [`Similarity::suppressed`] with `dot = score_dot(a, b)` already known.
    pub(crate) fn with_dot(a: &Community, b: &Community, dot: u64, t_f0: f64) -> Self {
        if (dot as f64) < t_f0 * a.l.max(b.l) as f64 {
            Self::ZERO
        } else {
            Self::from_dot(a, b, dot)
        }
    }

    pub fn value(self) -> f64 {
        if self.num == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Strictly above the merger threshold.
    pub fn exceeds(self, threshold: f64) -> bool {
        self.value() > threshold
    }
}

impl Ord for Similarity {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Similarity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Similarity {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Similarity {}

pub fn f_sym(a: &Community, b: &Community, t_f0: f64) -> f64 {
    Similarity::suppressed(a, b, t_f0).value()
}

pub fn g_value(c: &Community) -> f64 {
    c.g()
}
