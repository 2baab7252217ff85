//! Covering numbers by open kernel balls.

use serde::Serialize;

use crate::energy::normalize_subset;
use crate::error::{Error, Result};
use crate::space::{FiniteKernelSpace, NormSpec};

/// Default node budget of the exact search.
pub const DEFAULT_COVER_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringResult {
    pub t: f64,
    /// Number of balls, `None` when some point of `L` lies in no ball.
    pub n: Option<usize>,
    /// Centres of the balls, as point indices.
    pub centers: Vec<usize>,
    /// True when `n` is proven minimal.
    pub exact: bool,
    /// True when exact mode ran out of budget and returned the greedy cover.
    pub fell_back: bool,
    pub nodes: u64,
}

impl CoveringResult {
    pub fn is_infinite(&self) -> bool {
        self.n.is_none()
    }
}

#[derive(Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn empty(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)] }
    }

    fn full(len: usize) -> Self {
        let mut s = BitSet::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn overlap(&self, other: &BitSet) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn remove_all(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    fn intersect(&self, other: &BitSet) -> BitSet {
        BitSet { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn first(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
}

/// Set-cover instance: `sets[j]` is the part of the universe covered by
/// candidate `j`.
struct Instance {
    universe: usize,
    sets: Vec<BitSet>,
}

/// Outcome of a bounded search for a cover smaller than a given size.
struct Search {
    /// Smallest cover found below the bound.
    best: Option<Vec<usize>>,
    /// False when the node budget stopped the search early.
    complete: bool,
    nodes: u64,
}

impl Instance {
    /// Candidates that every cover must contain because they are the only
    /// ones reaching some element. Returns those picks and the elements they
    /// leave uncovered, or `None` when some element is unreachable.
    fn forced(&self) -> Option<(Vec<usize>, BitSet)> {
        let mut uncovered = BitSet::full(self.universe);
        let mut picks = Vec::new();
        let mut reach: Vec<Vec<usize>> = vec![Vec::new(); self.universe];
        for (j, s) in self.sets.iter().enumerate() {
            for x in s.iter() {
                reach[x].push(j);
            }
        }
        if reach.iter().any(|r| r.is_empty()) {
            return None;
        }
        let mut picked = vec![false; self.sets.len()];
        for x in 0..self.universe {
            if uncovered.contains(x) && reach[x].len() == 1 {
                let j = reach[x][0];
                if !picked[j] {
                    picked[j] = true;
                    picks.push(j);
                    uncovered.remove_all(&self.sets[j]);
                }
            }
        }
        picks.sort_unstable();
        Some((picks, uncovered))
    }

    /// Greedy completion of a partial cover: repeatedly the candidate
    /// covering the most uncovered elements, lowest index on ties.
    fn greedy(&self, mut picks: Vec<usize>, mut uncovered: BitSet) -> Vec<usize> {
        while !uncovered.is_empty() {
            let (j, _) = self
                .sets
                .iter()
                .enumerate()
                .map(|(j, s)| (j, s.overlap(&uncovered)))
                .fold((usize::MAX, 0), |acc, (j, c)| if c > acc.1 { (j, c) } else { acc });
            picks.push(j);
            uncovered.remove_all(&self.sets[j]);
        }
        picks
    }

    /// Branch and bound for a cover of `uncovered` using fewer than `bound`
    /// extra candidates.
    fn search(&self, uncovered: &BitSet, bound: usize, budget: u64) -> Search {
        // Reduce to candidates not dominated on the residual universe.
        let restricted: Vec<(usize, BitSet)> = self
            .sets
            .iter()
            .enumerate()
            .map(|(j, s)| (j, s.intersect(uncovered)))
            .filter(|(_, s)| !s.is_empty())
            .collect();
        let mut keep: Vec<(usize, BitSet)> = Vec::new();
        for (a, (ja, sa)) in restricted.iter().enumerate() {
            let dominated = restricted.iter().enumerate().any(|(b, (_, sb))| {
                b != a && sa.is_subset(sb) && (sa != sb || b < a)
            });
            if !dominated {
                keep.push((*ja, sa.clone()));
            }
        }
        let mut reach: Vec<Vec<usize>> = vec![Vec::new(); self.universe];
        for (k, (_, s)) in keep.iter().enumerate() {
            for x in s.iter() {
                reach[x].push(k);
            }
        }
        let mut state = Bnb { sets: &keep, reach: &reach, best: None, bound, nodes: 0, budget, aborted: false };
        let mut chosen = Vec::new();
        state.recurse(uncovered.clone(), &mut chosen);
        let best = state.best.map(|b| {
            let mut v: Vec<usize> = b.iter().map(|&k| keep[k].0).collect();
            v.sort_unstable();
            v
        });
        Search { best, complete: !state.aborted, nodes: state.nodes }
    }
}

struct Bnb<'a> {
    sets: &'a [(usize, BitSet)],
    reach: &'a [Vec<usize>],
    best: Option<Vec<usize>>,
    /// Only covers with fewer than `bound` sets are of interest.
    bound: usize,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Bnb<'_> {
    fn recurse(&mut self, uncovered: BitSet, chosen: &mut Vec<usize>) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let Some(_) = uncovered.first() else {
            self.bound = chosen.len();
            self.best = Some(chosen.clone());
            return;
        };
        if chosen.len() + 1 >= self.bound {
            return;
        }
        let remaining = uncovered.count();
        let widest = self.sets.iter().map(|(_, s)| s.overlap(&uncovered)).max().unwrap_or(0);
        if widest == 0 || chosen.len() + remaining.div_ceil(widest) >= self.bound {
            return;
        }
        // Branch on the uncovered element with the fewest candidates.
        let pivot = uncovered
            .iter()
            .min_by_key(|&x| (self.reach[x].iter().filter(|&&k| self.sets[k].1.overlap(&uncovered) > 0).count(), x))
            .expect("uncovered is non-empty");
        let mut options: Vec<(usize, usize)> =
            self.reach[pivot].iter().map(|&k| (k, self.sets[k].1.overlap(&uncovered))).collect();
        options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (k, _) in options {
            let mut next = uncovered.clone();
            next.remove_all(&self.sets[k].1);
            chosen.push(k);
            self.recurse(next, chosen);
            chosen.pop();
            if self.aborted {
                return;
            }
        }
    }
}

/// Answer of a covering computation on an abstract instance, in positions
/// of the candidate list.
struct Cover {
    picks: Option<Vec<usize>>,
    exact: bool,
    fell_back: bool,
    nodes: u64,
}

fn solve(inst: &Instance, mode: CoverMode, budget: u64) -> Cover {
    let Some((forced, uncovered)) = inst.forced() else {
        return Cover { picks: None, exact: true, fell_back: false, nodes: 0 };
    };
    let greedy = inst.greedy(forced.clone(), uncovered.clone());
    if mode == CoverMode::Greedy || uncovered.is_empty() {
        let exact = uncovered.is_empty();
        return Cover { picks: Some(greedy), exact, fell_back: false, nodes: 0 };
    }
    let extra_bound = greedy.len() - forced.len();
    let Search { best, complete, nodes } = inst.search(&uncovered, extra_bound, budget);
    match (best, complete) {
        (Some(extra), _) if complete => {
            Cover { picks: Some(forced.into_iter().chain(extra).collect()), exact: true, fell_back: false, nodes }
        }
        (None, true) => Cover { picks: Some(greedy), exact: true, fell_back: false, nodes },
        _ => Cover { picks: Some(greedy), exact: false, fell_back: true, nodes },
    }
}

/// Whether some cover uses at most `n` sets: `Some(true)` with a witness,
/// `Some(false)` when proven impossible, `None` when the budget ran out.
fn decide(inst: &Instance, n: usize, budget: u64) -> Option<bool> {
    let Some((forced, uncovered)) = inst.forced() else {
        return Some(false);
    };
    if forced.len() > n {
        return Some(false);
    }
    if inst.greedy(forced.clone(), uncovered.clone()).len() <= n {
        return Some(true);
    }
    let Search { best, complete, .. } = inst.search(&uncovered, n - forced.len() + 1, budget);
    match (best, complete) {
        (Some(_), _) => Some(true),
        (None, true) => Some(false),
        (None, false) => None,
    }
}

fn kernel_instance(space: &FiniteKernelSpace, h: &[usize], l: &[usize], t: f64) -> Instance {
    let sets = h
        .iter()
        .map(|&y| {
            let row = space.row(y);
            let mut s = BitSet::empty(l.len());
            for (pos, &x) in l.iter().enumerate() {
                if row[x] < t {
                    s.insert(pos);
                }
            }
            s
        })
        .collect();
    Instance { universe: l.len(), sets }
}

fn check_radius(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Input(format!("covering radius must be positive, got {t}")))
    }
}

/// `N(t, H, L)`: the least number of open balls `{x : k(x, y) < t}` with
/// centres `y` in `H` whose union contains `L`.
pub fn covering_number(space: &FiniteKernelSpace, h: &[usize], l: &[usize], t: f64, mode: CoverMode) -> Result<CoveringResult> {
    covering_number_with_budget(space, h, l, t, mode, DEFAULT_COVER_BUDGET)
}

pub fn covering_number_with_budget(
    space: &FiniteKernelSpace,
    h: &[usize],
    l: &[usize],
    t: f64,
    mode: CoverMode,
    budget: u64,
) -> Result<CoveringResult> {
    check_radius(t)?;
    let h = normalize_subset(space, h, "H")?;
    let l = normalize_subset(space, l, "L")?;
    let inst = kernel_instance(space, &h, &l, t);
    let cover = solve(&inst, mode, budget);
    let centers: Vec<usize> = cover.picks.as_ref().map(|p| p.iter().map(|&j| h[j]).collect()).unwrap_or_default();
    if cover.picks.is_some() {
        for &x in &l {
            if !centers.iter().any(|&y| space.k(x, y) < t) {
                return Err(Error::Inconsistent(format!("point {x} is not covered")));
            }
        }
    }
    Ok(CoveringResult {
        t,
        n: cover.picks.map(|p| p.len()),
        centers,
        exact: cover.exact,
        fell_back: cover.fell_back,
        nodes: cover.nodes,
    })
}

/// Covering number of a point cloud by its own balls, without building the
/// dense kernel matrix.
pub fn covering_number_of_points(points: &[Vec<f64>], norm: &NormSpec, t: f64, mode: CoverMode) -> Result<CoveringResult> {
    check_radius(t)?;
    if points.is_empty() {
        return Err(Error::EmptySubset("points".into()));
    }
    if matches!(norm, NormSpec::ExplicitMatrix) {
        return Err(Error::Unsupported("an explicit kernel needs a kernel space".into()));
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
    }
    let sets: Vec<BitSet> = points
        .iter()
        .map(|y| {
            let mut s = BitSet::empty(points.len());
            for (i, x) in points.iter().enumerate() {
                if norm.eval_unchecked(x, y) < t {
                    s.insert(i);
                }
            }
            s
        })
        .collect();
    let inst = Instance { universe: points.len(), sets };
    let cover = solve(&inst, mode, DEFAULT_COVER_BUDGET);
    let centers = cover.picks.clone().unwrap_or_default();
    Ok(CoveringResult { t, n: cover.picks.map(|p| p.len()), centers, exact: cover.exact, fell_back: cover.fell_back, nodes: cover.nodes })
}

/// Largest kernel value `t` between `H` and `L` at which `N(t, H, L) > n` is
/// proven, or 0 when there is none.
///
/// `N` is a nonincreasing step function of `t` that only changes just above
/// kernel values, so scanning those values finds the supremum of
/// `{t : N(t) > n}`. Levels where the exact search runs out of budget are
/// skipped, which can only lower the result.
pub fn entropy_lower_bound(space: &FiniteKernelSpace, h: &[usize], l: &[usize], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Input("n must be at least 1".into()));
    }
    let h = normalize_subset(space, h, "H")?;
    let l = normalize_subset(space, l, "L")?;
    let mut levels: Vec<f64> =
        h.iter().flat_map(|&y| l.iter().map(move |&x| space.k(x, y))).filter(|&v| v > 0.0).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    for t in levels {
        let inst = kernel_instance(space, &h, &l, t);
        if decide(&inst, n, DEFAULT_COVER_BUDGET) == Some(false) {
            return Ok(t);
        }
    }
    Ok(0.0)
}
