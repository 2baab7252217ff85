//! Chebyshev constants by exhaustive enumeration of point multisets.
//!
//! For a configuration `W = (w_1, ..., w_n)` drawn from `H` with repetition,
//! the averaged kernel `(1/n) sum_i k(x, w_i)` is scanned over `x in L`.
//! `M_n` is the best worst case from below and `M̄_n` the best worst case from
//! above. Since the average does not depend on the order of the `w_i`, only
//! nondecreasing index sequences are visited.

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{game_value, normalize_subset, GameOptions, GameSolution};
use crate::error::{Error, Result};
use crate::measure::Interval;
use crate::space::FiniteKernelSpace;

/// Default cap on the number of multisets visited by one call.
pub const DEFAULT_ENUM_BUDGET: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    pub budget: u128,
    pub parallel: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { budget: DEFAULT_ENUM_BUDGET, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebnResult {
    pub n: usize,
    pub m_n: f64,
    pub m_bar_n: f64,
    /// Point indices (nondecreasing) attaining `m_n`.
    pub argmax_config: Vec<usize>,
    /// Point indices (nondecreasing) attaining `m_bar_n`.
    pub argmin_config: Vec<usize>,
}

impl ChebnResult {
    pub fn interval(&self) -> Interval {
        Interval::new(self.m_n, self.m_bar_n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitBracket {
    /// `max_{n <= n_max} M_n`, a lower bound for the limit of `M_n`.
    pub lower: f64,
    /// `min_{n <= n_max} M̄_n`, an upper bound for the limit of `M̄_n`.
    pub upper: f64,
    pub n_max: usize,
    /// Set once the bracket has been collapsed with the game oracle.
    pub exact: bool,
    pub levels: Vec<ChebnResult>,
}

/// `C(k + n - 1, n)`, the number of size-`n` multisets from `k` symbols,
/// saturating at `u128::MAX`.
pub fn multiset_count(k: usize, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        // acc * (k - 1 + i) / i stays integral at every step.
        match acc.checked_mul(k as u128 - 1 + i) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

/// Running best for one side of the search. Configurations are visited in
/// lexicographic order, so replacing only on strict improvement keeps the
/// lexicographically smallest optimum.
#[derive(Clone)]
struct Best {
    score: f64,
    config: Vec<usize>,
}

struct Search<'a> {
    /// `table[h][x] = k(L[x], H[h])`.
    table: &'a [Vec<f64>],
    n: usize,
    width: usize,
}

impl Search<'_> {
    /// Visits every nondecreasing sequence starting with `first`; returns the
    /// best (max of min-sum) and (min of max-sum) configurations as positions
    /// in `H`.
    fn run(&self, first: usize) -> (Best, Best) {
        let (n, w, k) = (self.n, self.width, self.table.len());
        let mut hi = Best { score: f64::NEG_INFINITY, config: Vec::new() };
        let mut lo = Best { score: f64::INFINITY, config: Vec::new() };
        // sums[d] holds the accumulated rows of the first d + 1 entries.
        let mut sums = vec![vec![0.0; w]; n];
        let mut seq = vec![first; n];
        sums[0].copy_from_slice(&self.table[first]);
        let mut depth = 0;
        loop {
            // Fill the remaining positions with the current value.
            while depth + 1 < n {
                depth += 1;
                seq[depth] = seq[depth - 1];
                let (prev, cur) = sums.split_at_mut(depth);
                for ((c, p), t) in cur[0].iter_mut().zip(&prev[depth - 1]).zip(&self.table[seq[depth]]) {
                    *c = p + t;
                }
            }
            let leaf = &sums[n - 1];
            let (mn, mx) = leaf.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            if mn > hi.score {
                hi = Best { score: mn, config: seq.clone() };
            }
            if mx < lo.score {
                lo = Best { score: mx, config: seq.clone() };
            }
            // Advance to the next nondecreasing sequence, never touching the
            // first entry.
            loop {
                if depth == 0 {
                    return (hi, lo);
                }
                if seq[depth] + 1 < k {
                    seq[depth] += 1;
                    let (prev, cur) = sums.split_at_mut(depth);
                    for ((c, p), t) in cur[0].iter_mut().zip(&prev[depth - 1]).zip(&self.table[seq[depth]]) {
                        *c = p + t;
                    }
                    break;
                }
                depth -= 1;
            }
        }
    }
}

/// `M_n(H, L)` and `M̄_n(H, L)` with witness configurations.
pub fn cheb_n(space: &FiniteKernelSpace, h: &[usize], l: &[usize], n: usize, opts: &EnumOptions) -> Result<ChebnResult> {
    if n == 0 {
        return Err(Error::Input("configuration size n must be at least 1".into()));
    }
    let h = normalize_subset(space, h, "H")?;
    let l = normalize_subset(space, l, "L")?;
    let required = multiset_count(h.len(), n);
    if required > opts.budget {
        return Err(Error::BudgetExceeded { required, budget: opts.budget });
    }
    let table: Vec<Vec<f64>> = h
        .iter()
        .map(|&w| {
            let row = space.row(w);
            l.iter().map(|&x| row[x]).collect()
        })
        .collect();
    let search = Search { table: &table, n, width: l.len() };
    let partial: Vec<(Best, Best)> = if opts.parallel {
        (0..h.len()).into_par_iter().map(|f| search.run(f)).collect()
    } else {
        (0..h.len()).map(|f| search.run(f)).collect()
    };
    let mut iter = partial.into_iter();
    let (mut hi, mut lo) = iter.next().expect("H is non-empty");
    for (h_part, l_part) in iter {
        if h_part.score > hi.score {
            hi = h_part;
        }
        if l_part.score < lo.score {
            lo = l_part;
        }
    }
    let nf = n as f64;
    Ok(ChebnResult {
        n,
        m_n: hi.score / nf,
        m_bar_n: lo.score / nf,
        argmax_config: hi.config.iter().map(|&p| h[p]).collect(),
        argmin_config: lo.config.iter().map(|&p| h[p]).collect(),
    })
}

/// `R_n(H, L) = [M_n, M̄_n]`, empty when `M_n > M̄_n`.
pub fn rendezvous_set_n(space: &FiniteKernelSpace, h: &[usize], l: &[usize], n: usize, opts: &EnumOptions) -> Result<Interval> {
    cheb_n(space, h, l, n, opts).map(|r| r.interval())
}

/// Running extrema of `M_n` and `M̄_n` for `n = 1..=n_max`.
pub fn limit_bracket(space: &FiniteKernelSpace, h: &[usize], l: &[usize], n_max: usize, opts: &EnumOptions) -> Result<LimitBracket> {
    if n_max == 0 {
        return Err(Error::Input("n_max must be at least 1".into()));
    }
    let levels = (1..=n_max).map(|n| cheb_n(space, h, l, n, opts)).collect::<Result<Vec<_>>>()?;
    let lower = levels.iter().map(|r| r.m_n).fold(f64::NEG_INFINITY, f64::max);
    let upper = levels.iter().map(|r| r.m_bar_n).fold(f64::INFINITY, f64::min);
    Ok(LimitBracket { lower, upper, n_max, exact: false, levels })
}

/// Rendezvous interval of a finite space, cross-checked between the two
/// oracles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RendezvousInterval {
    /// A single point when `exact`, otherwise the enumeration bracket.
    pub interval: Interval,
    pub exact: bool,
    pub bracket: LimitBracket,
    pub game: GameSolution,
}

/// Combines [`limit_bracket`] and [`game_value`].
///
/// Every equal-weight configuration is a measure, so the enumeration bracket
/// always contains the game interval; a violation beyond `tol` is reported
/// as an inconsistency. For `H = L` the game value is the answer and the
/// result is a single point. Otherwise only the bracket is claimed.
pub fn rendezvous_interval(
    space: &FiniteKernelSpace,
    h: &[usize],
    l: &[usize],
    n_max: usize,
    tol: f64,
    opts: &EnumOptions,
) -> Result<RendezvousInterval> {
    let mut bracket = limit_bracket(space, h, l, n_max, opts)?;
    let game = game_value(space, h, l, &GameOptions::with_tol(tol))?;
    if bracket.lower > game.value_lo + tol || bracket.upper < game.value_hi - tol {
        return Err(Error::Inconsistent(format!(
            "enumeration bracket [{}, {}] does not contain the game interval [{}, {}]",
            bracket.lower, bracket.upper, game.value_lo, game.value_hi
        )));
    }
    if game.diagonal {
        if !game.converged {
            return Err(Error::Inconsistent(format!("game solver left a gap of {}", game.gap)));
        }
        bracket.exact = true;
        Ok(RendezvousInterval { interval: Interval::point(game.value()), exact: true, bracket, game })
    } else {
        Ok(RendezvousInterval { interval: Interval::new(bracket.lower, bracket.upper), exact: false, bracket, game })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormSpec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn two_point() -> FiniteKernelSpace {
        FiniteKernelSpace::from_kernel(vec![vec![0.0, 1.0], vec![1.0, 0.0]], BTreeMap::new()).unwrap()
    }

    fn triangle() -> FiniteKernelSpace {
        let h = 3f64.sqrt() / 2.0;
        FiniteKernelSpace::from_points(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]],
            NormSpec::lp(2.0).unwrap(),
            BTreeMap::new(),
        )
        .unwrap()
    }

    fn line3() -> FiniteKernelSpace {
        FiniteKernelSpace::from_points(vec![vec![0.0], vec![1.0], vec![2.0]], NormSpec::lp(1.0).unwrap(), BTreeMap::new())
            .unwrap()
    }

    /// Oracle: every tuple in `H^n`, lexicographic, first optimum kept after
    /// sorting the tuple.
    fn brute(space: &FiniteKernelSpace, h: &[usize], l: &[usize], n: usize) -> (f64, f64) {
        let mut best = (f64::NEG_INFINITY, f64::INFINITY);
        let total = h.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let cfg: Vec<usize> = (0..n)
                .map(|_| {
                    let v = h[c % h.len()];
                    c /= h.len();
                    v
                })
                .collect();
            let avgs: Vec<f64> = l.iter().map(|&x| cfg.iter().map(|&w| space.k(x, w)).sum::<f64>() / n as f64).collect();
            let mn = avgs.iter().copied().fold(f64::INFINITY, f64::min);
            let mx = avgs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            best = (best.0.max(mn), best.1.min(mx));
        }
        best
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multiset_count(3, 3), 10);
        assert_eq!(multiset_count(10, 5), 2002);
        assert_eq!(multiset_count(1, 7), 1);
        assert_eq!(multiset_count(5, 1), 5);
        assert_eq!(multiset_count(1000, 200), u128::MAX);
    }

    #[test]
    fn cheb_examples() {
        let opts = EnumOptions::default();
        let s = two_point();
        let r = cheb_n(&s, &[0, 1], &[0, 1], 2, &opts).unwrap();
        assert_eq!((r.m_n, r.m_bar_n), (0.5, 0.5));
        assert_eq!(r.argmax_config, vec![0, 1]);
        let r = cheb_n(&s, &[0, 1], &[0, 1], 1, &opts).unwrap();
        assert_eq!((r.m_n, r.m_bar_n), (0.0, 1.0));
        assert_eq!(r.argmin_config.len(), 1);

        let t = triangle();
        let r = cheb_n(&t, &[0, 1, 2], &[0, 1, 2], 3, &opts).unwrap();
        assert_abs_diff_eq!(r.m_n, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.m_bar_n, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(r.argmax_config, vec![0, 1, 2]);

        assert_eq!(rendezvous_set_n(&s, &[0, 1], &[0, 1], 2, &opts).unwrap(), Interval::point(0.5));
        assert_eq!(rendezvous_set_n(&s, &[0, 1], &[0, 1], 1, &opts).unwrap(), Interval::new(0.0, 1.0));
        assert_eq!(rendezvous_set_n(&s, &[0], &[1], 1, &opts).unwrap(), Interval::point(1.0));
    }

    #[test]
    fn budget_and_input_errors() {
        let s = triangle();
        let tight = EnumOptions { budget: 9, parallel: true };
        assert_eq!(
            cheb_n(&s, &[0, 1, 2], &[0, 1, 2], 3, &tight),
            Err(Error::BudgetExceeded { required: 10, budget: 9 })
        );
        assert!(cheb_n(&s, &[], &[0], 1, &EnumOptions::default()).is_err());
        assert!(cheb_n(&s, &[0], &[0], 0, &EnumOptions::default()).is_err());
    }

    #[test]
    fn bracket_examples() {
        let opts = EnumOptions::default();
        let b = limit_bracket(&two_point(), &[0, 1], &[0, 1], 2, &opts).unwrap();
        assert_eq!((b.lower, b.upper, b.exact), (0.5, 0.5, false));
        let line = line3();
        let b = limit_bracket(&line, &[0, 1, 2], &[0, 1, 2], 4, &opts).unwrap();
        assert_abs_diff_eq!(b.lower, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.upper, 1.0, epsilon = 1e-15);
        let t = triangle();
        let b = limit_bracket(&t, &[0, 1, 2], &[0, 1, 2], 3, &opts).unwrap();
        assert_abs_diff_eq!(b.lower, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.upper, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn rendezvous_examples() {
        let opts = EnumOptions::default();
        for (space, v) in [(triangle(), 2.0 / 3.0), (two_point(), 0.5), (line3(), 1.0)] {
            let all = space.all_indices();
            let r = rendezvous_interval(&space, &all, &all, 4, 1e-9, &opts).unwrap();
            assert!(r.exact && r.bracket.exact);
            assert_abs_diff_eq!(r.interval.lo, v, epsilon = 1e-9);
            assert_eq!(r.interval.width(), 0.0);
        }
        let line = line3();
        let r = rendezvous_interval(&line, &[0, 2], &[0, 1, 2], 3, 1e-9, &opts).unwrap();
        assert!(!r.exact);
        assert!(r.interval.lo <= r.game.value_lo + 1e-9 && r.interval.hi >= r.game.value_hi - 1e-9);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let pts: Vec<Vec<f64>> = (0..9).map(|i| vec![(i * 7 % 9) as f64, (i * i % 5) as f64]).collect();
        let s = FiniteKernelSpace::from_points(pts, NormSpec::lp(2.0).unwrap(), BTreeMap::new()).unwrap();
        let all = s.all_indices();
        for n in 1..=4 {
            let a = cheb_n(&s, &all, &all, n, &EnumOptions { parallel: true, ..Default::default() }).unwrap();
            let b = cheb_n(&s, &all, &all, n, &EnumOptions { parallel: false, ..Default::default() }).unwrap();
            assert_eq!(a, b);
        }
    }

    fn kernel_strategy() -> impl Strategy<Value = (usize, Vec<f64>)> {
        (1usize..=5).prop_flat_map(|k| (Just(k), prop::collection::vec(0.0..1.0f64, k * k)))
    }

    fn symmetric(k: usize, raw: &[f64]) -> FiniteKernelSpace {
        let m: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 0.0 } else { raw[i.min(j) * k + i.max(j)] }).collect())
            .collect();
        FiniteKernelSpace::from_kernel(m, BTreeMap::new()).unwrap()
    }

    proptest! {
        #[test]
        fn matches_tuple_enumeration((k, raw) in kernel_strategy(), n in 1usize..=3, split in 0usize..5) {
            let s = symmetric(k, &raw);
            let all = s.all_indices();
            let h: Vec<usize> = all.iter().copied().filter(|&i| i <= split.min(k - 1)).collect();
            let r = cheb_n(&s, &h, &all, n, &EnumOptions::default()).unwrap();
            let (mn, mx) = brute(&s, &h, &all, n);
            prop_assert!((r.m_n - mn).abs() <= 1e-12);
            prop_assert!((r.m_bar_n - mx).abs() <= 1e-12);
            prop_assert_eq!(r.argmax_config.len(), n);
            prop_assert!(r.argmax_config.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn nonempty_when_h_inside_l((k, raw) in kernel_strategy(), n in 1usize..=3) {
            let s = symmetric(k, &raw);
            let all = s.all_indices();
            let h: Vec<usize> = all.iter().copied().step_by(2).collect();
            let r = cheb_n(&s, &h, &all, n, &EnumOptions::default()).unwrap();
            prop_assert!(r.m_n <= r.m_bar_n + 1e-12);
        }

        #[test]
        fn relabeling_leaves_values_unchanged((k, raw) in kernel_strategy(), n in 1usize..=3, rot in 0usize..5) {
            let s = symmetric(k, &raw);
            let perm: Vec<usize> = (0..k).map(|i| (i + rot) % k).collect();
            let t = s.relabeled(&perm).unwrap();
            let all = s.all_indices();
            let a = cheb_n(&s, &all, &all, n, &EnumOptions::default()).unwrap();
            let b = cheb_n(&t, &all, &all, n, &EnumOptions::default()).unwrap();
            prop_assert!((a.m_n - b.m_n).abs() <= 1e-12 && (a.m_bar_n - b.m_bar_n).abs() <= 1e-12);
        }
    }
}
