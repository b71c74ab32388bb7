//! Non-linear detection on the preprocessed model `y = H·s + z`.
//!
//! [`jml`] searches all of `ωᴺ`. [`lgsd`] is the list-based group-wise search
//! detector: the symbol vector is split into index groups, each row of
//! `(y, H)` feeds a branch list estimator that searches one group at a time
//! with the other groups cancelled, and a global list optimiser refines the
//! merged branch lists column by column with the full metric.
//!
//! Complexity is counted in real squarings: one complex squared magnitude
//! costs 2, so a full length-N metric costs `2N` and a single-row metric 2.

mod list;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::rngs::SmallRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub use list::{Candidate, CandidateList};

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::numerics::{self, CMatrix};

/// Default cap on the number of vectors [`jml`] may visit.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 24;

/// Running count of real squaring operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SquaringCounter(u64);

impl SquaringCounter {
    pub fn new() -> Self {
        Self(0)
    }

    pub fn get(&self) -> u64 {
        self.0
    }

    /// One full metric over `n` complex entries.
    #[inline]
    pub fn charge_full(&mut self, n: usize) {
        self.0 += 2 * n as u64;
    }

    /// One single-row metric.
    #[inline]
    pub fn charge_row(&mut self) {
        self.0 += 2;
    }

    #[inline]
    fn charge(&mut self, squarings: u64) {
        self.0 += squarings;
    }
}

/// Hard decision of a detector.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Detected point index per satellite.
    pub s_hat: Vec<u8>,
    /// `‖y − H·ŝ‖²`.
    pub metric: f64,
    pub squarings: u64,
}

/// Metric used inside the branch list estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchMetric {
    /// `|y(n) − H(n)·s|²` on the branch's own row.
    #[default]
    Row,
    /// `‖y − H·s‖²`. Only useful to reduce LGSD to JML in tests.
    Full,
}

/// Parameters of the list-based group-wise search detector.
#[derive(Debug, Clone, PartialEq)]
pub struct LgsdConfig {
    /// Output list length `L`.
    pub list_len: usize,
    /// Overall iterations `Q`.
    pub overall_iters: usize,
    /// Branch list estimator iterations `Θ`.
    pub ble_iters: usize,
    /// Global list optimiser iterations `Φ`.
    pub glo_iters: usize,
    /// Sizes of the index groups; they must sum to the number of satellites.
    pub group_sizes: Vec<usize>,
    /// Seed of the group allocation in overall iterations after the first.
    pub rng_seed: u64,
    pub branch_metric: BranchMetric,
}

impl LgsdConfig {
    /// `L = 4N`, groups of 3 and `N − 3` (a single group when `N ≤ 3`).
    pub fn standard(num_satellites: usize, overall: usize, ble: usize, glo: usize) -> Self {
        let group_sizes = if num_satellites > 3 {
            vec![3, num_satellites - 3]
        } else {
            vec![num_satellites]
        };
        Self {
            list_len: 4 * num_satellites,
            overall_iters: overall,
            ble_iters: ble,
            glo_iters: glo,
            group_sizes,
            rng_seed: 0,
            branch_metric: BranchMetric::Row,
        }
    }

    /// `(Q/Θ/Φ)` label.
    pub fn iterations(&self) -> (usize, usize, usize) {
        (self.overall_iters, self.ble_iters, self.glo_iters)
    }

    pub fn validate(&self, num_satellites: usize) -> Result<()> {
        if self.list_len == 0 {
            return Err(Error::Config("list length must be at least 1"));
        }
        if self.overall_iters == 0 || self.ble_iters == 0 || self.glo_iters == 0 {
            return Err(Error::Config("iteration counts must be at least 1"));
        }
        if self.group_sizes.iter().any(|&g| g == 0) {
            return Err(Error::Config("groups must be nonempty"));
        }
        if self.group_sizes.iter().sum::<usize>() != num_satellites {
            return Err(Error::Config("group sizes must sum to N"));
        }
        Ok(())
    }
}

/// Precomputed products `H[n][k]·ω_v` shared by every search on one `H`.
#[derive(Debug, Clone)]
pub struct SearchContext<'a> {
    h: &'a CMatrix,
    constellation: &'a Constellation,
    n: usize,
    q: usize,
    // prod[(n * N + k) * q + v] = H[n][k] * ω_v
    prod: Vec<Complex64>,
    pinv: CMatrix,
    // Rows of H with a nonzero entry; the others add a constant to every
    // candidate's metric.
    active: Vec<usize>,
}

impl<'a> SearchContext<'a> {
    pub fn new(h: &'a CMatrix, constellation: &'a Constellation) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::NotSquare {
                rows: h.rows(),
                cols: h.cols(),
            });
        }
        let n = h.rows();
        let q = constellation.size();
        let mut prod = Vec::with_capacity(n * n * q);
        for row in 0..n {
            for k in 0..n {
                for p in constellation.points() {
                    prod.push(h[(row, k)] * p);
                }
            }
        }
        // H† = (HᴴH)† Hᴴ
        let s = numerics::pinv_sqrt(&(&h.adjoint() * h))?;
        let pinv = &(&s * &s) * &h.adjoint();
        let active = (0..n)
            .filter(|&r| h.row(r).iter().any(|z| z.norm_sqr() > 0.0))
            .collect();
        Ok(Self {
            h,
            constellation,
            n,
            q,
            prod,
            pinv,
            active,
        })
    }

    pub fn num_satellites(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &CMatrix {
        self.h
    }

    pub fn constellation(&self) -> &Constellation {
        self.constellation
    }

    #[inline]
    fn p(&self, row: usize, col: usize, v: u8) -> Complex64 {
        self.prod[(row * self.n + col) * self.q + v as usize]
    }

    /// `y − H·s`.
    fn residual(&self, y: &[Complex64], s: &[u8]) -> Vec<Complex64> {
        (0..self.n)
            .map(|row| y[row] - (0..self.n).map(|k| self.p(row, k, s[k])).sum::<Complex64>())
            .collect()
    }

    /// `‖y − H·s‖²`, computed the same way for every caller so that a vector
    /// always gets a bit-identical metric.
    pub fn full_metric(&self, y: &[Complex64], s: &[u8]) -> f64 {
        numerics::norm_sqr(&self.residual(y, s))
    }

    fn row_metric(&self, y: &[Complex64], row: usize, s: &[u8]) -> f64 {
        (y[row] - (0..self.n).map(|k| self.p(row, k, s[k])).sum::<Complex64>()).norm_sqr()
    }

    fn branch_metric(
        &self,
        y: &[Complex64],
        row: usize,
        s: &[u8],
        metric: BranchMetric,
        counter: &mut SquaringCounter,
    ) -> f64 {
        match metric {
            BranchMetric::Row => {
                counter.charge_row();
                self.row_metric(y, row, s)
            }
            BranchMetric::Full => {
                counter.charge_full(self.n);
                self.full_metric(y, s)
            }
        }
    }

    /// Exhaustive search over `ωᴺ`; ties go to the lexicographically
    /// smallest index vector.
    pub fn jml(&self, y: &[Complex64], budget: u64) -> Result<DetectionResult> {
        let n = self.n;
        let q = self.q;
        let size = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > budget as u128 {
            return Err(Error::SearchTooLarge { size, budget });
        }
        check_len(y, n)?;

        // Depth-first walk in lexicographic order with partial residuals:
        // partial[l] = y − Σ_{k<l} H[:,k]·ω_{s_k}.
        let mut partial = vec![Complex64::new(0.0, 0.0); (n + 1) * n];
        partial[..n].copy_from_slice(y);
        let mut idx = vec![0u8; n];
        let mut best = vec![0u8; n];
        let mut best_metric = f64::INFINITY;
        let mut counter = SquaringCounter::new();
        let last = n - 1;

        let mut level = 0usize;
        loop {
            // Descend to the last column with the current prefix.
            while level < last {
                let (head, tail) = partial.split_at_mut((level + 1) * n);
                let src = &head[level * n..];
                let dst = &mut tail[..n];
                for &row in &self.active {
                    dst[row] = src[row] - self.p(row, level, idx[level]);
                }
                level += 1;
            }
            let base = &partial[last * n..(last + 1) * n];
            for v in 0..q as u8 {
                let mut m = 0.0;
                for &row in &self.active {
                    m += (base[row] - self.p(row, last, v)).norm_sqr();
                }
                if m < best_metric {
                    best_metric = m;
                    idx[last] = v;
                    best.copy_from_slice(&idx);
                }
            }
            // Charged as if every row were evaluated.
            counter.charge(2 * (n * q) as u64);
            // Advance the odometer above the last column.
            idx[last] = 0;
            let mut carry = last;
            loop {
                if carry == 0 {
                    let metric = self.full_metric(y, &best);
                    return Ok(DetectionResult {
                        s_hat: best,
                        metric,
                        squarings: counter.get(),
                    });
                }
                carry -= 1;
                idx[carry] += 1;
                if (idx[carry] as usize) < q {
                    break;
                }
                idx[carry] = 0;
            }
            level = carry;
        }
    }

    /// Seed list: hard decisions on the least-squares estimate `H†·y`, plus
    /// the all-zero index vector.
    pub fn initial_seed(&self, y: &[Complex64], list_len: usize, counter: &mut SquaringCounter) -> CandidateList {
        let ls = self.pinv.mul_vec(y);
        let hard: Vec<u8> = ls.iter().map(|&z| self.constellation.demap_hard(z)).collect();
        let zeros = vec![0u8; self.n];
        let mut list = CandidateList::new(list_len.max(2));
        for s in [hard, zeros] {
            counter.charge_full(self.n);
            list.insert(&s, self.full_metric(y, &s));
        }
        list.set_capacity(list_len);
        list
    }

    /// Branch list estimation: one list per row of `(y, H)`.
    ///
    /// Each branch starts from `in_list` ranked by its row metric. In each of
    /// `Θ` iterations it visits the groups in order; for a group it takes the
    /// branch head as the current estimate, cancels the other groups from
    /// `y(n)`, enumerates every assignment of the group and inserts the
    /// completed vectors, keeping the best `L`.
    pub fn ble_pass(
        &self,
        y: &[Complex64],
        groups: &[Vec<usize>],
        in_list: &CandidateList,
        cfg: &LgsdConfig,
        counter: &mut SquaringCounter,
    ) -> Result<Vec<CandidateList>> {
        if in_list.is_empty() {
            return Err(Error::EmptyList);
        }
        check_len(y, self.n)?;
        let mut branches = Vec::with_capacity(self.n);
        for row in 0..self.n {
            let mut list = CandidateList::new(cfg.list_len);
            for c in in_list.iter() {
                let m = self.branch_metric(y, row, &c.symbols, cfg.branch_metric, counter);
                list.insert(&c.symbols, m);
            }
            for _ in 0..cfg.ble_iters {
                for group in groups {
                    let base = list.head().ok_or(Error::EmptyList)?.symbols.clone();
                    self.search_group(y, row, group, &base, &mut list, cfg.branch_metric, counter);
                }
            }
            branches.push(list);
        }
        Ok(branches)
    }

    fn search_group(
        &self,
        y: &[Complex64],
        row: usize,
        group: &[usize],
        base: &[u8],
        list: &mut CandidateList,
        metric: BranchMetric,
        counter: &mut SquaringCounter,
    ) {
        let n = self.n;
        let single = [row];
        let all: Vec<usize>;
        // Rows the metric looks at.
        let rows: &[usize] = match metric {
            BranchMetric::Row => &single,
            BranchMetric::Full => {
                all = (0..n).collect();
                &all
            }
        };
        // Target with every other group cancelled.
        let mut in_group = vec![false; n];
        for &k in group {
            in_group[k] = true;
        }
        let target: Vec<Complex64> = rows
            .iter()
            .map(|&r| {
                let mut t = y[r];
                for k in (0..n).filter(|&k| !in_group[k]) {
                    t -= self.p(r, k, base[k]);
                }
                t
            })
            .collect();
        let mut candidate = base.to_vec();
        for &k in group {
            candidate[k] = 0;
        }
        loop {
            let mut m = 0.0;
            for (t, &r) in target.iter().zip(rows) {
                let mut e = *t;
                for &k in group {
                    e -= self.p(r, k, candidate[k]);
                }
                m += e.norm_sqr();
            }
            counter.charge(2 * rows.len() as u64);
            list.insert(&candidate, m);

            // Lexicographic odometer over the group's positions.
            let mut pos = group.len();
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                let k = group[pos];
                candidate[k] += 1;
                if (candidate[k] as usize) < self.q {
                    break;
                }
                candidate[k] = 0;
            }
        }
    }

    /// Global list optimisation over the union of `lists`.
    ///
    /// Every candidate gets `Φ` coordinate-descent sweeps over the columns of
    /// `H`: each position tries all `|ω|` values with the others held fixed
    /// and keeps a strictly better full metric. The union is re-sorted and
    /// deduplicated after every sweep and truncated to `L` at the end.
    pub fn glo_pass(
        &self,
        y: &[Complex64],
        lists: &[CandidateList],
        glo_iters: usize,
        list_len: usize,
        counter: &mut SquaringCounter,
    ) -> Result<CandidateList> {
        check_len(y, self.n)?;
        let total: usize = lists.iter().map(CandidateList::len).sum();
        if total == 0 {
            return Err(Error::EmptyList);
        }
        let mut union: Vec<&[u8]> = lists
            .iter()
            .flat_map(|l| l.iter().map(|c| c.symbols.as_slice()))
            .collect();
        union.sort_unstable();
        union.dedup();
        let mut merged = CandidateList::new(total);
        for s in union {
            counter.charge_full(self.n);
            merged.push_unchecked(s, self.full_metric(y, s));
        }
        merged.normalize();
        for _ in 0..glo_iters {
            for c in merged.entries_mut() {
                self.coordinate_sweep(y, c, counter);
            }
            merged.normalize();
        }
        merged.set_capacity(list_len);
        Ok(merged)
    }

    fn coordinate_sweep(&self, y: &[Complex64], cand: &mut Candidate, counter: &mut SquaringCounter) {
        let n = self.n;
        let mut residual = self.residual(y, &cand.symbols);
        let mut current = cand.metric;
        let mut changed = false;
        for col in 0..n {
            let old = cand.symbols[col];
            let mut best_v = old;
            let mut best_m = current;
            for v in 0..self.q as u8 {
                let mut m = 0.0;
                for (row, r) in residual.iter().enumerate() {
                    m += (r + self.p(row, col, old) - self.p(row, col, v)).norm_sqr();
                }
                if m < best_m {
                    best_m = m;
                    best_v = v;
                }
            }
            counter.charge(2 * (n * self.q) as u64);
            if best_v != old {
                for (row, r) in residual.iter_mut().enumerate() {
                    *r += self.p(row, col, old) - self.p(row, col, best_v);
                }
                cand.symbols[col] = best_v;
                current = best_m;
                changed = true;
            }
        }
        if changed {
            cand.metric = self.full_metric(y, &cand.symbols);
        }
    }

    /// LGSD with the default seed list.
    pub fn lgsd<R: Rng + ?Sized>(
        &self,
        y: &[Complex64],
        powers: &[f64],
        cfg: &LgsdConfig,
        rng: &mut R,
    ) -> Result<DetectionResult> {
        let mut counter = SquaringCounter::new();
        let seed = self.initial_seed(y, cfg.list_len, &mut counter);
        self.run_lgsd(y, powers, cfg, seed, counter, rng)
    }

    /// LGSD starting from an explicit seed list.
    pub fn lgsd_with_seed<R: Rng + ?Sized>(
        &self,
        y: &[Complex64],
        powers: &[f64],
        cfg: &LgsdConfig,
        seed: CandidateList,
        rng: &mut R,
    ) -> Result<DetectionResult> {
        self.run_lgsd(y, powers, cfg, seed, SquaringCounter::new(), rng)
    }

    fn run_lgsd<R: Rng + ?Sized>(
        &self,
        y: &[Complex64],
        powers: &[f64],
        cfg: &LgsdConfig,
        seed: CandidateList,
        mut counter: SquaringCounter,
        rng: &mut R,
    ) -> Result<DetectionResult> {
        cfg.validate(self.n)?;
        check_len(y, self.n)?;
        check_len(powers, self.n)?;
        if seed.is_empty() {
            return Err(Error::EmptyList);
        }
        let mut list = seed;
        for q in 0..cfg.overall_iters {
            let groups = allocate_groups(powers, q, &cfg.group_sizes, rng);
            let mut lists = self.ble_pass(y, &groups, &list, cfg, &mut counter)?;
            // The incoming list joins the merge so the head never gets worse.
            lists.push(list);
            list = self.glo_pass(y, &lists, cfg.glo_iters, cfg.list_len, &mut counter)?;
        }
        let head = list.head().ok_or(Error::EmptyList)?;
        Ok(DetectionResult {
            s_hat: head.symbols.clone(),
            metric: head.metric,
            squarings: counter.get(),
        })
    }
}

fn check_len<T>(v: &[T], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension {
            expected: "one entry per satellite",
            got: (v.len(), n),
        });
    }
    Ok(())
}

/// Exhaustive joint ML detection, `argmin ‖y − H·s‖²` over `ωᴺ`.
pub fn jml(y: &[Complex64], h: &CMatrix, c: &Constellation, budget: u64) -> Result<DetectionResult> {
    SearchContext::new(h, c)?.jml(y, budget)
}

/// `2N·|ω|^N`, the squaring count of [`jml`].
pub fn jml_squarings(num_satellites: usize, alphabet: usize) -> u64 {
    2 * num_satellites as u64 * (alphabet as u64).pow(num_satellites as u32)
}

/// LGSD with group allocation randomness seeded from `cfg.rng_seed`.
pub fn lgsd(
    y: &[Complex64],
    h: &CMatrix,
    powers: &[f64],
    c: &Constellation,
    cfg: &LgsdConfig,
) -> Result<DetectionResult> {
    let mut rng = SmallRng::seed_from_u64(cfg.rng_seed);
    SearchContext::new(h, c)?.lgsd(y, powers, cfg, &mut rng)
}

/// Index groups for overall iteration `iteration`.
///
/// The first iteration puts the strongest satellites (by `powers`) in the
/// first group, the next strongest in the second, and so on. Later
/// iterations draw a uniformly random partition with the same sizes. Each
/// group is returned in ascending index order.
pub fn allocate_groups<R: Rng + ?Sized>(
    powers: &[f64],
    iteration: usize,
    sizes: &[usize],
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..powers.len()).collect();
    if iteration == 0 {
        order.sort_by(|&i, &j| powers[j].total_cmp(&powers[i]).then(i.cmp(&j)));
    } else {
        order.shuffle(rng);
    }
    let mut groups = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &size in sizes {
        let mut g = order[start..start + size].to_vec();
        g.sort_unstable();
        groups.push(g);
        start += size;
    }
    groups
}
