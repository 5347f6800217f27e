//! The acceptance battery: eleven numbered criteria, each made of exact
//! checks against independent computations.
//!
//! Tolerances are fixed here: the Monte-Carlo check allows three standard
//! errors and the growth check allows a max/min ratio of three.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::OnceLock;

use clap::ValueEnum;
use coconvex_core::caterpillar::enumerate_canonical;
use coconvex_core::coconvex::{coconvex_counts, CoconvexTester};
use coconvex_core::combinatorics::{binomial, binomial_signed, fibonacci};
use coconvex_core::convexity::{convex_oracle, count_convex, enumerate_convex};
use coconvex_core::expectation::{exact_expected_nontrivial, trend_table};
use coconvex_core::extremal::{
    bound_table, bound_truncated, doubleton_census, is_minimizer, lis_agreement, residue_probe, residue_sum,
    thm31_witnesses, thm42_permutation, thm62_family, to_f64, SearchReport, SharedCounter,
};
use coconvex_core::metrics::{character_distance, distance_report};
use coconvex_core::rng::seeded;
use coconvex_core::{limits, Caterpillar, CountTable, Label, Tree};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::parallel;

pub const MC_STANDARD_ERRORS: f64 = 3.0;
pub const TREND_MAX_OVER_MIN: f64 = 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Level {
    /// Reduced sample counts and sizes.
    #[default]
    Quick,
    /// The full battery.
    Full,
}

impl Level {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn new(id: u32, name: &'static str) -> Self {
        Outcome {
            id,
            name,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `PASS 4 name` or `FAIL 4 name`.
    pub fn line(&self) -> String {
        format!("{} {:>2} {}", if self.passed() { "PASS" } else { "FAIL" }, self.id, self.name)
    }

    pub fn render(&self) -> String {
        let mut s = self.line();
        s.push('\n');
        for c in &self.checks {
            writeln!(s, "     [{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.label, c.detail).unwrap();
        }
        s
    }
}

pub const CRITERIA: [(u32, &str); 11] = [
    (1, "counting identities"),
    (2, "oracle equivalence"),
    (3, "metric identities"),
    (4, "small-k extremal values"),
    (5, "residue witness families and bounds"),
    (6, "trivial floor"),
    (7, "expected shared count"),
    (8, "residue family block structure"),
    (9, "structural lemmas"),
    (10, "agreement bound"),
    (11, "c_{n,n-1} probe"),
];

pub fn run(id: u32, level: Level) -> Result<Outcome> {
    match id {
        1 => counting_identities(level),
        2 => oracle_equivalence(level),
        3 => metric_identities(level),
        4 => small_k_extremal(level),
        5 => residue_witnesses(level),
        6 => trivial_floor(level),
        7 => expectation(level),
        8 => residue_family(level),
        9 => structural_lemmas(level),
        10 => agreement_bound(level),
        11 => doubleton_probe(level),
        _ => Err(crate::ToolError::Usage(format!("no criterion {id}"))),
    }
}

pub fn run_suite(level: Level) -> Result<Vec<Outcome>> {
    CRITERIA.iter().map(|&(id, _)| run(id, level)).collect()
}

fn name(id: u32) -> &'static str {
    CRITERIA[id as usize - 1].1
}

/// Exhaustive caterpillar searches for `n = 4..=9`, computed once per process.
pub fn search_reports() -> Result<&'static [SearchReport]> {
    static REPORTS: OnceLock<Vec<SearchReport>> = OnceLock::new();
    if let Some(r) = REPORTS.get() {
        return Ok(r);
    }
    let computed = (4..=9)
        .map(|n| parallel::exhaustive_search(n, limits::EXHAUSTIVE_SEARCH, None))
        .collect::<Result<Vec<_>>>()?;
    Ok(REPORTS.get_or_init(|| computed))
}

fn report(n: usize) -> Result<&'static SearchReport> {
    Ok(&search_reports()?[n - 4])
}

/// Tracks the first few counterexamples of a family of checks.
struct Tally {
    checked: u64,
    failed: u64,
    examples: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checked: 0,
            failed: 0,
            examples: Vec::new(),
        }
    }

    fn see(&mut self, ok: bool, example: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.examples.len() < 3 {
                self.examples.push(example());
            }
        }
    }

    fn record(self, out: &mut Outcome, label: &str) {
        let mut detail = format!("{} of {} comparisons hold", self.checked - self.failed, self.checked);
        if !self.examples.is_empty() {
            write!(detail, "; e.g. {}", self.examples.join("; ")).unwrap();
        }
        out.check(label, self.failed == 0, detail);
    }
}

fn counting_identities(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(1, name(1));
    let mut rng = seeded(1);
    let (count, max) = level.pick((20, 12), (50, 14));
    let (mut total, mut by_k, mut literal, mut free, mut corrected) =
        (Tally::new(), Tally::new(), Tally::new(), Tally::new(), Tally::new());
    for _ in 0..count {
        let n = rng.random_range(4..=max);
        let t = count_convex(&Tree::random(n, &mut rng)?);
        let fib = fibonacci(2 * n - 1);
        total.see(t.total() == fib, || format!("n={n}: {} vs {fib}", t.total()));
        for k in 1..=n {
            let expect = binomial(2 * n - k - 1, k - 1);
            by_k.see(t.by_k(k) == expect, || format!("n={n} k={k}"));
            let c = binomial_signed(n as i64 - k as i64 - 1, k as i64 - 1);
            let nt = t.by_k_nontrivial(k);
            if k >= 2 {
                literal.see(nt == c, || format!("n={n} k={k}: {nt} vs {c}"));
            }
            free.see(t.by_k_singleton_free(k) == c, || format!("n={n} k={k}"));
            let sum: BigUint = (0..k.saturating_sub(1))
                .map(|ell| binomial(n, ell) * binomial_signed(n as i64 - k as i64 - 1, (k - ell) as i64 - 1))
                .sum();
            corrected.see(nt == sum, || format!("n={n} k={k}: {nt} vs {sum}"));
        }
    }
    total.record(&mut out, "total = F_{2n-1}");
    by_k.record(&mut out, "by_k = C(2n-k-1, k-1)");
    literal.record(&mut out, "nontrivial by_k = C(n-k-1, k-1), k >= 2");
    free.record(&mut out, "singleton-free by_k = C(n-k-1, k-1)");
    corrected.record(&mut out, "nontrivial by_k = sum_ell C(n, ell) C(n-k-1, k-ell-1)");
    Ok(out)
}

fn oracle_equivalence(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(2, name(2));
    let (max_cat, random) = level.pick((6, 5), (7, 20));
    let mut trees = Vec::new();
    for n in 1..=max_cat {
        trees.extend(enumerate_canonical(n, limits::CATERPILLARS)?.map(|c| c.to_tree()));
    }
    let caterpillars = trees.len();
    let mut rng = seeded(2);
    for _ in 0..random {
        trees.push(Tree::random(8, &mut rng)?);
    }
    let mismatched = trees
        .par_iter()
        .map(|t| -> Result<bool> {
            let listed: BTreeSet<_> = enumerate_convex(t, limits::CONVEX_ENUMERATION)?.collect();
            Ok(listed != convex_oracle(t, limits::CONVEX_ORACLE)?)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&m| m)
        .count();
    out.check(
        "enumeration = edge-subset oracle",
        mismatched == 0,
        format!("{caterpillars} caterpillars with n <= {max_cat}, {random} random trees with n = 8, {mismatched} mismatches"),
    );
    Ok(out)
}

fn metric_identities(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(3, name(3));
    let (count, max) = level.pick((30, 10), (100, 12));
    let mut rng = seeded(3);
    let pairs: Vec<(Tree, Tree)> = (0..count)
        .map(|_| {
            let n = rng.random_range(4..=max);
            Ok((Tree::random(n, &mut rng)?, Tree::random(n, &mut rng)?))
        })
        .collect::<Result<_>>()?;
    let rows = pairs
        .par_iter()
        .map(|(t, f)| Ok((distance_report(t, f, limits::CONVEX_ENUMERATION)?, character_distance(t, f, limits::CONVEX_ENUMERATION)?)))
        .collect::<Result<Vec<_>>>()?;
    let (mut rf, mut literal, mut doubled, mut sum) = (Tally::new(), Tally::new(), Tally::new(), Tally::new());
    for (r, d) in &rows {
        let n = r.n;
        let d2 = &r.per_k[0].2;
        let dlast = &r.per_k.last().expect("n >= 4").2;
        rf.see(*d2 == BigUint::from(r.rf), || format!("n={n}: {d2} vs {}", r.rf));
        literal.see(*dlast == BigUint::from(r.quartet), || format!("n={n}: d_{} = {dlast}, quartet = {}", n - 2, r.quartet));
        doubled.see(*dlast == BigUint::from(2 * r.quartet), || format!("n={n}"));
        sum.see(*d == r.d_total, || format!("n={n}: {d} vs {}", r.d_total));
    }
    rf.record(&mut out, "d_2 = RF");
    literal.record(&mut out, "d_{n-2} = quartet distance");
    doubled.record(&mut out, "d_{n-2} = 2 * quartet distance");
    sum.record(&mut out, "d = sum_k d_k");
    Ok(out)
}

fn small_k_extremal(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(4, name(4));
    let max = level.pick(8, 9);
    let (mut values, mut witness) = (Tally::new(), Tally::new());
    for n in 4..=max {
        let r = report(n)?;
        let counter = SharedCounter::identity(n, limits::CONVEX_ENUMERATION)?;
        let pi = thm42_permutation(n)?;
        for k in 1..=n.div_ceil(3) {
            let expect = binomial(n, k - 1);
            let got = &r.cnk(k).value;
            values.see(*got == expect, || format!("c_{{{n},{k}}} = {got}, C({n},{}) = {expect}", k - 1));
            witness.see(is_minimizer(&counter, r, &pi, k), || format!("n={n} k={k} pi={pi}"));
        }
    }
    values.record(&mut out, &format!("c_{{n,k}} = C(n, k-1) for k <= ceil(n/3), n = 4..{max}"));
    witness.record(&mut out, "construction attains the minimum");
    Ok(out)
}

fn residue_witnesses(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(5, name(5));
    let samples = level.pick(10, 50);
    let mut rng = seeded(5);
    let (mut coconvex, mut stats, mut counts) = (Tally::new(), Tally::new(), Tally::new());
    let mut families = 0;
    for n in [8usize, 12] {
        for _ in 0..samples {
            let pi = Caterpillar::random(n, &mut rng);
            let tester = CoconvexTester::from_caterpillars(&[Caterpillar::identity(n), pi.clone()])?;
            for ell in n / 2..=n - 4 {
                families += 1;
                let ws = thm31_witnesses(&pi, ell)?;
                let bound = residue_sum(n, ell)?;
                counts.see(BigUint::from(ws.len()) >= bound, || format!("pi={pi} ell={ell}: {} < {bound}", ws.len()));
                for w in &ws {
                    let st = w.stats();
                    coconvex.see(tester.test(w)?, || format!("pi={pi}: {w}"));
                    stats.see(st.s == 2 && st.ell == ell, || format!("pi={pi}: {w}"));
                }
            }
        }
    }
    coconvex.record(&mut out, &format!("witnesses coconvex ({families} families, n = 8 and 12)"));
    stats.record(&mut out, "witnesses have two big blocks and ell singletons");
    counts.record(&mut out, "family size >= residue sum");
    let r = report(8)?;
    let rows = bound_table(8, Some(r));
    let bad: Vec<usize> = rows.iter().filter(|row| !row.consistent()).map(|row| row.k).collect();
    out.check(
        "exhaustive c_{8,k} >= every bound",
        bad.is_empty(),
        if bad.is_empty() { "all rows".into() } else { format!("violated at k = {bad:?}") },
    );
    let (value, b) = (&r.cnk(6).value, bound_truncated(8, 6)?);
    out.check(
        "c_{8,6} >= 57",
        b == BigUint::from(57u32) && *value >= b,
        format!("c_{{8,6}} = {value}, bound = {b}"),
    );
    Ok(out)
}

fn floor_holds(t: &CountTable) -> bool {
    let n = t.n();
    (1..n).all(|k| t.by_k(k) >= binomial(n, k - 1)) && t.total() >= (BigUint::from(1u32) << n) - BigUint::from(n)
}

fn trivial_floor(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(6, name(6));
    let count = level.pick(20, 60);
    let mut rng = seeded(6);
    let collections: Vec<Vec<Tree>> = (0..count)
        .map(|_| {
            let n = rng.random_range(4..=11);
            let m = rng.random_range(1..=4);
            (0..m).map(|_| Tree::random(n, &mut rng)).collect::<coconvex_core::Result<_>>()
        })
        .collect::<coconvex_core::Result<_>>()?;
    let ok = collections
        .par_iter()
        .map(|ts| Ok(floor_holds(&coconvex_counts(ts, limits::CONVEX_ENUMERATION)?)))
        .collect::<Result<Vec<bool>>>()?;
    let bad = ok.iter().filter(|&&b| !b).count();
    out.check("random collections", bad == 0, format!("{} tables, {bad} below the floor", ok.len()));
    let mut tally = Tally::new();
    for r in search_reports()? {
        let n = r.n;
        for k in 1..n {
            tally.see(r.cnk(k).value >= binomial(n, k - 1), || format!("c_{{{n},{k}}}"));
        }
        let floor = (BigUint::from(1u32) << n) - BigUint::from(n);
        tally.see(r.total.value >= floor, || format!("c_{n}"));
    }
    tally.record(&mut out, "exhaustive minima, n = 4..9");
    Ok(out)
}

/// Average shared nontrivial count over all `n!` permutations.
fn permutation_average(n: usize) -> Result<BigRational> {
    let id = Caterpillar::identity(n).to_tree();
    let mut perms: Vec<Vec<Label>> = vec![Vec::new()];
    for x in 1..=n as Label {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |i| {
                    let mut q = p.clone();
                    q.insert(i, x);
                    q
                })
            })
            .collect();
    }
    let total: BigUint = perms
        .par_iter()
        .map(|p| {
            let t = Caterpillar::new(p.clone())?.to_tree();
            Ok(coconvex_counts(&[id.clone(), t], limits::CONVEX_ENUMERATION)?.total_nontrivial())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(BigRational::new(total.into(), BigUint::from(perms.len()).into()))
}

fn expectation(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(7, name(7));
    let max = level.pick(6, 7);
    let mut tally = Tally::new();
    for n in 4..=max {
        let exact = exact_expected_nontrivial(n, limits::EXACT_EXPECTATION)?;
        let brute = permutation_average(n)?;
        tally.see(exact == brute, || format!("n={n}: {exact} vs {brute}"));
    }
    tally.record(&mut out, &format!("exact formula = permutation average, n = 4..{max}"));

    let (n, samples, seed) = (14, 2000, 42);
    let exact = to_f64(&exact_expected_nontrivial(n, limits::EXACT_EXPECTATION)?);
    let mc = parallel::monte_carlo(n, samples, seed, limits::CONVEX_ENUMERATION)?;
    let z = (mc.mean() - exact).abs() / mc.std_error();
    out.check(
        "Monte-Carlo within 3 standard errors",
        z <= MC_STANDARD_ERRORS,
        format!("n={n}, {samples} samples, seed {seed}: {:.2} +- {:.2}, exact {exact:.2}, z = {z:.2}", mc.mean(), mc.std_error()),
    );

    let rows = trend_table(10, 20, limits::EXACT_EXPECTATION)?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio_f64()).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    out.check(
        "E n^2 / 2^n spread over n = 10..20",
        hi / lo <= TREND_MAX_OVER_MIN,
        format!("min {lo:.4}, max {hi:.4}, max/min {:.3}", hi / lo),
    );
    Ok(out)
}

fn residue_family(_level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(8, name(8));
    let (n, m) = (12, 3);
    let family = thm62_family(n, m)?;
    out.check("family size 3m - 2", family.len() == 3 * m - 2, format!("{} caterpillars", family.len()));
    let probe = residue_probe(&family, m, limits::CONVEX_ENUMERATION)?;
    let summary = format!(
        "{} common characters, {} nontrivial, smallest nontrivial k = {}",
        probe.examined,
        probe.nontrivial,
        probe.min_k.map_or("none".into(), |k| k.to_string())
    );
    out.check(
        "nontrivial blocks lie inside one residue class",
        probe.block_violations.is_empty(),
        match probe.block_violations.first() {
            None => summary.clone(),
            Some(p) => format!("{} violations, e.g. {p}", probe.block_violations.len()),
        },
    );
    out.check(
        "m k >= (m-1) n + s",
        probe.size_violations.is_empty(),
        match probe.size_violations.first() {
            None => summary,
            Some(p) => format!("{} violations, e.g. {p}", probe.size_violations.len()),
        },
    );
    Ok(out)
}

/// One tree per unlabeled shape with `n` leaves.
pub fn all_shapes(n: usize) -> Result<Vec<Tree>> {
    if n <= 3 {
        return Ok(vec![Tree::small(n)?]);
    }
    let mut shapes = vec![Tree::small(3)?];
    for m in 3..n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        let labels: Vec<Label> = (1..=m as Label + 1).collect();
        for t in &shapes {
            let shift = |v: usize| if v < m { v } else { v + 1 };
            let edges = t.edges();
            for e in 0..edges.len() {
                let w = 2 * m - 1;
                let mut grown: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (shift(a), shift(b))).collect();
                let (a, b) = grown[e];
                grown[e] = (a, w);
                grown.push((w, b));
                grown.push((w, m));
                let g = Tree::from_edges(&labels, 2 * m, &grown)?;
                if seen.insert(g.shape_signature()) {
                    next.push(g);
                }
            }
        }
        shapes = next;
    }
    Ok(shapes)
}

fn structural_lemmas(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(9, name(9));
    let max = level.pick(8, 10);
    let mut trees = Vec::new();
    for n in 4..=max {
        trees.extend(all_shapes(n)?);
    }
    let shapes = trees.len();
    let failures: Vec<String> = trees
        .par_iter()
        .map(|t| -> Result<Vec<String>> {
            let n = t.n();
            let mut bad = Vec::new();
            for p in enumerate_convex(t, limits::CONVEX_ENUMERATION)? {
                let st = p.stats();
                let ok = st.ell + 1 != n
                    && (!matches!(n - st.ell, 0 | 2 | 3) || st.s <= 1)
                    && (st.ell + 3 < n || st.ell + n >= 2 * st.k);
                if !ok && bad.len() < 3 {
                    bad.push(format!("n={n}: {p}"));
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    out.check(
        "singleton counts of convex characters",
        failures.is_empty(),
        if failures.is_empty() {
            format!("every convex character of all {shapes} shapes with 4 <= n <= {max}")
        } else {
            failures.join("; ")
        },
    );
    let mut gap = Tally::new();
    for n in 1..=max {
        for p in enumerate_convex(&Caterpillar::identity(n).to_tree(), limits::CONVEX_ENUMERATION)? {
            let st = p.stats();
            gap.see(st.gap <= st.ell, || format!("{p}"));
        }
    }
    gap.record(&mut out, &format!("gap <= ell on the identity caterpillar, n <= {max}"));
    Ok(out)
}

fn isqrt(x: usize) -> usize {
    let mut r = (x as f64).sqrt() as usize;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

fn agreement_bound(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(10, name(10));
    let count = level.pick(20, 100);
    let mut rng = seeded(10);
    let (mut size, mut iso) = (Tally::new(), Tally::new());
    for _ in 0..count {
        let n = rng.random_range(4..=200);
        let (a, b) = (Caterpillar::random(n, &mut rng), Caterpillar::random(n, &mut rng));
        let y = lis_agreement(&a, &b)?;
        let need = isqrt(n - 1);
        size.see(y.len() >= need, || format!("n={n}: {} < {need}", y.len()));
        let (ta, tb) = (a.to_tree().restrict(&y)?, b.to_tree().restrict(&y)?);
        iso.see(ta.is_isomorphic(&tb), || format!("n={n}"));
    }
    size.record(&mut out, &format!("|Y| >= floor(sqrt(n-1)) on {count} random pairs, n <= 200"));
    iso.record(&mut out, "restrictions to Y are isomorphic");
    Ok(out)
}

fn doubleton_probe(level: Level) -> Result<Outcome> {
    let mut out = Outcome::new(11, name(11));
    let max = level.pick(8, 9);
    let mut census = Tally::new();
    let mut table = Vec::new();
    for n in 4..=max {
        let r = report(n)?.cnk(n - 1);
        for w in &r.witnesses {
            let c = BigUint::from(doubleton_census(w));
            census.see(c == r.value, || format!("n={n} witness {w}: census {c}, search {}", r.value));
        }
        table.push(format!("n={n}: {} (C(n,2) = {}, C(n,n-3) = {})", r.value, binomial(n, 2), binomial(n, n - 3)));
    }
    census.record(&mut out, "search value = doubleton census of each witness");
    out.check("values", true, table.join("; "));
    Ok(out)
}
