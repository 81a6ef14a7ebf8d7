//! Named verification suites and the brute-force reference paths they check against.
//!
//! Suites are callable from the CLI (`verify <suite>`) and from the test harness.
//! Each suite reruns a batch of mathematical properties and reports per-property
//! counts and failures. The [`oracle`] submodule holds independent brute-force
//! computations (subset filters, scalar-assignment Hom counts, ...) that deliberately
//! avoid the main implementation paths.

use std::fmt::Write as _;
use std::time::Instant;

pub mod oracle {
    //! Brute-force reference computations, kept independent of the main paths.

    use crate::poset::{build_grid, build_poset, Poset, Spread, Subset};

    /// Fixed corpus of small posets used by exhaustive property checks: chains,
    /// grids, an antichain, a fence, and the three-element poset with one minimum
    /// below two incomparable maxima.
    pub fn test_corpus(max_n: usize) -> Vec<Poset> {
        let mut out = Vec::new();
        for m in 1..=6 {
            out.push(Poset::chain(m));
        }
        for factors in [
            vec![2, 2],
            vec![3, 2],
            vec![4, 2],
            vec![3, 3],
            vec![4, 3],
            vec![2, 2, 2],
            vec![3, 2, 2],
        ] {
            out.push(build_grid(&factors).unwrap().poset().clone());
        }
        // b <= a, b <= c.
        out.push(build_poset(3, &[(1, 0), (1, 2)]).unwrap());
        out.push(Poset::antichain(4));
        // Fence a0 < b0 > a1 < b1 > a2.
        out.push(build_poset(5, &[(0, 1), (2, 1), (2, 3), (4, 3)]).unwrap());
        out.retain(|p| p.len() <= max_n);
        out
    }

    /// Spread enumeration by filtering every nonempty subset. Only for small posets.
    pub fn spreads_by_subset_filter(poset: &Poset) -> Vec<Subset> {
        assert!(poset.len() <= 20, "subset filter oracle is exponential");
        let mut out: Vec<Subset> = (1u64..(1 << poset.len()))
            .map(Subset)
            .filter(|&s| poset.is_spread(s))
            .collect();
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }

    /// Dimension of Hom between two spread representations, counted by compatible
    /// scalar assignments instead of linear algebra. A morphism `k_T -> k_S` is one
    /// scalar `c_p` per `p` in `T ∩ S`; naturality over a comparable pair `p <= q`
    /// forces, case by case:
    ///   * `p, q` both in `T ∩ S`:  `c_p = c_q`;
    ///   * `p` in `T \ S`, `q` in `T ∩ S`:  `c_q = 0`;
    ///   * `p` in `T ∩ S`, `q` in `S \ T`:  `c_p = 0`;
    ///   * anything else: both sides of the naturality square are zero maps.
    ///
    /// The dimension is the number of comparability classes of `T ∩ S` not killed
    /// by the last two rules, independently of the field.
    pub fn hom_dim_between_spreads(poset: &Poset, t: &Spread, s: &Spread) -> usize {
        let inter = t.members().inter(s.members());
        if inter.is_empty() {
            return 0;
        }
        let idx: Vec<usize> = inter.indices();
        let pos = |i: usize| idx.iter().position(|&x| x == i).unwrap();
        let mut uf: Vec<usize> = (0..idx.len()).collect();
        fn find(uf: &mut Vec<usize>, i: usize) -> usize {
            if uf[i] != i {
                let r = find(uf, uf[i]);
                uf[i] = r;
            }
            uf[i]
        }
        let mut killed = vec![false; idx.len()];
        for p in 0..poset.len() {
            for q in 0..poset.len() {
                if p == q || !poset.leq(p, q) {
                    continue;
                }
                let p_inter = inter.contains(p);
                let q_inter = inter.contains(q);
                if p_inter && q_inter {
                    let (a, b) = (find(&mut uf, pos(p)), find(&mut uf, pos(q)));
                    uf[a] = b;
                } else if q_inter && t.members().contains(p) {
                    killed[pos(q)] = true;
                } else if p_inter && s.members().contains(q) {
                    killed[pos(p)] = true;
                }
            }
        }
        let mut class_killed = std::collections::HashMap::new();
        for i in 0..idx.len() {
            let r = find(&mut uf, i);
            *class_killed.entry(r).or_insert(false) |= killed[i];
        }
        class_killed.values().filter(|&&k| !k).count()
    }
}

/// Outcome of one verification suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: usize,
    pub failures: Vec<String>,
    pub lines: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Renders the report; wall-clock timing only with `timings` (stdout reports
    /// stay byte-identical for fixed inputs without it).
    pub fn render(&self, timings: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {}: {} checks", self.suite, self.checks);
        for line in &self.lines {
            let _ = writeln!(out, "  {line}");
        }
        for f in &self.failures {
            let _ = writeln!(out, "  FAIL {f}");
        }
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        if timings {
            let _ = writeln!(out, "{}: {} ({:.2}s)", self.suite, verdict, self.seconds);
        } else {
            let _ = writeln!(out, "{}: {}", self.suite, verdict);
        }
        out
    }
}

/// Shared options for the suites; unused fields are ignored by suites that do not
/// need them.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub grid: Option<Vec<usize>>,
    pub fields: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    pub from: Option<Vec<usize>>,
    pub to: Option<Vec<usize>>,
    pub m: usize,
    pub kmin: usize,
    pub kmax: usize,
    pub time_budget_secs: u64,
    pub threads: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            grid: None,
            fields: vec![2],
            trials: 20,
            seed: 7,
            from: None,
            to: None,
            m: 2,
            kmin: 1,
            kmax: 6,
            time_budget_secs: 1800,
            threads: 1,
        }
    }
}

/// Seeded aligned grid inclusions (ChaCha8 keyed by `seed`), shared by the
/// transport suites and the CLI's kan-check.
pub fn seeded_inclusions(
    seed: u64,
    count: usize,
    from: &crate::poset::GridPoset,
    to: &crate::poset::GridPoset,
) -> Vec<crate::kan::AlignedGridInclusion> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| suites::random_inclusion(&mut rng, from, to)).collect()
}

pub fn suite_names() -> &'static [&'static str] {
    &[
        "appendix",
        "radapp-closed-form",
        "relative-simple",
        "chains",
        "sandwich",
        "kan-transport",
        "spread-formulas",
        "windows",
        "stabilization",
    ]
}

/// Runs a named suite; `Err` for unknown names.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport, String> {
    let start = Instant::now();
    let mut report = match name {
        "appendix" => suites::appendix(opts),
        "radapp-closed-form" => suites::radapp_closed_form(opts),
        "relative-simple" => suites::relative_simple(opts),
        "chains" => suites::chains(opts),
        "sandwich" => suites::sandwich(opts),
        "kan-transport" => suites::kan_transport(opts),
        "spread-formulas" => suites::spread_formulas(opts),
        "windows" => suites::windows(opts),
        "stabilization" => suites::stabilization(opts),
        other => return Err(format!("unknown suite '{other}', known: {:?}", suite_names())),
    };
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

mod suites;
