//! The individual verification suites. Each reruns one batch of mathematical
//! properties and reports counts and failures; tolerances are exact everywhere.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{oracle, SuiteOptions, SuiteReport};
use crate::approx::{
    minimal_radical_approximation, minimal_resolution, radapp_domain_closed_form, spread_pdim,
    SpreadFamily,
};
use crate::gamma::{gamma_gldim, gamma_table};
use crate::kan::aligned_inclusion;
use crate::linalg::{FieldSpec, Matrix};
use crate::poset::{build_grid, build_poset, Dir, GridPoset, Poset, Subset};
use crate::rep::{hom_basis, iso_check, kernel_of, random_rep, Representation, DEFAULT_ISO_CAP};
use crate::stab::{cover_window_check, hit_check, k_star, radapp_subgrid, stabilization_table};

struct Tally {
    suite: &'static str,
    checks: usize,
    failures: Vec<String>,
    lines: Vec<String>,
}

impl Tally {
    fn new(suite: &'static str) -> Tally {
        Tally { suite, checks: 0, failures: Vec::new(), lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, line: String) {
        self.lines.push(line);
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            suite: self.suite.to_string(),
            checks: self.checks,
            failures: self.failures,
            lines: self.lines,
            seconds: 0.0,
        }
    }
}

fn fields_of(opts: &SuiteOptions) -> Vec<FieldSpec> {
    opts.fields
        .iter()
        .map(|&p| FieldSpec::new(p).expect("field options must be prime"))
        .collect()
}

/// Exhaustive combinatorial properties on the small-poset corpus: region
/// decompositions, finitely generated upsets, the cocover/connected-component
/// equivalence, the duality dictionary, and spread enumeration against the subset
/// filter.
pub fn appendix(_opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("appendix");
    for poset in oracle::test_corpus(12) {
        let n = poset.len();
        let all = poset.elements();
        // Enumerated spreads match the brute subset filter.
        let fast: Vec<Subset> = poset.enumerate_spreads().iter().map(|s| s.members()).collect();
        let brute = oracle::spreads_by_subset_filter(&poset);
        t.check(fast == brute, || format!("spread filter mismatch on {n}-element poset"));
        let op = poset.opposite();
        for mask in 0..(1u64 << n) {
            let s = Subset(mask);
            // Duality dictionary.
            t.check(poset.frontier(s, Dir::Up) == op.frontier(s, Dir::Down), || {
                format!("cover/cocover duality fails for {s:?}")
            });
            t.check(poset.extrema(s, Dir::Down) == op.extrema(s, Dir::Up), || {
                format!("min/max duality fails for {s:?}")
            });
            // Finitely generated upsets: U = up(A) satisfies U = up(min U).
            let u = poset.closure(s, Dir::Up);
            t.check(poset.closure(poset.minima(u), Dir::Up) == u, || {
                format!("upset regeneration fails for {s:?}")
            });
            // Region decomposition for convex subsets.
            if !s.is_empty() && poset.is_convex(s) {
                let r = poset.region_decomposition(s).expect("convex");
                let union =
                    r.spread.union(r.up_cover).union(r.down_cocover).union(r.incomparable);
                let total =
                    r.spread.len() + r.up_cover.len() + r.down_cocover.len() + r.incomparable.len();
                t.check(union == all && total == n, || {
                    format!("region decomposition not a partition for {s:?}")
                });
                t.check(poset.closure(s, Dir::Up) == s.union(r.up_cover), || {
                    format!("up(S) != S + up(cover S) for {s:?}")
                });
                t.check(poset.closure(s, Dir::Down) == s.union(r.down_cocover), || {
                    format!("down(S) != S + down(cocover S) for {s:?}")
                });
            }
        }
        // Cocover vs connected-component equivalence, on spreads.
        if n <= 9 {
            for w in poset.enumerate_spreads() {
                let wm = w.members();
                for a in poset.closure(wm, Dir::Down).minus(wm).iter() {
                    let wedge = poset
                        .up_of(a)
                        .minus(poset.closure(wm, Dir::Up))
                        .minus(Subset::singleton(a));
                    let ambient = wm.union(wedge);
                    let is_component = poset.connected_components(ambient).contains(&wm);
                    t.check(poset.cocovers(wm).contains(a) == is_component, || {
                        format!("cocover/component equivalence fails for W={wm:?}, a={a}")
                    });
                }
            }
        }
    }
    // min V inside cover(down(cocover V)) when the bottom sits below the cocovers.
    let g = build_grid(&[3, 3]).unwrap();
    let p = g.poset();
    let bottom = p.minima(p.elements());
    for mask in 0..(1u64 << 9) {
        let v = Subset(mask);
        if v.is_empty() || !p.is_convex(v) {
            continue;
        }
        let z = p.closure(p.cocovers(v), Dir::Down);
        if bottom.is_subset_of(z) {
            t.check(p.minima(v).is_subset_of(p.covers(z)), || {
                format!("min V outside cover(down(cocover V)) for {v:?}")
            });
        }
    }
    t.finish()
}

fn closed_vs_generic_on(t: &mut Tally, poset: &Arc<Poset>, field: FieldSpec) {
    let family = SpreadFamily::all_spreads(poset.clone(), field);
    for s in 0..family.len() {
        let generic = minimal_radical_approximation(&family, s).summand_multiset();
        let closed: BTreeMap<u64, usize> = radapp_domain_closed_form(poset, family.spread(s))
            .iter()
            .map(|w| (w.members().0, 1))
            .collect();
        t.check(generic == closed, || {
            format!(
                "closed form disagrees with generic radical approximation at {:?} over GF({})",
                family.spread(s).members(),
                field.modulus()
            )
        });
    }
}

/// Closed-form radical-approximation domains against the generic rad/rad^2
/// computation, for every spread of the requested grid (defaults to the three
/// acceptance grids) over every requested field, plus the three-element poset with
/// two maxima.
pub fn radapp_closed_form(opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("radapp-closed-form");
    let grids: Vec<Vec<usize>> = match &opts.grid {
        Some(g) => vec![g.clone()],
        None => vec![vec![3, 3], vec![4, 3], vec![4, 2]],
    };
    for factors in &grids {
        let grid = build_grid(factors).expect("grid fits the cap");
        let poset = Arc::new(grid.poset().clone());
        for field in fields_of(opts) {
            closed_vs_generic_on(&mut t, &poset, field);
        }
        t.note(format!("grid {factors:?}: all spreads, fields {:?}", opts.fields));
    }
    let abc = Arc::new(build_poset(3, &[(1, 0), (1, 2)]).unwrap());
    for field in fields_of(opts) {
        closed_vs_generic_on(&mut t, &abc, field);
        // The poset with b below a and c: the radical approximation of k_{up b} has
        // domain k_{up a} + k_{up c}.
        let family = SpreadFamily::all_spreads(abc.clone(), field);
        let s = family.index_of(abc.up_of(1)).unwrap();
        let rho = minimal_radical_approximation(&family, s);
        let expected: BTreeMap<u64, usize> =
            [(abc.up_of(0).0, 1), (abc.up_of(2).0, 1)].into_iter().collect();
        t.check(rho.summand_multiset() == expected, || {
            "three-element poset radical approximation mismatch".to_string()
        });
    }
    t.finish()
}

/// The cokernel of the projectivized radical approximation is one-dimensional,
/// concentrated at the target spread.
pub fn relative_simple(opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("relative-simple");
    let factors = opts.grid.clone().unwrap_or(vec![4, 2]);
    let grid = build_grid(&factors).expect("grid fits the cap");
    let poset = Arc::new(grid.poset().clone());
    for field in fields_of(opts) {
        let family = SpreadFamily::all_spreads(poset.clone(), field);
        for s in 0..family.len() {
            let rho = minimal_radical_approximation(&family, s);
            for u in 0..family.len() {
                let into_c = hom_basis(family.rep(u), rho.domain());
                let composed: Vec<Vec<u32>> =
                    into_c.iter().map(|g| rho.morphism().compose(g).flatten()).collect();
                let rank = if composed.is_empty() {
                    0
                } else {
                    Matrix::from_rows(field, &composed).rank()
                };
                let coker = family.hom(u, s).len() - rank;
                t.check(coker == usize::from(u == s), || {
                    format!(
                        "relative simple not concentrated: S={:?}, T={:?}, coker={}",
                        family.spread(s).members(),
                        family.spread(u).members(),
                        coker
                    )
                });
            }
        }
        t.note(format!(
            "grid {factors:?} over GF({}): {} spreads",
            field.modulus(),
            family.len()
        ));
    }
    t.finish()
}

/// Random finitely presented modules over chains decompose into intervals:
/// spread-pdim 0 (the None sentinel only for the zero module).
pub fn chains(opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("chains");
    let total = opts.trials.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let families: Vec<SpreadFamily> = (1..=6)
        .map(|m| SpreadFamily::all_spreads(Arc::new(Poset::chain(m)), FieldSpec::gf2()))
        .collect();
    for i in 0..total {
        let family = &families[i % families.len()];
        let m = random_rep(family.poset(), FieldSpec::gf2(), &mut rng, 4, 3);
        let pdim = spread_pdim(family, &m).expect("resolutions terminate");
        let ok = match pdim {
            None => m.is_zero(),
            Some(d) => d == 0,
        };
        t.check(ok, || format!("module over chain [{}] has pdim {pdim:?}", family.poset().len()));
    }
    t.note(format!("{total} random modules over chains [1]..[6], seed {}", opts.seed));
    t.finish()
}

/// `gldim(Gamma) = spread-gldim + 2` on tiny instances, with the left side computed
/// from projective resolutions of the simples of the multiplication table.
pub fn sandwich(opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("sandwich");
    let posets: Vec<(String, Arc<Poset>)> = vec![
        ("chain [2]".into(), Arc::new(Poset::chain(2))),
        ("chain [3]".into(), Arc::new(Poset::chain(3))),
        ("grid [2]x[2]".into(), Arc::new(build_grid(&[2, 2]).unwrap().poset().clone())),
    ];
    for field in fields_of(opts) {
        for (name, poset) in &posets {
            let family = SpreadFamily::all_spreads(poset.clone(), field);
            let table = gamma_table(&family);
            let lhs = gamma_gldim(&table);
            let rhs = crate::approx::spread_gldim(&family).expect("gldim terminates");
            t.check(lhs == rhs + 2, || {
                format!(
                    "sandwich fails on {name} over GF({}): gldim(Gamma)={lhs}, spread={rhs}",
                    field.modulus()
                )
            });
            t.note(format!(
                "{name} over GF({}): gldim(Gamma) = {lhs} = spread-gldim + 2",
                field.modulus()
            ));
        }
    }
    t.finish()
}

pub(crate) fn random_inclusion(
    rng: &mut ChaCha8Rng,
    from: &GridPoset,
    to: &GridPoset,
) -> crate::kan::AlignedGridInclusion {
    let maps: Vec<Vec<usize>> = from
        .factors()
        .iter()
        .zip(to.factors())
        .map(|(&q, &p)| {
            let mut choices: Vec<usize> = (0..p).collect();
            for i in 0..q {
                let j = rng.gen_range(i..p);
                choices.swap(i, j);
            }
            let mut picked: Vec<usize> = choices[..q].to_vec();
            picked.sort_unstable();
            picked
        })
        .collect();
    aligned_inclusion(from.clone(), to.clone(), maps).expect("sampled maps are increasing")
}

/// Left Kan extensions transport minimal resolutions: for random modules and random
/// aligned inclusions, the stretched resolution matches a fresh computation over the
/// big grid, step by step and summand by summand. Also spot-checks that lan of an
/// approximation passes the independent surjectivity test and commutes with kernels.
pub fn kan_transport(opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("kan-transport");
    let from_factors = opts.from.clone().unwrap_or(vec![3, 2]);
    let to_factors = opts.to.clone().unwrap_or(vec![5, 2]);
    let from = build_grid(&from_factors).expect("grid fits the cap");
    let to = build_grid(&to_factors).expect("grid fits the cap");
    let field = FieldSpec::new(opts.fields[0]).expect("prime field");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let small_family = SpreadFamily::all_spreads(Arc::new(from.poset().clone()), field);
    let big_family = SpreadFamily::all_spreads(Arc::new(to.poset().clone()), field);
    let inclusions: Vec<_> = (0..5).map(|_| random_inclusion(&mut rng, &from, &to)).collect();
    for (i, inclusion) in inclusions.iter().enumerate() {
        for trial in 0..opts.trials {
            let m = random_rep(small_family.poset(), field, &mut rng, 3, 2);
            let small_res =
                minimal_resolution(&small_family, &m, None).expect("resolution terminates");
            let lan_m = inclusion.lan(&m).expect("source poset matches");
            let big_res =
                minimal_resolution(&big_family, &lan_m, None).expect("resolution terminates");
            t.check(small_res.steps().len() == big_res.steps().len(), || {
                format!("transported resolution length differs (inclusion {i}, trial {trial})")
            });
            for (small_step, big_step) in small_res.steps().iter().zip(big_res.steps()) {
                // Stretch each summand through the spread formula and compare.
                let mut stretched: BTreeMap<u64, usize> = BTreeMap::new();
                for s in small_step.approximation.summands() {
                    let a = inclusion.map_subset(s.mins());
                    let b = inclusion.map_subset(s.covers());
                    let p = inclusion.target_poset();
                    let members = p.closure(a, Dir::Up).minus(p.closure(b, Dir::Up));
                    *stretched.entry(members.0).or_insert(0) += 1;
                }
                t.check(stretched == big_step.approximation.summand_multiset(), || {
                    format!("transported summand multisets differ (inclusion {i}, trial {trial})")
                });
            }
            if trial == 0 {
                let approx = crate::approx::minimal_approximation(&small_family, &m);
                let lan_f = inclusion.lan_morphism(approx.morphism()).expect("poset matches");
                t.check(crate::approx::is_approximation(&big_family, &lan_f), || {
                    format!("lan of an approximation fails surjectivity (inclusion {i})")
                });
                let (small_kernel, _) = kernel_of(approx.morphism());
                let (big_kernel, _) = kernel_of(&lan_f);
                let lan_kernel = inclusion.lan(&small_kernel).expect("poset matches");
                t.check(
                    iso_check(&big_kernel, &lan_kernel, DEFAULT_ISO_CAP) == Ok(true),
                    || format!("kernel does not commute with lan (inclusion {i})"),
                );
            }
        }
    }
    t.note(format!(
        "{} modules x 5 inclusions {:?} -> {:?}, seed {}",
        opts.trials, from_factors, to_factors, opts.seed
    ));
    t.finish()
}

/// The stretch and contraction formulas on spread representations, for every spread
/// of the big grid (contraction) and of each source grid (stretch), under three
/// fixed origin-aligned inclusions.
pub fn spread_formulas(opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("spread-formulas");
    let to_factors = opts.grid.clone().unwrap_or(vec![6, 2]);
    let to = build_grid(&to_factors).expect("grid fits the cap");
    let p = Arc::new(to.poset().clone());
    let field = FieldSpec::new(opts.fields[0]).expect("prime field");
    let chain_len = to_factors[0];
    let tail: Vec<usize> = to_factors[1..].to_vec();
    let mut inclusion_specs: Vec<Vec<usize>> = vec![
        (0..chain_len).step_by(2).collect(),
        (0..chain_len.min(3)).collect(),
        if chain_len > 1 { vec![0, chain_len - 1] } else { vec![0] },
    ];
    inclusion_specs.dedup();
    for spec in &inclusion_specs {
        let mut factor_maps = vec![spec.clone()];
        let mut source_sizes = vec![spec.len()];
        for &m in &tail {
            factor_maps.push((0..m).collect());
            source_sizes.push(m);
        }
        let source = build_grid(&source_sizes).expect("subgrid fits");
        let inclusion = aligned_inclusion(source, to.clone(), factor_maps).expect("increasing");
        let q = inclusion.source_poset().clone();
        // Stretch: lan(k_{up A \ up B}) = k_{up iA \ up iB} for all spreads of Q.
        for s in q.enumerate_spreads() {
            let rep = Representation::spread_rep(q.clone(), field, &s);
            let lan = inclusion.lan(&rep).expect("poset matches");
            let members = p
                .closure(inclusion.map_subset(s.mins()), Dir::Up)
                .minus(p.closure(inclusion.map_subset(s.covers()), Dir::Up));
            let expected = Representation::indicator(p.clone(), field, members).expect("convex");
            t.check(iso_check(&lan, &expected, DEFAULT_ISO_CAP) == Ok(true), || {
                format!("stretch formula fails for {:?}", s.members())
            });
        }
        // Contraction: k_{up floor(A) \ up floor(B)} for all spreads of P.
        for s in p.enumerate_spreads() {
            let rep = Representation::spread_rep(p.clone(), field, &s);
            let contracted = inclusion.contraction(&rep).expect("origin aligned");
            let floored = q
                .closure(inclusion.floor_subset(s.mins()).expect("origin aligned"), Dir::Up)
                .minus(q.closure(
                    inclusion.floor_subset(s.covers()).expect("origin aligned"),
                    Dir::Up,
                ));
            let expected = Representation::indicator(q.clone(), field, floored).expect("convex");
            t.check(iso_check(&contracted, &expected, DEFAULT_ISO_CAP) == Ok(true), || {
                format!("contraction formula fails for {:?}", s.members())
            });
        }
        t.note(format!("inclusion with chain image {spec:?}"));
    }
    t.finish()
}

/// Window subgrids: cover projections land in the predicted columns, the window
/// hits the spread and all of its radical-approximation summands, and the window
/// size obeys `1 + 4 |G|`.
pub fn windows(opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("windows");
    let grids: Vec<Vec<usize>> = match &opts.grid {
        Some(g) => vec![g.clone()],
        None => vec![vec![5, 2], vec![4, 3]],
    };
    let field = FieldSpec::new(opts.fields[0]).expect("prime field");
    for factors in &grids {
        let grid = build_grid(factors).expect("grid fits the cap");
        let g_size: usize = factors[1..].iter().product();
        for s in grid.poset().enumerate_spreads() {
            t.check(cover_window_check(&grid, &s), || {
                format!("cover window fails for {:?} on {factors:?}", s.members())
            });
            t.check(hit_check(&grid, field, &s) == Ok(true), || {
                format!("hit check fails for {:?} on {factors:?}", s.members())
            });
            let window = radapp_subgrid(&grid, &s);
            t.check(window.factor_maps()[0].len() <= 1 + 4 * g_size, || {
                format!("window too wide for {:?} on {factors:?}", s.members())
            });
        }
        t.note(format!("grid {factors:?}: all spreads checked"));
    }
    t.finish()
}

/// The `g_m(k)` table: monotone in `k`, and (for m = 2) equal to 2 from k = 4 on
/// wherever computed.
pub fn stabilization(opts: &SuiteOptions) -> SuiteReport {
    let mut t = Tally::new("stabilization");
    let field = FieldSpec::new(opts.fields[0]).expect("prime field");
    let report = stabilization_table(
        opts.m,
        opts.kmin,
        opts.kmax,
        field,
        Duration::from_secs(opts.time_budget_secs),
        opts.threads,
    )
    .expect("table computes");
    let computed = report.computed();
    t.check(!computed.is_empty(), || "no rows computed within budget".to_string());
    for w in computed.windows(2) {
        t.check(w[0].1 <= w[1].1, || {
            format!("gldim not monotone: g({}) = {} > g({}) = {}", w[0].0, w[0].1, w[1].0, w[1].1)
        });
    }
    if opts.m == 2 {
        for &(k, g) in computed.iter().filter(|&&(k, _)| k >= 4) {
            t.check(g == 2, || format!("g_2({k}) = {g}, expected 2"));
        }
    }
    t.check(report.k_star == k_star(&[opts.m]), || "k_star mismatch".to_string());
    // Keep stdout reports byte-identical across runs: timings stay in --json output.
    let mut scrubbed = report.clone();
    for row in &mut scrubbed.rows {
        row.seconds = 0.0;
    }
    for line in scrubbed.render().lines() {
        t.note(line.to_string());
    }
    t.finish()
}
