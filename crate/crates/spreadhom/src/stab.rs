//! Stabilization machinery for products of a chain with a fixed grid: truncated
//! window subgrids around a spread, cover-projection bounds, hit checks, and the
//! table of spread-global dimensions `g_m(k)` with its stabilization constant
//! `k* = 1 + 4 |G|`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::approx::{radapp_domain_closed_form, spread_gldim_of_poset, ApproxError};
use crate::kan::{aligned_inclusion, AlignedGridInclusion};
use crate::linalg::FieldSpec;
use crate::poset::{build_grid, GridPoset, PosetError, Spread, Subset};
use crate::rep::{iso_check, Representation, DEFAULT_ISO_CAP};

/// The chain length beyond which `gldim([k] x G)` is constant.
pub fn k_star(g_factors: &[usize]) -> usize {
    1 + 4 * g_factors.iter().product::<usize>()
}

/// The aligned window subgrid of a spread `S` of a product `T x G`: the columns
/// `pi_0(0 ∪ A ∪ (A+e0) ∪ (B+e0) ∪ (B+2e0))` with `A = min S` and `B = max S`
/// (truncated arithmetic), times the full `G`. Always contains column 0 and the
/// minima and covers of `S` together with those of all of its radical-approximation
/// summands.
pub fn radapp_subgrid(grid: &GridPoset, s: &Spread) -> AlignedGridInclusion {
    let poset = grid.poset();
    let a = poset.minima(s.members());
    let b = poset.maxima(s.members());
    debug_assert_eq!(poset.segment_sets(a, b), s.members(), "spreads are segments of their extrema");
    let mut window: Vec<usize> = vec![0];
    let mut push_col = |e: usize| {
        let c = grid.project(e, 0);
        if !window.contains(&c) {
            window.push(c);
        }
    };
    for x in a.iter() {
        push_col(x);
        push_col(grid.add(x, grid.basis_element(0)));
    }
    for x in b.iter() {
        push_col(grid.add(x, grid.basis_element(0)));
        let twice = grid.add(grid.add(x, grid.basis_element(0)), grid.basis_element(0));
        push_col(twice);
    }
    window.sort_unstable();
    let mut factor_maps = vec![window.clone()];
    let mut sub_factors = vec![window.len()];
    for &m in &grid.factors()[1..] {
        factor_maps.push((0..m).collect());
        sub_factors.push(m);
    }
    let sub = build_grid(&sub_factors).expect("window subgrid fits the cap");
    aligned_inclusion(sub, grid.clone(), factor_maps).expect("window columns are increasing")
}

/// Whether every cover of `S` projects into `pi_0(min S ∪ (max S + e0))`.
pub fn cover_window_check(grid: &GridPoset, s: &Spread) -> bool {
    let poset = grid.poset();
    let mut columns = Subset::EMPTY;
    for x in poset.minima(s.members()).iter() {
        columns.insert(grid.project(x, 0));
    }
    for x in poset.maxima(s.members()).iter() {
        columns.insert(grid.project(grid.add(x, grid.basis_element(0)), 0));
    }
    poset
        .covers(s.members())
        .iter()
        .all(|x| columns.contains(grid.project(x, 0)))
}

/// Whether the window subgrid of `S` hits `k_S` and every summand of its closed-form
/// radical approximation: minima and covers must land in the window image, and
/// `lan(contraction(k_T))` must reproduce `k_T` exactly.
pub fn hit_check(grid: &GridPoset, field: FieldSpec, s: &Spread) -> Result<bool, crate::kan::KanError> {
    let inclusion = radapp_subgrid(grid, s);
    let image = inclusion.image();
    let poset = inclusion.target_poset().clone();
    let mut targets = vec![s.clone()];
    targets.extend(radapp_domain_closed_form(&poset, s));
    for t in &targets {
        if !t.mins().is_subset_of(image) || !t.covers().is_subset_of(image) {
            return Ok(false);
        }
        let rep = Representation::spread_rep(poset.clone(), field, t);
        let contracted = inclusion.contraction(&rep)?;
        let back = inclusion.lan(&contracted)?;
        if !iso_check(&rep, &back, DEFAULT_ISO_CAP)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One row of the stabilization table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabRow {
    pub k: usize,
    /// `None` when the computation was skipped (cap or time budget).
    pub gldim: Option<usize>,
    pub seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// The computed `g_m(k)` table with the detected onset of constancy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub m: usize,
    pub field: u64,
    pub rows: Vec<StabRow>,
    pub k_star: usize,
    /// Smallest computed `k` from which the computed values stay constant.
    pub stabilization_onset: Option<usize>,
}

impl StabilizationReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "g_{}(k) over GF({}), k* = {}\n  k  gldim  seconds\n",
            self.m, self.field, self.k_star
        ));
        for row in &self.rows {
            match (&row.gldim, &row.skipped) {
                (Some(g), _) => {
                    out.push_str(&format!("  {:<3}{:<7}{:.2}\n", row.k, g, row.seconds))
                }
                (None, Some(why)) => out.push_str(&format!("  {:<3}skipped: {why}\n", row.k)),
                (None, None) => out.push_str(&format!("  {:<3}skipped\n", row.k)),
            }
        }
        match self.stabilization_onset {
            Some(k) => out.push_str(&format!("constant from k = {k} over the computed range\n")),
            None => out.push_str("no constant tail detected in the computed range\n"),
        }
        out
    }

    pub fn computed(&self) -> Vec<(usize, usize)> {
        self.rows.iter().filter_map(|r| r.gldim.map(|g| (r.k, g))).collect()
    }
}

/// Computes `gldim([k] x [m])` for `k` in the given range, within a wall-clock
/// budget; rows that would exceed the element cap or the budget are reported as
/// skipped. With `threads > 1` the per-k computations run in a worker pool; the
/// computed values do not depend on the thread count.
pub fn stabilization_table(
    m: usize,
    k_min: usize,
    k_max: usize,
    field: FieldSpec,
    budget: Duration,
    threads: usize,
) -> Result<StabilizationReport, ApproxError> {
    let start = Instant::now();
    let ks: Vec<usize> = (k_min..=k_max).collect();
    let results: Mutex<Vec<StabRow>> = Mutex::new(Vec::new());
    let next: AtomicUsize = AtomicUsize::new(0);
    let worker = |results: &Mutex<Vec<StabRow>>, next: &AtomicUsize| {
        loop {
            let i = next.fetch_add(1, Ordering::SeqCst);
            if i >= ks.len() {
                return;
            }
            let k = ks[i];
            let row = compute_row(k, m, field, start, budget);
            results.lock().unwrap().push(row);
        }
    };
    if threads <= 1 {
        worker(&results, &next);
    } else {
        std::thread::scope(|scope| {
            for _ in 0..threads.min(ks.len()) {
                scope.spawn(|| worker(&results, &next));
            }
        });
    }
    let mut rows = results.into_inner().unwrap();
    rows.sort_by_key(|r| r.k);
    let computed: Vec<(usize, usize)> =
        rows.iter().filter_map(|r| r.gldim.map(|g| (r.k, g))).collect();
    let stabilization_onset = computed
        .last()
        .map(|&(_, last)| {
            let mut onset = computed.last().unwrap().0;
            for &(k, g) in computed.iter().rev() {
                if g == last {
                    onset = k;
                } else {
                    break;
                }
            }
            onset
        })
        .filter(|_| !computed.is_empty());
    Ok(StabilizationReport {
        m,
        field: field.modulus() as u64,
        rows,
        k_star: k_star(&[m]),
        stabilization_onset,
    })
}

fn compute_row(
    k: usize,
    m: usize,
    field: FieldSpec,
    start: Instant,
    budget: Duration,
) -> StabRow {
    if start.elapsed() > budget {
        return StabRow { k, gldim: None, seconds: 0.0, skipped: Some("time budget".into()) };
    }
    let row_start = Instant::now();
    match build_grid(&[k, m]) {
        Err(PosetError::CapExceeded(n, cap)) => StabRow {
            k,
            gldim: None,
            seconds: 0.0,
            skipped: Some(format!("{n} elements exceed cap {cap}")),
        },
        Err(e) => StabRow { k, gldim: None, seconds: 0.0, skipped: Some(e.to_string()) },
        Ok(grid) => {
            let poset = std::sync::Arc::new(grid.poset().clone());
            match spread_gldim_of_poset(poset, field) {
                Ok(g) => StabRow {
                    k,
                    gldim: Some(g),
                    seconds: row_start.elapsed().as_secs_f64(),
                    skipped: None,
                },
                Err(e) => StabRow {
                    k,
                    gldim: None,
                    seconds: row_start.elapsed().as_secs_f64(),
                    skipped: Some(e.to_string()),
                },
            }
        }
    }
}
