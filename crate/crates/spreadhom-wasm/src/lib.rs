//! Browser bindings for exploring spreads on two-dimensional grid posets.
//!
//! Three interactive operations, all returning JSON strings for a plain static
//! page (see `www/index.html`):
//!
//! * [`analyze_subset`] — classify a clicked cell set (convex? connected? a
//!   spread?) and return the canonical regions for coloring;
//! * [`radical_approximation`] — the minimal spread-radical approximation of a
//!   spread, as cell lists for overlay rendering, together with the kernel data;
//! * [`gldim_table`] — the `g_m(k)` table for small ranges.
//!
//! Everything is exact arithmetic over GF(p); the heavy lifting lives in the
//! `spreadhom` crate.

use std::sync::Arc;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use spreadhom::approx::{
    minimal_radical_approximation, radapp_domain_closed_form, spread_pdim, SpreadFamily,
};
use spreadhom::poset::{build_grid, Dir, GridPoset, Spread, Subset};
use spreadhom::rep::kernel_of;
use spreadhom::FieldSpec;

fn grid(k: usize, m: usize) -> Result<GridPoset, String> {
    build_grid(&[k, m]).map_err(|e| e.to_string())
}

fn cells_to_subset(cells: &[u32]) -> Subset {
    Subset::from_indices(cells.iter().map(|&c| c as usize))
}

fn cell_list(grid: &GridPoset, s: Subset) -> Vec<Vec<usize>> {
    s.iter().map(|i| grid.coords(i)).collect()
}

/// Grids small enough to enumerate interactively on every click.
const INTERACTIVE_CAP: usize = 28;

#[derive(Serialize)]
struct SubsetAnalysis {
    is_spread: bool,
    is_convex: bool,
    is_connected: bool,
    convex_closure: Vec<Vec<usize>>,
    min: Vec<Vec<usize>>,
    max: Vec<Vec<usize>>,
    cover: Vec<Vec<usize>>,
    cocover: Vec<Vec<usize>>,
    /// The four canonical regions (only for convex subsets).
    up_cover: Option<Vec<Vec<usize>>>,
    down_cocover: Option<Vec<Vec<usize>>>,
    incomparable: Option<Vec<Vec<usize>>>,
    /// Omitted on grids too large to enumerate per click.
    spread_count: Option<usize>,
}

/// Classifies a cell selection on the grid `[k] x [m]`; cells are element indices
/// `row-major = x * m + y`.
#[wasm_bindgen]
pub fn analyze_subset(k: usize, m: usize, cells: Vec<u32>) -> Result<String, JsValue> {
    let grid = grid(k, m).map_err(|e| JsValue::from_str(&e))?;
    let poset = grid.poset();
    let s = cells_to_subset(&cells);
    let convex = poset.is_convex(s);
    let regions = if !s.is_empty() && convex {
        Some(poset.region_decomposition(s).expect("convex"))
    } else {
        None
    };
    let analysis = SubsetAnalysis {
        is_spread: poset.is_spread(s),
        is_convex: convex,
        is_connected: poset.is_connected(s),
        convex_closure: cell_list(&grid, poset.convex_closure(s)),
        min: cell_list(&grid, poset.minima(s)),
        max: cell_list(&grid, poset.maxima(s)),
        cover: cell_list(&grid, poset.covers(s)),
        cocover: cell_list(&grid, poset.cocovers(s)),
        up_cover: regions.as_ref().map(|r| cell_list(&grid, r.up_cover)),
        down_cocover: regions.as_ref().map(|r| cell_list(&grid, r.down_cocover)),
        incomparable: regions.as_ref().map(|r| cell_list(&grid, r.incomparable)),
        spread_count: (poset.len() <= INTERACTIVE_CAP).then(|| poset.enumerate_spreads().len()),
    };
    serde_json::to_string(&analysis).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[derive(Serialize)]
struct RadappResult {
    target: Vec<Vec<usize>>,
    summands: Vec<Vec<Vec<usize>>>,
    /// `None` when the grid is too large for the generic cross-check per click.
    closed_form_agrees: Option<bool>,
    kernel_dims: Option<Vec<usize>>,
    kernel_pdim: Option<usize>,
}

/// The minimal spread-radical approximation of the spread given by `cells`, over
/// GF(p): summand cell lists for overlays (always, via the closed form), plus the
/// generic rad/rad^2 cross-check and kernel data on interactively sized grids.
#[wasm_bindgen]
pub fn radical_approximation(
    k: usize,
    m: usize,
    cells: Vec<u32>,
    p: u32,
) -> Result<String, JsValue> {
    let grid = grid(k, m).map_err(|e| JsValue::from_str(&e))?;
    let poset = Arc::new(grid.poset().clone());
    let s = cells_to_subset(&cells);
    let spread = Spread::from_subset(&poset, s)
        .ok_or_else(|| JsValue::from_str("selection is not a spread"))?;
    let field = FieldSpec::new(p as u64).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let closed = radapp_domain_closed_form(&poset, &spread);
    let closed_multiset: std::collections::BTreeMap<u64, usize> =
        closed.iter().map(|t| (t.members().0, 1)).collect();
    let mut result = RadappResult {
        target: cell_list(&grid, s),
        summands: closed.iter().map(|t| cell_list(&grid, t.members())).collect(),
        closed_form_agrees: None,
        kernel_dims: None,
        kernel_pdim: None,
    };
    if poset.len() <= INTERACTIVE_CAP {
        let family = SpreadFamily::all_spreads(poset.clone(), field);
        let idx = family.index_of(s).expect("enumeration contains every spread");
        let rho = minimal_radical_approximation(&family, idx);
        let (kernel, _) = kernel_of(rho.morphism());
        result.closed_form_agrees = Some(rho.summand_multiset() == closed_multiset);
        result.kernel_pdim =
            spread_pdim(&family, &kernel).map_err(|e| JsValue::from_str(&e.to_string()))?;
        result.kernel_dims = Some(kernel.dims().to_vec());
    }
    serde_json::to_string(&result).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[derive(Serialize)]
struct GldimRow {
    k: usize,
    gldim: usize,
    spreads: usize,
}

/// The table of `gldim([k] x [m])` for `k = 1..=k_max` over GF(p), with spread
/// counts. Sized for interactive use: rows stop once the grid exceeds the element
/// cap or the spread family outgrows an in-browser budget. The full m = 2 range
/// through the stabilized tail (k = 9, 585 spreads) stays inside the budget.
#[wasm_bindgen]
pub fn gldim_table(m: usize, k_max: usize, p: u32) -> Result<String, JsValue> {
    const FAMILY_BUDGET: usize = 1000;
    let field = FieldSpec::new(p as u64).map_err(|e| JsValue::from_str(&e.to_string()))?;
    let mut rows = Vec::new();
    for k in 1..=k_max.min(16) {
        let Ok(grid) = build_grid(&[k, m]) else {
            break;
        };
        let poset = Arc::new(grid.poset().clone());
        if poset.enumerate_spreads().len() > FAMILY_BUDGET {
            break;
        }
        let family = SpreadFamily::all_spreads(poset, field);
        let gldim = spreadhom::approx::spread_gldim(&family)
            .map_err(|e| JsValue::from_str(&e.to_string()))?;
        rows.push(GldimRow { k, gldim, spreads: family.len() });
    }
    serde_json::to_string(&rows).map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Element index of the cell at column `x`, row `y` (used by the page's grid
/// renderer).
#[wasm_bindgen]
pub fn cell_index(k: usize, m: usize, x: usize, y: usize) -> Result<usize, JsValue> {
    let grid = grid(k, m).map_err(|e| JsValue::from_str(&e))?;
    Ok(grid.index(&[x, y]))
}

/// Members of the principal upset of a cell, for shift-click selection helpers.
#[wasm_bindgen]
pub fn upset_of(k: usize, m: usize, cell: u32) -> Result<Vec<u32>, JsValue> {
    let grid = grid(k, m).map_err(|e| JsValue::from_str(&e))?;
    let up = grid.poset().closure(Subset::singleton(cell as usize), Dir::Up);
    Ok(up.iter().map(|i| i as u32).collect())
}
