//! Seeded end-to-end trials of the certified bounds.
//!
//! Each trial draws a random instance with a small optimal cut, anchors
//! it at full frame weight, and checks that the certified drawing, both
//! exact searches, and the extraction land inside the promised envelope;
//! small instances also run the cubic stage at toy parameters. Searches
//! that blow their budget mark the trial skipped, never passed, and the
//! verdict of every record can be recomputed from its numbers alone.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drawing::CombinatorialDrawing;
use crate::extract::{cut_from_cubic_drawing, cut_from_drawing, drawing_from_cut};
use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::plane::{Inserter, Spot};
use crate::reduce::{attach_frame, expand_drawing, reduce_chain, transfer_drawing, ReduceParams};
use crate::rotation::RotationSystem;
use crate::solver::cr::{cr_exact_rot_seeded, cr_exact_seeded, CrossingResult, SolverOptions};
use crate::solver::mwc::{mwc_exact, mwc_feasible, CutSolution, MultiwayInstance};
use crate::{Error, Result};

/// Search effort per exact solve before a trial is recorded as skipped.
const NODE_BUDGET: u64 = 2_000_000;

/// Largest instance that still runs the cubic stage at toy parameters.
const TOY_LIMIT: usize = 5;

/// A seeded connected simple unit-weight instance: a random spanning
/// tree, random extra edges, three distinct random terminals.
pub fn gen_instance(n: usize, m: usize, seed: u64) -> Result<MultiwayInstance> {
    if n < 3 {
        return Err(Error::BadInstance("an instance needs at least three vertices".into()));
    }
    let span = n * (n - 1) / 2;
    if m + 1 < n || m > span {
        return Err(Error::BadInstance(format!(
            "no connected simple graph has {n} vertices and {m} edges"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedMultigraph::new();
    let vs: Vec<VertexId> =
        (0..n).map(|i| g.add_vertex(&format!("v{i}")).expect("fresh names")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
    for k in 1..n {
        let a = order[k];
        let b = order[rng.gen_range(0..k)];
        present.insert((a.min(b), a.max(b)));
    }
    let mut pool: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|p| !present.contains(p))
        .collect();
    pool.shuffle(&mut rng);
    present.extend(pool.into_iter().take(m - (n - 1)));
    for &(a, b) in &present {
        g.add_edge(vs[a], vs[b], 1).expect("simple by construction");
    }
    let mut picks: Vec<usize> = (0..n).collect();
    picks.shuffle(&mut rng);
    MultiwayInstance::new(g, [vs[picks[0]], vs[picks[1]], vs[picks[2]]])
}

/// A seeded realizable drawing of `g`: shuffled rotation, shuffled
/// insertion order, and pair prices spread over 1..=5 so routes vary and
/// occasionally cross a pair more than once.
pub fn random_drawing(g: &WeightedMultigraph, seed: u64) -> Result<CombinatorialDrawing> {
    use std::hash::{Hash, Hasher};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<Vec<EdgeId>> = (0..g.vertex_count())
        .map(|i| g.incident_edges(VertexId(i as u32)).to_vec())
        .collect();
    for row in &mut order {
        row.shuffle(&mut rng);
    }
    let mut ins = Inserter::with_rotation(g, RotationSystem { order })?;
    let mut todo: Vec<EdgeId> = g.edge_ids().collect();
    todo.shuffle(&mut rng);
    let salt: u64 = rng.gen();
    // grow the placed part edge by edge; a route can only run between
    // faces of one drawn component, so never bridge two placed islands
    let mut down = vec![false; g.vertex_count()];
    while !todo.is_empty() {
        let i = todo
            .iter()
            .position(|&e| g.edge(e).ends().iter().any(|v| down[v.index()]))
            .unwrap_or(0);
        let e = todo.remove(i);
        let costs = |f: EdgeId| {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            (salt, e.index(), f.index()).hash(&mut h);
            Some(1 + h.finish() % 5)
        };
        ins.insert(e, costs, Spot::Auto, Spot::Auto)?;
        let [u, v] = g.edge(e).ends();
        down[u.index()] = true;
        down[v.index()] = true;
    }
    ins.finish()
}

/// How one witness extraction went.
#[derive(Clone, Copy, Debug)]
pub struct ExtractCheck {
    pub feasible: bool,
    pub size: usize,
    pub weight: u64,
}

/// The cubic leg of a trial, at toy frame weight and grid height.
#[derive(Clone, Debug)]
pub struct CubicTrial {
    pub frame_weight: u64,
    pub grid_height: u64,
    /// Exact rotation-bound cost of the toy anchored stage, when the
    /// search finished and its witness carried over.
    pub rot_cost: Option<u64>,
    /// Cost of the drawing carried onto the cubic graph.
    pub cost: u64,
    pub cut_size: usize,
    pub cut_weight: u64,
    pub feasible: bool,
}

#[derive(Clone, Debug)]
pub enum CubicLeg {
    /// The instance sits past the toy size limit.
    NotTried,
    /// A search gave up or the drawing would not carry over.
    Skipped(String),
    /// Extraction refused an honestly transferred drawing.
    Failed(String),
    Done(CubicTrial),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Skip,
    Fail,
}

/// Everything needed to recheck one trial, plus how the checks went.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// Optimal cut weight of the instance.
    pub cut_weight: u64,
    /// Full frame weight n^5 the anchored stage was run at.
    pub frame_weight: u64,
    /// Certified ceiling: frame weight times cut plus 3n^4.
    pub bound: u64,
    /// Cost of the drawing built from the optimal cut.
    pub drawn_cost: u64,
    /// Exact cost with the anchored rotation prescribed; None if skipped.
    pub cr_fixed: Option<u64>,
    /// Exact cost over free rotations; None if skipped.
    pub cr_free: Option<u64>,
    /// Free cost over frame weight times cut, when the cut is nonzero.
    pub lemma2_ratio: Option<f64>,
    pub fixed_extract: Option<ExtractCheck>,
    pub free_extract: Option<ExtractCheck>,
    pub cubic: CubicLeg,
    pub millis: u128,
    pub verdict: Verdict,
}

impl TrialRecord {
    /// The verdict implied by the recorded numbers alone.
    pub fn recompute(&self) -> Verdict {
        let mut skipped = false;
        let mut failed = self.drawn_cost > self.bound;
        let check_extract = |failed: &mut bool, cost: u64, x: &Option<ExtractCheck>| match x {
            Some(x) => {
                *failed |= !x.feasible;
                *failed |= self.frame_weight * x.size as u64 > cost;
                *failed |= x.weight < self.cut_weight;
            }
            None => *failed = true, // a finished search always yields a witness
        };
        match self.cr_fixed {
            Some(c) => {
                failed |= c > self.bound;
                check_extract(&mut failed, c, &self.fixed_extract);
            }
            None => skipped = true,
        }
        match self.cr_free {
            Some(c) => {
                failed |= self.frame_weight * self.cut_weight > c;
                if let Some(f) = self.cr_fixed {
                    failed |= c > f;
                }
                check_extract(&mut failed, c, &self.free_extract);
            }
            None => skipped = true,
        }
        match &self.cubic {
            CubicLeg::NotTried => {}
            CubicLeg::Skipped(_) => skipped = true,
            CubicLeg::Failed(_) => failed = true,
            CubicLeg::Done(c) => {
                failed |= !c.feasible;
                failed |= c.frame_weight * c.cut_size as u64 > c.cost;
                failed |= c.cut_weight < self.cut_weight;
                match c.rot_cost {
                    Some(r) => failed |= c.cost > r,
                    None => skipped = true,
                }
            }
        }
        if failed {
            Verdict::Fail
        } else if skipped {
            Verdict::Skip
        } else {
            Verdict::Pass
        }
    }
}

/// A harness run, one record per trial in seed order.
#[derive(Clone, Debug, Default)]
pub struct HarnessReport {
    pub trials: Vec<TrialRecord>,
}

impl HarnessReport {
    pub fn failures(&self) -> usize {
        self.trials.iter().filter(|t| t.verdict == Verdict::Fail).count()
    }

    pub fn skips(&self) -> usize {
        self.trials.iter().filter(|t| t.verdict == Verdict::Skip).count()
    }

    /// Overall success; skipped trials only pass when explicitly allowed.
    pub fn clean(&self, allow_skips: bool) -> bool {
        self.failures() == 0 && (allow_skips || self.skips() == 0)
    }
}

fn solved(r: Result<CrossingResult>) -> Result<Option<CrossingResult>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::CapExceeded { .. } | Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs `trials` seeded trials on instances of 3 to `n_max` vertices.
pub fn verify_lemmas(n_max: usize, trials: usize, seed: u64) -> Result<HarnessReport> {
    if !(3..=7).contains(&n_max) {
        return Err(Error::BadInstance(
            "harness sizes run from 3 to 7 vertices; larger graphs defeat the exact searches"
                .into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HarnessReport::default();
    for _ in 0..trials {
        // trials depend only on their own seed, so the report reads in
        // seed order even if runs were farmed out
        let trial_seed = rng.gen();
        report.trials.push(run_trial(n_max, trial_seed)?);
    }
    Ok(report)
}

fn extract_check(
    inst: &MultiwayInstance,
    art: &crate::reduce::Anchored,
    witness: &CombinatorialDrawing,
) -> Result<ExtractCheck> {
    let sol = cut_from_drawing(art, witness)?;
    Ok(ExtractCheck {
        feasible: mwc_feasible(inst, &sol.cut),
        size: sol.cut.len(),
        weight: sol.weight,
    })
}

fn run_trial(n_max: usize, trial_seed: u64) -> Result<TrialRecord> {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    // small cuts keep every certified bound at desk scale
    let (inst, best) = loop {
        let n = rng.gen_range(3..=n_max);
        let span = n * (n - 1) / 2;
        let m = rng.gen_range(n - 1..=span.min(n + 3));
        let inst = gen_instance(n, m, rng.gen())?;
        let best = mwc_exact(&inst)?;
        if best.weight <= 3 {
            break (inst, best);
        }
    };
    let n = inst.graph.vertex_count();
    let w = (n as u64).pow(5);
    let bound = w * best.weight + 3 * (n as u64).pow(4);
    let art = attach_frame(&inst, &ReduceParams { frame_weight: w, grid_height: 8 })?;
    let drawn = drawing_from_cut(&art, &best.cut)?;

    let opts = SolverOptions { node_budget: Some(NODE_BUDGET), ..SolverOptions::default() };
    let fixed = solved(cr_exact_rot_seeded(&art.graph, &art.rotation, &opts, &drawn))?;
    let free = solved(cr_exact_seeded(&art.graph, &opts, &drawn))?;
    let fixed_extract = match &fixed {
        Some(r) => Some(extract_check(&inst, &art, &r.witness)?),
        None => None,
    };
    let free_extract = match &free {
        Some(r) => Some(extract_check(&inst, &art, &r.witness)?),
        None => None,
    };

    let cubic = if n <= TOY_LIMIT { cubic_leg(&inst, &best, &opts)? } else { CubicLeg::NotTried };

    let mut rec = TrialRecord {
        seed: trial_seed,
        n,
        m: inst.graph.edge_count(),
        cut_weight: best.weight,
        frame_weight: w,
        bound,
        drawn_cost: drawn.cost(),
        cr_fixed: fixed.as_ref().map(|r| r.cost),
        cr_free: free.as_ref().map(|r| r.cost),
        lemma2_ratio: free.as_ref().and_then(|r| {
            (best.weight > 0).then(|| r.cost as f64 / (w * best.weight) as f64)
        }),
        fixed_extract,
        free_extract,
        cubic,
        millis: 0,
        verdict: Verdict::Pass,
    };
    rec.verdict = rec.recompute();
    rec.millis = clock.elapsed().as_millis();
    Ok(rec)
}

fn cubic_leg(
    inst: &MultiwayInstance,
    best: &CutSolution,
    opts: &SolverOptions,
) -> Result<CubicLeg> {
    let params = ReduceParams { frame_weight: 2, grid_height: 8 };
    let chain = reduce_chain(inst, &params)?;
    let art = &chain.anchored;
    let drawn = drawing_from_cut(art, &best.cut)?;
    let rot = solved(cr_exact_rot_seeded(&art.graph, &art.rotation, opts, &drawn))?;

    let carry = |d: &CombinatorialDrawing| {
        expand_drawing(d, &chain.expansion).and_then(|dp| transfer_drawing(&dp, &chain.cubic))
    };
    let mut rot_cost = rot.as_ref().map(|r| r.cost);
    let dt = match rot.as_ref().map(|r| carry(&r.witness)) {
        Some(Ok(dt)) => dt,
        other => {
            // the search gave up or its witness would not carry over;
            // the certified drawing still bounds the cubic stage, but
            // the comparison against the exact cost is off the table
            if let Some(Err(_)) = other {
                rot_cost = None;
            }
            match carry(&drawn) {
                Ok(dt) => dt,
                Err(e) => return Ok(CubicLeg::Skipped(e.to_string())),
            }
        }
    };
    match cut_from_cubic_drawing(&chain, &dt) {
        Ok(sol) => Ok(CubicLeg::Done(CubicTrial {
            frame_weight: params.frame_weight,
            grid_height: params.grid_height,
            rot_cost,
            cost: dt.cost(),
            cut_size: sol.cut.len(),
            cut_weight: sol.weight,
            feasible: mwc_feasible(inst, &sol.cut),
        })),
        Err(Error::Extraction(msg)) => Ok(CubicLeg::Failed(msg)),
        Err(e) => Err(e),
    }
}
