//! Layered verification suite. Checks run in a fixed order and the first
//! failure stops the run: later checks are reported as skipped.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::GroupElement;
use crate::bratteli::{build_diagram, Diagram, FinitePath};
use crate::cocycles::{
    amplify_for_common_prefix, delta_closure_probe, generators_match_values, shift_image, skewed_adic_step,
    tail_cocycle, tail_orbit_witness, FloorCocycle, SkewedPathState,
};
use crate::error::{Error, Result};
use crate::iet::{compose_loop, pf_lengths, simulate_return_times, visit_frequencies, TowerSystem};
use crate::instance::RauzyInstance;
use crate::maharam::{
    continuity_profile, invariance_step_check, level_counting_by_paths, level_counting_matrix, perron,
    random_nonmaximal_path, MaharamMeasure, MaharamParameter, PsiGrid,
};
use crate::skew::{birkhoff_sum_at_return, check_periodic_type, SkewCocycle};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXACT_LEVELS: usize = 3;
pub const TAIL_SAMPLES: usize = 1000;
pub const TAIL_ORBIT_STEPS: usize = 20;
pub const PROBE_SAMPLES: usize = 100;
pub const COUNTING_LEVELS: u32 = 4;
pub const MAHARAM_PSI_SAMPLES: usize = 20;
pub const MAHARAM_CYLINDERS: usize = 1000;
pub const MAHARAM_LEVEL: usize = 5;
pub const MAHARAM_TOLERANCE: f64 = 1e-10;
pub const PERRON_LENGTH_TOLERANCE: f64 = 1e-10;
pub const FREQUENCY_STEPS: usize = 1_000_000;
pub const FREQUENCY_TOLERANCE: f64 = 5e-3;
pub const CONTINUITY_LEVEL: usize = 4;
pub const CONTINUITY_CYLINDERS: usize = 8;
pub const CONTINUITY_REFINEMENTS: u32 = 3;
/// Dyadic depth of the coarsest continuity grid: `2^2` cells per axis.
pub const CONTINUITY_COARSEST: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub name: &'static str,
    pub status: Status,
    /// Largest numerical discrepancy, when the check is numerical.
    pub residual: Option<f64>,
    /// Counterexample or summary of what was checked.
    pub witness: String,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub instance: String,
    pub seed: u64,
    pub injection: Option<String>,
    pub checks: Vec<CheckResult>,
    pub status: Status,
}

impl VerificationReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks
            .iter()
            .find(|c| matches!(c.status, Status::Fail | Status::Inconclusive))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Deliberate corruption of the data the checks see.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Injection {
    /// Add one to the first coordinate of `phi_1`.
    PhiPlusOne,
    /// Swap two adjacent distinct letters of one tower word before the
    /// diagram is built.
    SwapWord,
}

impl Injection {
    pub fn name(self) -> &'static str {
        match self {
            Injection::PhiPlusOne => "phi-plus-one",
            Injection::SwapWord => "swap-word",
        }
    }
}

struct Outcome {
    status: Status,
    residual: Option<f64>,
    witness: String,
}

impl Outcome {
    fn pass(witness: impl Into<String>) -> Self {
        Self {
            status: Status::Pass,
            residual: None,
            witness: witness.into(),
        }
    }

    fn fail(witness: impl Into<String>) -> Self {
        Self {
            status: Status::Fail,
            residual: None,
            witness: witness.into(),
        }
    }

    fn numeric(residual: f64, tolerance: f64, witness: impl Into<String>) -> Self {
        Self {
            status: if residual <= tolerance { Status::Pass } else { Status::Fail },
            residual: Some(residual),
            witness: witness.into(),
        }
    }
}

/// The data shared by all layers, with any injection already applied.
pub struct Context<'a> {
    pub inst: &'a RauzyInstance,
    pub phi: SkewCocycle,
    pub diagram_towers: TowerSystem,
    pub diagram: Diagram,
    pub seed: u64,
}

impl<'a> Context<'a> {
    pub fn new(inst: &'a RauzyInstance, seed: u64, injection: Option<Injection>) -> Result<Self> {
        let mut phi = inst.require_phi()?.clone();
        let mut diagram_towers = inst.towers.clone();
        match injection {
            Some(Injection::PhiPlusOne) => phi = phi.perturbed(0, 0, 1),
            Some(Injection::SwapWord) => {
                diagram_towers = diagram_towers
                    .with_swapped_letters()
                    .ok_or_else(|| Error::InvalidTower("no word with two distinct letters".into()))?;
            }
            None => {}
        }
        let diagram = build_diagram(&diagram_towers);
        Ok(Self {
            inst,
            phi,
            diagram_towers,
            diagram,
            seed,
        })
    }

    fn f(&self) -> Result<FloorCocycle> {
        FloorCocycle::new(&self.diagram, &self.phi)
    }

    fn exact_levels(&self) -> usize {
        EXACT_LEVELS.min(self.diagram.max_level())
    }
}

type Layer = fn(&Context<'_>) -> Result<Outcome>;

pub const LAYERS: [(&str, &str); 11] = [
    ("c01", "tower_oracle"),
    ("c02", "cocycle_identities"),
    ("c03", "bratteli_dictionary"),
    ("c04", "tail_cocycle"),
    ("c05", "tail_equals_orbit"),
    ("c06", "aperiodicity_certificate"),
    ("c07", "level_counting"),
    ("c08", "maharam_invariance"),
    ("c09", "psi_zero_consistency"),
    ("c10", "continuity"),
    ("c11", "fault_injection"),
];

const FUNCTIONS: [Layer; 10] = [
    tower_oracle,
    cocycle_identities,
    bratteli_dictionary,
    tail_cocycle_check,
    tail_equals_orbit,
    certificate_check,
    level_counting,
    maharam_invariance,
    psi_zero_consistency,
    continuity,
];

/// Runs every layer in order. The fault-injection layer re-runs the suite
/// under each [`Injection`] and is skipped when one is already active.
pub fn run_verification(inst: &RauzyInstance, seed: u64, injection: Option<Injection>) -> Result<VerificationReport> {
    let ctx = Context::new(inst, seed, injection)?;
    let mut checks = Vec::new();
    let mut stopped = false;
    for (i, (id, name)) in LAYERS.iter().enumerate() {
        if stopped {
            checks.push(CheckResult {
                id: id.to_string(),
                name,
                status: Status::Skipped,
                residual: None,
                witness: String::new(),
                runtime_ms: 0.0,
            });
            continue;
        }
        let start = Instant::now();
        let outcome = if i < FUNCTIONS.len() {
            FUNCTIONS[i](&ctx)
        } else if injection.is_some() {
            Ok(Outcome {
                status: Status::Skipped,
                residual: None,
                witness: "injection active".into(),
            })
        } else {
            fault_injection(inst, seed)
        };
        let outcome = match outcome {
            Ok(o) => o,
            Err(e @ Error::AmplificationCap(_)) => Outcome {
                status: Status::Inconclusive,
                residual: None,
                witness: e.to_string(),
            },
            Err(e) => Outcome::fail(format!("error: {e}")),
        };
        stopped = matches!(outcome.status, Status::Fail | Status::Inconclusive);
        checks.push(CheckResult {
            id: id.to_string(),
            name,
            status: outcome.status,
            residual: outcome.residual,
            witness: outcome.witness,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    let status = checks
        .iter()
        .map(|c| c.status)
        .find(|s| matches!(s, Status::Fail | Status::Inconclusive))
        .unwrap_or(Status::Pass);
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        instance: inst.name.clone(),
        seed,
        injection: injection.map(|i| i.name().to_string()),
        checks,
        status,
    })
}

fn tower_oracle(ctx: &Context<'_>) -> Result<Outcome> {
    let lp = &ctx.inst.lp;
    let lengths = pf_lengths(&lp.matrix())?;
    for k in 1..=EXACT_LEVELS {
        let towers = compose_loop(lp, k)?;
        let (q, words) = simulate_return_times(lp.start(), &lengths, k as u32)?;
        if q != towers.heights() {
            return Ok(Outcome::fail(format!("level {k}: heights {:?} vs simulated {q:?}", towers.heights())));
        }
        if let Some(j) = (0..lp.d()).find(|&j| words[j] != towers.word(j)) {
            return Ok(Outcome::fail(format!("level {k}: word of tower {} differs", j + 1)));
        }
    }
    Ok(Outcome::pass(format!("levels 1..={EXACT_LEVELS} match simulation")))
}

fn cocycle_identities(ctx: &Context<'_>) -> Result<Outcome> {
    let lp = &ctx.inst.lp;
    let a = lp.matrix();
    for k in 1..=EXACT_LEVELS {
        let towers = compose_loop(lp, k)?;
        let ak = a.pow(k as u32)?;
        if towers.matrix() != &ak {
            return Ok(Outcome::fail(format!("A({k}) != A^{k}")));
        }
        let sums: Vec<BigInt> = towers.heights().iter().map(|&q| BigInt::from(q)).collect();
        if ak.column_sums() != sums {
            return Ok(Outcome::fail(format!("level {k}: column sums differ from heights")));
        }
    }
    let towers = &ctx.inst.towers;
    if !check_periodic_type(&a, &ctx.phi) {
        return Ok(Outcome::fail("A^T phi != phi"));
    }
    let renormalized = crate::skew::renormalized_phi(&a, &ctx.phi, 1)?;
    for j in 0..lp.d() {
        if &birkhoff_sum_at_return(towers, &ctx.phi, j)? != renormalized.value(j) {
            return Ok(Outcome::fail(format!("word sum of tower {} != (A^T phi)_{}", j + 1, j + 1)));
        }
    }
    Ok(Outcome::pass("A(k) = A^k, column sums, word sums, A^T phi = phi"))
}

/// Letter visited at each floor of the level-`k` towers of the reference
/// (uncorrupted) tower system.
fn reference_words(inst: &RauzyInstance, k: usize) -> Result<Vec<Vec<usize>>> {
    Ok(compose_loop(&inst.lp, k)?.words().to_vec())
}

fn bratteli_dictionary(ctx: &Context<'_>) -> Result<Outcome> {
    let diagram = &ctx.diagram;
    let d = diagram.d();
    let mut checked = 0usize;
    for k in 1..=ctx.exact_levels() {
        let reference = reference_words(ctx.inst, k)?;
        let paths = diagram.enumerate_paths(k);
        let total: u64 = diagram.level_heights(k)?.iter().sum();
        if paths.len() as u64 != total {
            return Ok(Outcome::fail(format!("level {k}: {} paths for {total} floors", paths.len())));
        }
        let mut seen = HashSet::new();
        let (mut maximal, mut minimal) = (0, 0);
        for p in &paths {
            let c = diagram.path_to_floor(p)?;
            if !seen.insert((c.tower, c.height)) || &diagram.floor_to_path(k, c.tower, c.height)? != p {
                return Ok(Outcome::fail(format!("level {k}: dictionary not bijective at {p}")));
            }
            // the floor lies in the interval named by the first vertex
            let letter = reference[c.tower].get(c.height as usize).copied();
            if letter != Some(diagram.source(p.first())) {
                return Ok(Outcome::fail(format!(
                    "level {k}: path {p} codes floor {} of tower {}, which lies in interval {:?}, not {}",
                    c.height,
                    c.tower + 1,
                    letter.map(|x| x + 1),
                    diagram.source(p.first()) + 1
                )));
            }
            if diagram.is_maximal(p) {
                maximal += 1;
            } else {
                let c2 = diagram.path_to_floor(&diagram.adic_successor(p)?)?;
                if c2.tower != c.tower || c2.height != c.height + 1 {
                    return Ok(Outcome::fail(format!("level {k}: successor of {p} is not the next floor")));
                }
            }
            if diagram.is_minimal(p) {
                minimal += 1;
            }
            checked += 1;
        }
        if maximal != d || minimal != d {
            return Ok(Outcome::fail(format!("level {k}: {maximal} maximal and {minimal} minimal paths")));
        }
    }
    Ok(Outcome::pass(format!("{checked} paths")))
}

/// Smallest level at which every tower has more than `floors` floors.
fn level_with_height(diagram: &Diagram, floors: u64) -> Result<usize> {
    for k in 1..=diagram.max_level() {
        if diagram.level_heights(k)?.iter().all(|&q| q > floors) {
            return Ok(k);
        }
    }
    Err(Error::InvalidTower(format!("no level has towers taller than {floors}")))
}

fn tail_cocycle_check(ctx: &Context<'_>) -> Result<Outcome> {
    let diagram = &ctx.diagram;
    let f = ctx.f()?;
    let k = level_with_height(diagram, 2 * TAIL_ORBIT_STEPS as u64)?;
    let heights = diagram.level_heights(k)?.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x04);
    for _ in 0..TAIL_SAMPLES {
        let p = random_nonmaximal_path(diagram, k, &mut rng)?;
        let v = tail_cocycle(diagram, &f, &p)?;
        if &v != ctx.phi.value(diagram.source(p.first())) {
            return Ok(Outcome::fail(format!("phi_f({p}) = {v}")));
        }
    }
    // S_n phi_f(p) = S_k f(p) - S_k f(tau^n p) along orbits inside one tower
    for _ in 0..TAIL_SAMPLES {
        let j = rng.random_range(0..diagram.d());
        let h = rng.random_range(0..heights[j] - TAIL_ORBIT_STEPS as u64);
        let p = diagram.floor_to_path(k, j, h)?;
        let base = f.birkhoff_sum(&p, k);
        let mut cur = p.clone();
        let mut acc = GroupElement::zero(f.m());
        for n in 1..=TAIL_ORBIT_STEPS {
            acc += &tail_cocycle(diagram, &f, &cur)?;
            cur = diagram.adic_successor(&cur)?;
            if acc != &base - &f.birkhoff_sum(&cur, k) {
                return Ok(Outcome::fail(format!("orbit sum identity fails at {p}, n = {n}")));
            }
        }
    }
    Ok(Outcome::pass(format!("{TAIL_SAMPLES} paths at level {k}, orbits of length {TAIL_ORBIT_STEPS}")))
}

fn tail_equals_orbit(ctx: &Context<'_>) -> Result<Outcome> {
    const K: usize = 2;
    let diagram = &ctx.diagram;
    let f = ctx.f()?;
    let m = f.m();
    let mut offsets = vec![GroupElement::zero(m)];
    offsets.extend((0..m).map(|i| GroupElement::unit(m, i)));
    let mut pairs = 0u64;
    let heights = diagram.level_heights(K)?.to_vec();
    for c in &offsets {
        // all floors (p, c - S_k f(p)) over one vertex share an image; they
        // must form a single orbit inside their tower
        let mut groups: HashMap<_, Vec<SkewedPathState>> = HashMap::new();
        for p in diagram.enumerate_paths(K) {
            let s = SkewedPathState::new(p.clone(), c - &f.birkhoff_sum(&p, K));
            groups.entry(shift_image(&f, &s, K)?).or_default().push(s);
        }
        for (image, members) in groups {
            let j = image.vertex;
            let orbit_start = members
                .iter()
                .find(|s| diagram.is_minimal(&s.path))
                .cloned()
                .ok_or_else(|| Error::InvalidTower("group without base floor".into()))?;
            let mut index = HashMap::new();
            let mut cur = orbit_start.clone();
            for h in 0..heights[j] {
                // every orbit pair within the tower has the same image
                if shift_image(&f, &cur, K)? != image {
                    return Ok(Outcome::fail(format!("orbit of tower {} changes image at floor {h}", j + 1)));
                }
                index.insert(cur.clone(), h as i64);
                if h + 1 < heights[j] {
                    cur = skewed_adic_step(diagram, &f, &cur)?;
                }
            }
            // every member lies on the orbit, so each pair (s1, s2) is
            // witnessed by n = index(s2) - index(s1)
            pairs += (members.len() * members.len()) as u64;
            for s1 in &members {
                let Some(&i1) = index.get(s1) else {
                    return Ok(Outcome::fail(format!("{} has the image of tower {} but is off its orbit", s1.path, j + 1)));
                };
                // direct witness search from the base floor
                let n = tail_orbit_witness(diagram, &f, &orbit_start, s1, K)?;
                if n != Some(i1) {
                    return Ok(Outcome::fail(format!("no orbit witness for {}", s1.path)));
                }
            }
        }
    }
    Ok(Outcome::pass(format!("{pairs} pairs at level {K}")))
}

fn certificate_check(ctx: &Context<'_>) -> Result<Outcome> {
    let lp = &ctx.inst.lp;
    let cert = amplify_for_common_prefix(lp, &ctx.phi)?;
    if !cert.verdict {
        return Ok(Outcome::fail(format!("invariant factors {:?}", cert.invariant_factors)));
    }
    if !generators_match_values(&cert, &ctx.phi) {
        return Ok(Outcome::fail(format!("generators {:?} differ from the values of phi", cert.generators)));
    }
    let revalidated = match cert.revalidate(lp, &ctx.phi) {
        Ok(true) => "revalidated",
        Ok(false) => return Ok(Outcome::fail("certificate does not revalidate")),
        Err(Error::Overflow(_)) => "too large to revalidate",
        Err(e) => return Err(e),
    };
    let f = ctx.f()?;
    let probe = delta_closure_probe(&ctx.diagram, &f, &cert.generator_matrix(ctx.phi.m()), PROBE_SAMPLES, ctx.seed);
    if !probe.passed() {
        return Ok(Outcome::fail(format!("closure probe: {probe:?}")));
    }
    Ok(Outcome::pass(format!(
        "exponent {}, M = {}, {revalidated}, {} probe samples",
        cert.exponent, cert.m_prefix, probe.samples
    )))
}

fn level_counting(ctx: &Context<'_>) -> Result<Outcome> {
    let diagram = &ctx.diagram;
    let f = ctx.f()?;
    let m = level_counting_matrix(diagram, &f);
    let a = ctx.diagram_towers.matrix().clone();
    if m.eval_at_ones() != a {
        return Ok(Outcome::fail("M(1) != A"));
    }
    let levels = COUNTING_LEVELS.min(diagram.max_level() as u32);
    let mut power = m.clone();
    for k in 1..=levels {
        if k > 1 {
            power = power.mul(&m)?;
        }
        if level_counting_by_paths(diagram, &f, k as usize) != power {
            return Ok(Outcome::fail(format!("M^{k} differs from the path count")));
        }
        if power.eval_at_ones() != a.pow(k)? {
            return Ok(Outcome::fail(format!("b-counts at level {k} do not sum to A^{k}")));
        }
    }
    Ok(Outcome::pass(format!("k = 1..={levels}")))
}

fn random_psi(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn maharam_invariance(ctx: &Context<'_>) -> Result<Outcome> {
    let diagram = &ctx.diagram;
    let f = ctx.f()?;
    let levels = MAHARAM_LEVEL.min(diagram.max_level());
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x08);
    let counting = level_counting_matrix(diagram, &f);
    let powers: Vec<_> = (0..=levels as u32).map(|k| counting.pow(k)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for _ in 0..MAHARAM_PSI_SAMPLES {
        let psi = random_psi(&mut rng, f.m());
        let mu = MaharamMeasure::new(diagram, &f, MaharamParameter::new(psi.clone())?)?;
        for k in 1..=levels {
            let s = invariance_step_check(&mu, MAHARAM_CYLINDERS / levels + 1, k, rng.random())?;
            for (what, r) in [
                ("invariance", s.invariance_abs),
                ("quasi-invariance", s.quasi_invariance_rel),
            ] {
                if r > worst {
                    worst = r;
                    detail = format!("{what} at psi = {psi:?}, k = {k}");
                }
            }
        }
        for (k, mk) in powers.iter().enumerate() {
            let r = recurrence_residual(&mu, mk, k as u32);
            if r > worst {
                worst = r;
                detail = format!("recurrence at psi = {psi:?}, k = {k}");
            }
        }
    }
    Ok(Outcome::numeric(
        worst,
        MAHARAM_TOLERANCE,
        format!("{MAHARAM_PSI_SAMPLES} psi, levels 1..={levels}; worst {detail}"),
    ))
}

fn recurrence_residual(mu: &MaharamMeasure<'_>, mk: &crate::algebra::LaurentMatrix, k: u32) -> f64 {
    let d = mk.size();
    let r = mu.perron().r;
    let v = &mu.perron().v;
    let lambda = mu.parameter().lambda();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let rhs: f64 = (0..d)
            .map(|j| mk.get(i, j).eval(lambda).unwrap_or(f64::NAN) * v[j] / r.powi(k as i32))
            .sum();
        worst = worst.max((v[i] - rhs).abs());
    }
    worst
}

fn psi_zero_consistency(ctx: &Context<'_>) -> Result<Outcome> {
    let a = ctx.diagram_towers.matrix();
    let lengths = pf_lengths(a)?.lengths_f64();
    let p = perron(&a.to_f64_rows())?;
    let length_gap = p.v.iter().zip(&lengths).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if length_gap > PERRON_LENGTH_TOLERANCE {
        return Ok(Outcome::numeric(length_gap, PERRON_LENGTH_TOLERANCE, "v at psi = 0 vs PF lengths"));
    }
    let lengths_data = pf_lengths(&ctx.inst.lp.matrix())?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x09);
    let start = rng.random_range(0.0..1.0);
    let freq = visit_frequencies(ctx.inst.lp.start(), &lengths_data, start, FREQUENCY_STEPS)?;
    let gap = freq.iter().zip(&p.v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(Outcome::numeric(
        gap,
        FREQUENCY_TOLERANCE,
        format!("PF gap {length_gap:e}; visit frequencies over {FREQUENCY_STEPS} steps from x = {start:.6}"),
    ))
}

fn continuity(ctx: &Context<'_>) -> Result<Outcome> {
    let diagram = &ctx.diagram;
    let f = ctx.f()?;
    let k = CONTINUITY_LEVEL.min(diagram.max_level());
    let family = continuity_family(diagram, &f, k, ctx.seed)?;
    let grids: Vec<PsiGrid> = (CONTINUITY_COARSEST..=CONTINUITY_COARSEST + CONTINUITY_REFINEMENTS)
        .map(|r| PsiGrid::dyadic(f.m(), -1.0, 1.0, r))
        .collect();
    let profile = continuity_profile(diagram, &f, &grids, &family)?;
    let moduli: Vec<String> = profile.modulus.iter().map(|(h, w)| format!("{h}: {w:.3e}")).collect();
    let witness = format!("modulus by grid step {}", moduli.join(", "));
    Ok(if profile.is_monotone() {
        Outcome::pass(witness)
    } else {
        Outcome::fail(witness)
    })
}

/// The cylinder family used for continuity profiles: random level-`k`
/// cylinders over small fibers.
pub fn continuity_family(
    diagram: &Diagram,
    f: &FloorCocycle,
    k: usize,
    seed: u64,
) -> Result<Vec<(FinitePath, GroupElement)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x10);
    let m = f.m();
    (0..CONTINUITY_CYLINDERS)
        .map(|_| {
            let p = random_nonmaximal_path(diagram, k, &mut rng)?;
            let a = GroupElement::new((0..m).map(|_| rng.random_range(-1..=1)).collect());
            Ok((p, a))
        })
        .collect()
}

const EXPECTED_INJECTIONS: [(Injection, &str); 2] = [(Injection::PhiPlusOne, "c02"), (Injection::SwapWord, "c03")];

fn fault_injection(inst: &RauzyInstance, seed: u64) -> Result<Outcome> {
    let mut seen = Vec::new();
    for (injection, expected) in EXPECTED_INJECTIONS {
        let report = run_verification(inst, seed, Some(injection))?;
        let first = report.first_failure().map(|c| c.id.as_str());
        let later_skipped = report
            .checks
            .iter()
            .skip_while(|c| Some(c.id.as_str()) != first)
            .skip(1)
            .all(|c| c.status == Status::Skipped);
        if first != Some(expected) || !later_skipped {
            return Ok(Outcome::fail(format!(
                "{}: first failing layer {first:?}, expected {expected}",
                injection.name()
            )));
        }
        seen.push(format!("{} -> {expected}", injection.name()));
    }
    Ok(Outcome::pass(seen.join(", ")))
}
