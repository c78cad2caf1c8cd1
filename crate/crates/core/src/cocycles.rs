//! The floor cocycle `f`, the tail cocycle `phi_f`, skewed adic and shift
//! steps, tail/orbit witnesses and the aperiodicity certificate.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{in_lattice, invariant_factors, GroupElement, IntegerMatrix};
use crate::bratteli::{Diagram, Edge, FinitePath};
use crate::error::{Error, Result};
use crate::iet::{compose_loop, RauzyLoop};
use crate::skew::{check_periodic_type, SkewCocycle};

/// Amplification schedule: repetition counts `2^0, ..., 2^MAX_DOUBLINGS`.
pub const MAX_DOUBLINGS: u32 = 10;
/// Tower words are compared on prefixes of at most this many letters.
pub const PREFIX_CAP: usize = 1 << 12;

/// `f(e) = -sum_{r < l} phi_{w_j[r]}` for the edge `e = (j, l)`.
pub fn floor_cocycle_f(diagram: &Diagram, e: Edge, phi: &SkewCocycle) -> GroupElement {
    let mut acc = GroupElement::zero(phi.m());
    for &i in &diagram.word(e.tower)[..e.floor] {
        acc -= phi.value(i);
    }
    acc
}

/// Tabulated floor cocycle over all edges of a diagram.
#[derive(Clone, Debug)]
pub struct FloorCocycle {
    table: Vec<Vec<GroupElement>>,
    phi: SkewCocycle,
}

impl FloorCocycle {
    pub fn new(diagram: &Diagram, phi: &SkewCocycle) -> Result<Self> {
        if phi.d() != diagram.d() {
            return Err(Error::DimensionMismatch {
                expected: diagram.d(),
                found: phi.d(),
            });
        }
        let table = diagram
            .words()
            .iter()
            .map(|w| {
                let mut acc = GroupElement::zero(phi.m());
                let mut col = Vec::with_capacity(w.len());
                for &i in w {
                    col.push(acc.clone());
                    acc -= phi.value(i);
                }
                col
            })
            .collect();
        Ok(Self {
            table,
            phi: phi.clone(),
        })
    }

    pub fn m(&self) -> usize {
        self.phi.m()
    }

    pub fn phi(&self) -> &SkewCocycle {
        &self.phi
    }

    pub fn value(&self, e: Edge) -> &GroupElement {
        &self.table[e.tower][e.floor]
    }

    /// `S_k f(p) = sum_{r < k} f(e_{r+1})`; only the first `k` edges matter.
    pub fn birkhoff_sum(&self, p: &FinitePath, k: usize) -> GroupElement {
        let mut acc = GroupElement::zero(self.m());
        for &e in &p.edges()[..k] {
            acc += self.value(e);
        }
        acc
    }

    /// Sum of `f` over the edges of a cycle in the edge graph.
    pub fn cycle_sum(&self, edges: &[Edge]) -> GroupElement {
        let mut acc = GroupElement::zero(self.m());
        for &e in edges {
            acc += self.value(e);
        }
        acc
    }

    /// `phi(p) = phi_{s(e_1)}`.
    pub fn phi_at(&self, diagram: &Diagram, p: &FinitePath) -> &GroupElement {
        self.phi.value(diagram.source(p.first()))
    }
}

/// `phi_f(p) = sum_i f(sigma^i p) - f(sigma^i tau p)`, truncated at the
/// first non-maximal edge beyond which `p` and `tau p` agree.
pub fn tail_cocycle(diagram: &Diagram, f: &FloorCocycle, p: &FinitePath) -> Result<GroupElement> {
    let next = diagram.adic_successor(p)?;
    let n = p
        .edges()
        .iter()
        .position(|&e| !diagram.is_max_edge(e))
        .expect("successor exists");
    let mut acc = GroupElement::zero(f.m());
    for r in 0..=n {
        acc += f.value(p.edges()[r]);
        acc -= f.value(next.edges()[r]);
    }
    Ok(acc)
}

/// `f(p) - phi(p) + phi(sigma p)`, which vanishes when `e_1` is a top floor
/// and `phi` is of periodic type.
pub fn top_floor_defect(diagram: &Diagram, f: &FloorCocycle, p: &FinitePath) -> Result<GroupElement> {
    let rest = diagram.left_shift(p)?;
    let mut acc = f.value(p.first()).clone();
    acc -= f.phi_at(diagram, p);
    acc += f.phi_at(diagram, &rest);
    Ok(acc)
}

/// A point `(p, a)` of the skewed path space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkewedPathState {
    pub path: FinitePath,
    pub fiber: GroupElement,
}

impl SkewedPathState {
    pub fn new(path: FinitePath, fiber: GroupElement) -> Self {
        Self { path, fiber }
    }
}

/// `(p, a) -> (tau p, a + phi_{s(e_1)})`.
pub fn skewed_adic_step(diagram: &Diagram, f: &FloorCocycle, s: &SkewedPathState) -> Result<SkewedPathState> {
    let path = diagram.adic_successor(&s.path)?;
    Ok(SkewedPathState {
        fiber: &s.fiber + f.phi_at(diagram, &s.path),
        path,
    })
}

/// Inverse of [`skewed_adic_step`].
pub fn skewed_adic_step_back(diagram: &Diagram, f: &FloorCocycle, s: &SkewedPathState) -> Result<SkewedPathState> {
    let path = diagram.adic_predecessor(&s.path)?;
    Ok(SkewedPathState {
        fiber: &s.fiber - f.phi_at(diagram, &path),
        path,
    })
}

/// `(p, a) -> (sigma p, a + f(e_1))`.
pub fn skewed_shift_step(diagram: &Diagram, f: &FloorCocycle, s: &SkewedPathState) -> Result<SkewedPathState> {
    Ok(SkewedPathState {
        path: diagram.left_shift(&s.path)?,
        fiber: &s.fiber + f.value(s.path.first()),
    })
}

/// `sigma_f^k(p, a)`, keyed by the vertex `t(e_k)`, the remaining edges and
/// the fiber. A path of length exactly `k` keeps only its top vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftImage {
    pub vertex: usize,
    pub rest: Vec<Edge>,
    pub fiber: GroupElement,
}

pub fn shift_image(f: &FloorCocycle, s: &SkewedPathState, k: usize) -> Result<ShiftImage> {
    if k == 0 || s.path.len() < k {
        return Err(Error::PathTooShort(s.path.len()));
    }
    Ok(ShiftImage {
        vertex: s.path.edges()[k - 1].tower,
        rest: s.path.edges()[k..].to_vec(),
        fiber: &s.fiber + &f.birkhoff_sum(&s.path, k),
    })
}

/// If `sigma_f^k(s1) = sigma_f^k(s2)`, the `n` with `tau_phi^n(s1) = s2`,
/// found by iterating forwards and backwards inside the level-`k` tower.
pub fn tail_orbit_witness(
    diagram: &Diagram,
    f: &FloorCocycle,
    s1: &SkewedPathState,
    s2: &SkewedPathState,
    k: usize,
) -> Result<Option<i64>> {
    if shift_image(f, s1, k)? != shift_image(f, s2, k)? {
        return Ok(None);
    }
    let stays = |s: &SkewedPathState, forward: bool| {
        let prefix = s.path.prefix(k);
        if forward {
            !diagram.is_maximal(&prefix)
        } else {
            !diagram.is_minimal(&prefix)
        }
    };
    for forward in [true, false] {
        let mut cur = s1.clone();
        let mut n = 0i64;
        loop {
            if &cur == s2 {
                return Ok(Some(n));
            }
            if !stays(&cur, forward) {
                break;
            }
            if forward {
                cur = skewed_adic_step(diagram, f, &cur)?;
                n += 1;
            } else {
                cur = skewed_adic_step_back(diagram, f, &cur)?;
                n -= 1;
            }
        }
    }
    Ok(None)
}

/// Witness that the floor cocycle is aperiodic: after repeating the loop
/// `exponent` times all tower words agree on positions `0..=M`, the letters
/// `i(1), ..., i(M-1)` cover every label and the self-loop fixed paths give
/// generators of the full lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AperiodicityCertificate {
    pub exponent: usize,
    #[serde(rename = "M")]
    pub m_prefix: usize,
    /// `i(1), ..., i(M-1)`, 1-based.
    pub prefix_letters: Vec<usize>,
    /// Distinct values of `f(p(n)) - f(p(n+1))`, in order of first appearance.
    pub generators: Vec<Vec<i64>>,
    pub invariant_factors: Vec<u64>,
    pub verdict: bool,
}

/// Prefixes of at most `cap` letters of the words of the loop repeated
/// `exponent` times, computed without building the full words.
pub fn word_prefixes(base: &[Vec<usize>], exponent: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<Vec<usize>> = base.iter().map(|w| w[..w.len().min(cap)].to_vec()).collect();
    for _ in 1..exponent {
        cur = cur
            .iter()
            .map(|p| {
                let mut out = Vec::with_capacity(cap);
                for &c in p {
                    if out.len() >= cap {
                        break;
                    }
                    out.extend_from_slice(&base[c]);
                }
                out.truncate(cap);
                out
            })
            .collect();
    }
    cur
}

fn common_prefix_len(words: &[Vec<usize>]) -> usize {
    let shortest = words.iter().map(Vec::len).min().unwrap_or(0);
    (0..shortest)
        .find(|&n| words.iter().any(|w| w[n] != words[0][n]))
        .unwrap_or(shortest)
}

fn lattice_rows(rows: &[Vec<i64>], m: usize) -> IntegerMatrix {
    if rows.is_empty() {
        return IntegerMatrix::zeros(1, m);
    }
    IntegerMatrix::from_rows(rows).expect("rows share dimension m")
}

fn factors_u64(rows: &[Vec<i64>], m: usize) -> Result<Vec<u64>> {
    invariant_factors(&lattice_rows(rows, m))
        .iter()
        .map(|x| x.to_u64().ok_or(Error::Overflow("invariant factor")))
        .collect()
}

fn full_lattice(factors: &[u64], m: usize) -> bool {
    factors.len() == m && factors.iter().all(|&x| x == 1)
}

/// Generators `f(p(n)) - f(p(n+1))` for `1 <= n <= M - 1`, where `p(n)` is
/// the fixed path of the self-loop `(i(n), n)`. `f(p(n)) = -sum_{r<n} phi_{i(r)}`.
fn prefix_generators(letters: &[usize], m_prefix: usize, phi: &SkewCocycle) -> Vec<Vec<i64>> {
    let m = phi.m();
    let f_at = |n: usize| {
        let mut acc = GroupElement::zero(m);
        for &i in &letters[..n] {
            acc -= phi.value(i);
        }
        acc
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..m_prefix {
        let g = f_at(n) - f_at(n + 1);
        if seen.insert(g.clone()) {
            out.push(g.coords().to_vec());
        }
    }
    out
}

/// Repeats the loop `1, 2, 4, ...` times until the towers share a covering
/// common prefix, then tests whether the collected generators span `Z^m`.
///
/// `M = min(LCP - 1, min_j q_j - 2)`, with the common prefix measured on at
/// most [`PREFIX_CAP`] letters. Exceeding the schedule is inconclusive and
/// reported as [`Error::AmplificationCap`].
pub fn amplify_for_common_prefix(lp: &RauzyLoop, phi: &SkewCocycle) -> Result<AperiodicityCertificate> {
    let a = lp.matrix();
    if !check_periodic_type(&a, phi) {
        return Err(Error::InvalidCocycle("cocycle is not of periodic type".into()));
    }
    let base = compose_loop(lp, 1)?;
    let d = lp.d();
    let mut last = String::new();
    for doubling in 0..=MAX_DOUBLINGS {
        let exponent = 1usize << doubling;
        let heights = a.pow(exponent as u32)?.column_sums();
        let min_q = heights.iter().min().expect("d >= 2");
        let prefixes = word_prefixes(base.words(), exponent, PREFIX_CAP);
        let lcp = common_prefix_len(&prefixes);
        // min_q - 2, saturating into usize
        let q_bound = (min_q - BigInt::from(2)).to_usize().unwrap_or(usize::MAX);
        let m_prefix = lcp.saturating_sub(1).min(q_bound);
        let letters = &prefixes[0];
        let covered: HashSet<usize> = letters[1..m_prefix.max(1)].iter().copied().collect();
        if m_prefix < 2 || covered.len() < d {
            last = format!(
                "exponent {exponent}: common prefix {lcp}, min height {min_q}, {} of {d} labels covered",
                covered.len()
            );
            continue;
        }
        let generators = prefix_generators(letters, m_prefix, phi);
        let factors = factors_u64(&generators, phi.m())?;
        return Ok(AperiodicityCertificate {
            exponent,
            m_prefix,
            prefix_letters: letters[1..m_prefix].iter().map(|x| x + 1).collect(),
            verdict: full_lattice(&factors, phi.m()),
            generators,
            invariant_factors: factors,
        });
    }
    Err(Error::AmplificationCap(format!(
        "no covering common prefix up to {} repetitions ({last})",
        1usize << MAX_DOUBLINGS
    )))
}

/// Largest number of floors for which [`AperiodicityCertificate::revalidate`]
/// builds the tower words in full.
pub const REVALIDATE_FLOOR_LIMIT: u64 = 5_000_000;

impl AperiodicityCertificate {
    /// Re-checks every stored field against the full tower words of the
    /// amplified loop and the diagram's own floor cocycle.
    pub fn revalidate(&self, lp: &RauzyLoop, phi: &SkewCocycle) -> Result<bool> {
        let floors = lp.matrix().pow(self.exponent as u32)?.column_sums();
        let total: BigInt = floors.iter().sum();
        if total > BigInt::from(REVALIDATE_FLOOR_LIMIT) {
            return Err(Error::Overflow("certificate revalidation size"));
        }
        let towers = compose_loop(lp, self.exponent)?;
        let diagram = crate::bratteli::build_diagram(&towers);
        let f = FloorCocycle::new(&diagram, phi)?;
        let m = self.m_prefix;
        let d = towers.d();
        if m < 2 || self.prefix_letters.len() != m - 1 {
            return Ok(false);
        }
        // min_j q_j > M + 1
        if towers.heights().iter().any(|&q| q <= m as u64 + 1) {
            return Ok(false);
        }
        // positions 0..=M agree across towers, and match the stored letters
        let w0 = towers.word(0);
        if towers.words().iter().any(|w| w[..=m] != w0[..=m]) {
            return Ok(false);
        }
        if (1..m).any(|n| self.prefix_letters[n - 1] != w0[n] + 1) {
            return Ok(false);
        }
        let covered: HashSet<usize> = w0[1..m].iter().copied().collect();
        if covered.len() != d {
            return Ok(false);
        }
        // generators from the fixed paths p(n) = (e, e, ...), e = (i(n), n)
        let mut seen = HashSet::new();
        let mut gens = Vec::new();
        for n in 1..m {
            let e = Edge::new(w0[n], n);
            let e_next = Edge::new(w0[n + 1], n + 1);
            for edge in [e, e_next] {
                if diagram.source(edge) != edge.tower || diagram.is_max_edge(edge) {
                    return Ok(false);
                }
            }
            let g = f.value(e) - f.value(e_next);
            if seen.insert(g.clone()) {
                gens.push(g.coords().to_vec());
            }
        }
        if gens != self.generators {
            return Ok(false);
        }
        let factors = factors_u64(&gens, phi.m())?;
        Ok(factors == self.invariant_factors && self.verdict == full_lattice(&factors, phi.m()))
    }

    pub fn generator_matrix(&self, m: usize) -> IntegerMatrix {
        lattice_rows(&self.generators, m)
    }
}

/// Outcome of [`delta_closure_probe`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    /// Sample pairs actually drawn.
    pub samples: usize,
    pub seed: u64,
    /// Differences of equal-length cycle sums that left the lattice.
    pub outside: usize,
    /// Concatenations whose sum differed from `delta_p + delta_q`.
    pub concatenation_failures: usize,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.samples > 0 && self.outside == 0 && self.concatenation_failures == 0
    }
}

const CYCLE_ATTEMPTS: usize = 64;

struct CycleSampler<'a> {
    diagram: &'a Diagram,
    out_edges: Vec<Vec<Edge>>,
}

impl<'a> CycleSampler<'a> {
    fn new(diagram: &'a Diagram) -> Self {
        let mut out_edges = vec![Vec::new(); diagram.d()];
        for e in diagram.edges() {
            out_edges[diagram.source(e)].push(e);
        }
        Self { diagram, out_edges }
    }

    fn edge_between(&self, rng: &mut ChaCha8Rng, from: usize, to: usize) -> Option<Edge> {
        let options: Vec<Edge> = self.out_edges[from].iter().copied().filter(|e| e.tower == to).collect();
        (!options.is_empty()).then(|| options[rng.random_range(0..options.len())])
    }

    /// Random cycle at `start` of length `len` that is neither all-maximal
    /// nor all-minimal, so it names a point off the boundary orbit. Gives up
    /// after a bounded number of attempts, since short cycles at some
    /// vertices may all be extreme.
    fn cycle(&self, rng: &mut ChaCha8Rng, start: usize, len: usize) -> Option<Vec<Edge>> {
        for _ in 0..CYCLE_ATTEMPTS {
            let mut edges = Vec::with_capacity(len);
            let mut v = start;
            for _ in 1..len {
                let opts = &self.out_edges[v];
                let e = opts[rng.random_range(0..opts.len())];
                edges.push(e);
                v = e.tower;
            }
            let Some(last) = self.edge_between(rng, v, start) else {
                continue;
            };
            edges.push(last);
            let all_max = edges.iter().all(|&e| self.diagram.is_max_edge(e));
            let all_min = edges.iter().all(|&e| self.diagram.is_min_edge(e));
            if !all_max && !all_min {
                return Some(edges);
            }
        }
        None
    }
}

fn to_big(g: &GroupElement) -> Vec<BigInt> {
    g.coords().iter().map(|&x| BigInt::from(x)).collect()
}

/// Sampled closure check of the group of differences of equal-length
/// Birkhoff sums over shift-periodic paths: differences must land in the
/// lattice spanned by `generators`, and the concatenation of two pairs
/// through a hub vertex must realize the sum of their differences.
pub fn delta_closure_probe(
    diagram: &Diagram,
    f: &FloorCocycle,
    generators: &IntegerMatrix,
    samples: usize,
    seed: u64,
) -> ProbeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = CycleSampler::new(diagram);
    let d = diagram.d();
    let mut outside = 0;
    let mut concatenation_failures = 0;
    let mut drawn = 0;
    let mut attempts = 0;
    while drawn < samples && attempts < samples * CYCLE_ATTEMPTS {
        attempts += 1;
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=6);
        let (v1, v2, w1, w2) = (
            rng.random_range(0..d),
            rng.random_range(0..d),
            rng.random_range(0..d),
            rng.random_range(0..d),
        );
        let cycles = (
            sampler.cycle(&mut rng, v1, n),
            sampler.cycle(&mut rng, v2, n),
            sampler.cycle(&mut rng, w1, m),
            sampler.cycle(&mut rng, w2, m),
        );
        let (Some(p1), Some(p2), Some(q1), Some(q2)) = cycles else {
            continue;
        };
        drawn += 1;
        let delta_p = f.cycle_sum(&p1) - f.cycle_sum(&p2);
        let delta_q = f.cycle_sum(&q1) - f.cycle_sum(&q2);
        for delta in [&delta_p, &delta_q] {
            if !in_lattice(generators, &to_big(delta)) {
                outside += 1;
            }
        }
        // hub vertex with single-edge excursions gamma^+_v, gamma^-_v
        let hub = rng.random_range(0..d);
        let mut hub_edges = Vec::with_capacity(4);
        for v in [v1, v2, w1, w2] {
            let plus = sampler.edge_between(&mut rng, hub, v);
            let minus = sampler.edge_between(&mut rng, v, hub);
            if let (Some(plus), Some(minus)) = (plus, minus) {
                hub_edges.push((plus, minus));
            }
        }
        if hub_edges.len() < 4 {
            concatenation_failures += 1;
            continue;
        }
        let build = |inner: [Option<&[Edge]>; 4]| {
            let mut out = Vec::new();
            for (i, (plus, minus)) in hub_edges.iter().enumerate() {
                out.push(*plus);
                if let Some(c) = inner[i] {
                    out.extend_from_slice(c);
                }
                out.push(*minus);
            }
            out
        };
        let a1 = build([Some(&p1), None, Some(&q1), None]);
        let a2 = build([None, Some(&p2), None, Some(&q2)]);
        let b = build([None; 4]);
        debug_assert_eq!(a1.len(), a2.len());
        debug_assert_eq!(a1.len(), b.len() + n + m);
        let lhs = f.cycle_sum(&a1) - f.cycle_sum(&a2);
        if lhs != &delta_p + &delta_q {
            concatenation_failures += 1;
        }
        if !in_lattice(generators, &to_big(&lhs)) {
            outside += 1;
        }
    }
    ProbeReport {
        samples: drawn,
        seed,
        outside,
        concatenation_failures,
    }
}

/// Whether the generator set equals `{phi_j}` as a set.
pub fn generators_match_values(cert: &AperiodicityCertificate, phi: &SkewCocycle) -> bool {
    let gens: HashSet<Vec<i64>> = cert.generators.iter().cloned().collect();
    let values: HashSet<Vec<i64>> = phi.values().iter().map(|v| v.coords().to_vec()).collect();
    gens == values
}
