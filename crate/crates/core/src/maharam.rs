//! The level-counting Laurent matrix, Perron-Frobenius data of its
//! evaluations and closed-form Maharam measures of cylinders.
//!
//! Conventions: the Perron vector is normalized by `sum_i v_i = 1`, and the
//! measure by `mu(K x {0}) = 1`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GroupElement, LaurentMatrix, LaurentPolynomial};
use crate::bratteli::{Diagram, FinitePath};
use crate::cocycles::FloorCocycle;
use crate::error::{Error, Result};

pub const PERRON_TOLERANCE: f64 = 1e-12;
pub const PERRON_MAX_ITERATIONS: usize = 100_000;

/// `M_ij(t) = sum_{e : s(e) = i, t(e) = j} t^{f(e)}`.
pub fn level_counting_matrix(diagram: &Diagram, f: &FloorCocycle) -> LaurentMatrix {
    let d = diagram.d();
    let mut m = LaurentMatrix::zeros(d, f.m());
    for e in diagram.edges() {
        m.get_mut(diagram.source(e), e.tower)
            .add_term(f.value(e).clone(), BigInt::from(1));
    }
    m
}

/// The same matrix power built from scratch: every admissible path of
/// length `k` contributes `t^{S_k f(p)}` to entry `(s(e_1), t(e_k))`.
pub fn level_counting_by_paths(diagram: &Diagram, f: &FloorCocycle, k: usize) -> LaurentMatrix {
    let d = diagram.d();
    let mut m = LaurentMatrix::zeros(d, f.m());
    for p in diagram.enumerate_paths(k) {
        m.get_mut(diagram.source(p.first()), p.target())
            .add_term(f.birkhoff_sum(&p, k), BigInt::from(1));
    }
    m
}

/// Number of level-`k` floors over `K_i` in the skew tower `(j, a)`: the
/// coefficient of `t^a` in `(M^k)_ij`.
pub fn b_counts(m: &LaurentMatrix, k: u32, i: usize, j: usize, a: &GroupElement) -> Result<BigInt> {
    Ok(m.pow(k)?.get(i, j).coeff(a))
}

/// A homomorphism `psi: Z^m -> R` and `lambda_i = exp(psi(u_i))`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaharamParameter {
    psi: Vec<f64>,
    lambda: Vec<f64>,
}

impl MaharamParameter {
    pub fn new(psi: Vec<f64>) -> Result<Self> {
        if psi.is_empty() {
            return Err(Error::InvalidCocycle("psi needs at least one coordinate".into()));
        }
        if let Some(&bad) = psi.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidCocycle(format!("psi coordinate {bad} is not finite")));
        }
        let lambda = psi.iter().map(|x| x.exp()).collect();
        Ok(Self { psi, lambda })
    }

    pub fn zero(m: usize) -> Self {
        Self::new(vec![0.0; m]).expect("finite")
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn m(&self) -> usize {
        self.psi.len()
    }

    /// `lambda^a = exp(psi(a))`.
    pub fn weight(&self, a: &GroupElement) -> f64 {
        a.pair(&self.psi).exp()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerronData {
    pub r: f64,
    pub v: Vec<f64>,
    pub iterations: usize,
    /// `||M v - r v||_1 / r`.
    pub residual: f64,
}

fn residual(m: &[Vec<f64>], r: f64, v: &[f64]) -> f64 {
    let mut num = 0.0;
    for (i, row) in m.iter().enumerate() {
        let mv: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        num += (mv - r * v[i]).abs();
    }
    num / r
}

/// Power iteration from the uniform vector on a strictly positive matrix,
/// normalized in `l^1`.
pub fn perron(m: &[Vec<f64>]) -> Result<PerronData> {
    let d = m.len();
    if d == 0 || m.iter().any(|row| row.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.first().map_or(0, Vec::len),
        });
    }
    if m.iter().flatten().any(|&x| x.is_nan() || x <= 0.0 || !x.is_finite()) {
        return Err(Error::NonPositiveMatrix);
    }
    let mut v = vec![1.0 / d as f64; d];
    let mut r = 0.0;
    let mut res = f64::INFINITY;
    for it in 1..=PERRON_MAX_ITERATIONS {
        let w: Vec<f64> = m
            .iter()
            .map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        r = w.iter().sum();
        let next: Vec<f64> = w.iter().map(|x| x / r).collect();
        let change: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        if change <= PERRON_TOLERANCE * 1e-2 {
            res = residual(m, r, &v);
            if res <= PERRON_TOLERANCE {
                return Ok(PerronData {
                    r,
                    v,
                    iterations: it,
                    residual: res,
                });
            }
        }
    }
    if res.is_infinite() {
        res = residual(m, r, &v);
    }
    Err(Error::NoConvergence {
        iterations: PERRON_MAX_ITERATIONS,
        residual: res,
    })
}

/// The Maharam measure `mu_psi` on cylinders `J(p) x {a}`.
#[derive(Clone, Debug)]
pub struct MaharamMeasure<'a> {
    diagram: &'a Diagram,
    f: &'a FloorCocycle,
    param: MaharamParameter,
    perron: PerronData,
    log_r: f64,
}

impl<'a> MaharamMeasure<'a> {
    pub fn new(diagram: &'a Diagram, f: &'a FloorCocycle, param: MaharamParameter) -> Result<Self> {
        if param.m() != f.m() {
            return Err(Error::DimensionMismatch {
                expected: f.m(),
                found: param.m(),
            });
        }
        let m = level_counting_matrix(diagram, f).eval(param.lambda())?;
        let perron = perron(&m)?;
        Ok(Self {
            diagram,
            f,
            log_r: perron.r.ln(),
            param,
            perron,
        })
    }

    pub fn parameter(&self) -> &MaharamParameter {
        &self.param
    }

    pub fn perron(&self) -> &PerronData {
        &self.perron
    }

    /// `mu(K_i x {a}) = lambda^a v_i`.
    pub fn base_measure(&self, i: usize, a: &GroupElement) -> f64 {
        self.param.weight(a) * self.perron.v[i]
    }

    /// `mu(J(p) x {a}) = lambda^{a + S_k f(p)} v_{t(p)} / r^k`.
    pub fn cylinder_measure(&self, p: &FinitePath, a: &GroupElement) -> f64 {
        let k = p.len();
        let exponent = a + &self.f.birkhoff_sum(p, k);
        (exponent.pair(self.param.psi()) - k as f64 * self.log_r).exp() * self.perron.v[p.target()]
    }

    /// `nu(J(p)) = mu(J(p) x {0})`.
    pub fn base_marginal(&self, p: &FinitePath) -> f64 {
        self.cylinder_measure(p, &GroupElement::zero(self.f.m()))
    }

    pub fn diagram(&self) -> &Diagram {
        self.diagram
    }
}

/// `max_i |w0_i - (M(lambda)^k w^(k))_i|` with `w^(k) = r^{-k} v`, where
/// `M(lambda)^k` is assembled from the exact b-counts.
pub fn invariance_recurrence_check(mu: &MaharamMeasure<'_>, k: u32) -> Result<f64> {
    let m = level_counting_matrix(mu.diagram, mu.f).pow(k)?;
    let d = mu.diagram.d();
    let scale = (-(k as f64) * mu.log_r).exp();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let mut rhs = 0.0;
        for j in 0..d {
            for (a, b) in m.get(i, j).terms() {
                let count = num_traits::ToPrimitive::to_f64(b).unwrap_or(f64::INFINITY);
                rhs += count * mu.param.weight(a) * scale * mu.perron.v[j];
            }
        }
        worst = worst.max((mu.base_measure(i, &GroupElement::zero(mu.f.m())) - rhs).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepCheck {
    pub samples: usize,
    /// `max |mu(J(tau p) x {a + phi(p)}) - mu(J(p) x {a})|`.
    pub invariance_abs: f64,
    /// The same difference relative to `mu(J(p) x {a})`.
    pub invariance_rel: f64,
    /// `max |nu(J(tau p)) / nu(J(p)) - exp(-psi(phi(p)))| / exp(-psi(phi(p)))`.
    pub quasi_invariance_rel: f64,
}

/// A uniformly random non-maximal level-`k` path.
pub fn random_nonmaximal_path(diagram: &Diagram, k: usize, rng: &mut ChaCha8Rng) -> Result<FinitePath> {
    let heights = diagram.level_heights(k)?;
    let total: u64 = heights.iter().sum();
    loop {
        let mut x = rng.random_range(0..total);
        let mut j = 0;
        while x >= heights[j] {
            x -= heights[j];
            j += 1;
        }
        let p = diagram.floor_to_path(k, j, x)?;
        if !diagram.is_maximal(&p) {
            return Ok(p);
        }
    }
}

/// Executable invariance of `mu_psi` under the skewed adic map, and
/// quasi-invariance of its base marginal, on random level-`k` cylinders.
pub fn invariance_step_check(mu: &MaharamMeasure<'_>, samples: usize, k: usize, seed: u64) -> Result<StepCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = mu.f.m();
    let mut out = StepCheck {
        samples,
        invariance_abs: 0.0,
        invariance_rel: 0.0,
        quasi_invariance_rel: 0.0,
    };
    for _ in 0..samples {
        let p = random_nonmaximal_path(mu.diagram, k, &mut rng)?;
        let a = GroupElement::new((0..m).map(|_| rng.random_range(-3..=3)).collect());
        let next = mu.diagram.adic_successor(&p)?;
        let phi = mu.f.phi_at(mu.diagram, &p);
        let before = mu.cylinder_measure(&p, &a);
        let after = mu.cylinder_measure(&next, &(&a + phi));
        let diff = (after - before).abs();
        out.invariance_abs = out.invariance_abs.max(diff);
        out.invariance_rel = out.invariance_rel.max(diff / before);
        let expected = (-phi.pair(mu.param.psi())).exp();
        let ratio = mu.base_marginal(&next) / mu.base_marginal(&p);
        out.quasi_invariance_rel = out.quasi_invariance_rel.max((ratio - expected).abs() / expected);
    }
    Ok(out)
}

/// Largest `|S_k f(p)|_inf` over level-`k` paths, by a per-coordinate
/// extremal recursion over the levels.
pub fn max_fiber_excursion(diagram: &Diagram, f: &FloorCocycle, k: usize) -> i64 {
    let d = diagram.d();
    let m = f.m();
    // lo[j][c], hi[j][c]: extremes of coordinate c of S f over paths into j
    let mut lo = vec![vec![0i64; m]; d];
    let mut hi = vec![vec![0i64; m]; d];
    for level in 1..=k {
        let mut nlo = vec![vec![i64::MAX; m]; d];
        let mut nhi = vec![vec![i64::MIN; m]; d];
        for e in diagram.edges() {
            let s = diagram.source(e);
            for c in 0..m {
                let v = f.value(e).coords()[c];
                let (below_lo, below_hi) = if level == 1 { (0, 0) } else { (lo[s][c], hi[s][c]) };
                nlo[e.tower][c] = nlo[e.tower][c].min(below_lo + v);
                nhi[e.tower][c] = nhi[e.tower][c].max(below_hi + v);
            }
        }
        lo = nlo;
        hi = nhi;
    }
    lo.iter()
        .chain(&hi)
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or(0)
}

/// All fibers `a` with `|a|_inf <= bound`, in lexicographic order.
pub fn fiber_box(m: usize, bound: i64) -> Vec<GroupElement> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (-bound..=bound).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(GroupElement::new).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureRow {
    pub level: usize,
    /// `[i]` for the level-0 set `K_i`, otherwise the rendered path.
    pub cylinder: String,
    pub fiber: GroupElement,
    pub measure: f64,
}

/// Cylinder measures for one `psi` at levels `0..=k`.
#[derive(Clone, Debug)]
pub struct MeasureTable {
    pub psi: Vec<f64>,
    pub level: usize,
    pub fiber_bound: i64,
    pub rows: Vec<MeasureRow>,
}

impl MeasureTable {
    pub fn build(mu: &MaharamMeasure<'_>, k: usize) -> Self {
        let bound = max_fiber_excursion(mu.diagram, mu.f, k);
        let fibers = fiber_box(mu.f.m(), bound);
        let mut rows = Vec::new();
        for i in 0..mu.diagram.d() {
            for a in &fibers {
                rows.push(MeasureRow {
                    level: 0,
                    cylinder: format!("[{}]", i + 1),
                    fiber: a.clone(),
                    measure: mu.base_measure(i, a),
                });
            }
        }
        for level in 1..=k {
            let mut paths = mu.diagram.enumerate_paths(level);
            paths.sort();
            for p in &paths {
                let name = p.to_string();
                for a in &fibers {
                    rows.push(MeasureRow {
                        level,
                        cylinder: name.clone(),
                        fiber: a.clone(),
                        measure: mu.cylinder_measure(p, a),
                    });
                }
            }
        }
        Self {
            psi: mu.param.psi().to_vec(),
            level: k,
            fiber_bound: bound,
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let m = self.psi.len();
        let mut out = String::new();
        let psi_cols: Vec<String> = (1..=m).map(|i| format!("psi_{i}")).collect();
        let _ = writeln!(out, "{},level,path,fiber,measure", psi_cols.join(","));
        let psi: Vec<String> = self.psi.iter().map(|x| format!("{x}")).collect();
        let psi = psi.join(",");
        for r in &self.rows {
            let _ = writeln!(out, "{psi},{},{},\"{}\",{:e}", r.level, r.cylinder, r.fiber, r.measure);
        }
        out
    }
}

/// Dyadic grid on `[lo, hi]^m` with `2^refinement + 1` points per axis,
/// listed in row-major order.
pub fn dyadic_grid(m: usize, lo: f64, hi: f64, refinement: u32) -> (f64, Vec<Vec<f64>>) {
    let n = 1usize << refinement;
    let step = (hi - lo) / n as f64;
    let axis: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
    (step, product_grid(&vec![axis; m]))
}

/// Row-major cartesian product of per-axis values.
pub fn product_grid(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                axis.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityRow {
    pub grid_step: f64,
    pub cylinder_id: usize,
    pub psi: Vec<f64>,
    pub measure: f64,
    /// Largest change to a grid neighbour (one step along one axis).
    pub adjacent_delta: f64,
}

#[derive(Clone, Debug)]
pub struct ContinuityProfile {
    pub rows: Vec<ContinuityRow>,
    /// `(grid_step, max adjacent_delta)` per refinement, coarsest first.
    pub modulus: Vec<(f64, f64)>,
}

impl ContinuityProfile {
    /// Whether the observed modulus strictly decreases under refinement.
    pub fn is_monotone(&self) -> bool {
        self.modulus.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn to_csv(&self) -> String {
        let m = self.rows.first().map_or(0, |r| r.psi.len());
        let mut out = String::new();
        let psi_cols: Vec<String> = (1..=m).map(|i| format!("psi_{i}")).collect();
        let _ = writeln!(out, "grid_step,cylinder_id,{},measure,adjacent_delta", psi_cols.join(","));
        for r in &self.rows {
            let psi: Vec<String> = r.psi.iter().map(|x| format!("{x}")).collect();
            let _ = writeln!(
                out,
                "{},{},{},{:e},{:e}",
                r.grid_step,
                r.cylinder_id,
                psi.join(","),
                r.measure,
                r.adjacent_delta
            );
        }
        out
    }
}

/// One grid of `psi` values with its axis layout: `points[idx]` has
/// neighbours at `idx +- stride[c]` along axis `c`.
#[derive(Clone, Debug)]
pub struct PsiGrid {
    pub step: f64,
    pub shape: Vec<usize>,
    pub points: Vec<Vec<f64>>,
}

impl PsiGrid {
    pub fn dyadic(m: usize, lo: f64, hi: f64, refinement: u32) -> Self {
        let (step, points) = dyadic_grid(m, lo, hi, refinement);
        Self {
            step,
            shape: vec![(1usize << refinement) + 1; m],
            points,
        }
    }

    pub fn from_axes(axes: &[Vec<f64>]) -> Self {
        let step = axes
            .iter()
            .filter(|a| a.len() > 1)
            .map(|a| (a[1] - a[0]).abs())
            .fold(0.0, f64::max);
        Self {
            step,
            shape: axes.iter().map(Vec::len).collect(),
            points: product_grid(axes),
        }
    }

    fn neighbours(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stride = 1;
        for &len in self.shape.iter().rev() {
            let coord = (idx / stride) % len;
            if coord + 1 < len {
                out.push(idx + stride);
            }
            if coord > 0 {
                out.push(idx - stride);
            }
            stride *= len;
        }
        out
    }
}

/// Measures of a fixed cylinder family over each grid, with the observed
/// modulus `max |mu_psi - mu_psi'|` over adjacent grid points.
pub fn continuity_profile(
    diagram: &Diagram,
    f: &FloorCocycle,
    grids: &[PsiGrid],
    cylinders: &[(FinitePath, GroupElement)],
) -> Result<ContinuityProfile> {
    let mut rows = Vec::new();
    let mut modulus = Vec::new();
    for grid in grids {
        let values = grid
            .points
            .iter()
            .map(|psi| {
                let mu = MaharamMeasure::new(diagram, f, MaharamParameter::new(psi.clone())?)?;
                Ok(cylinders
                    .iter()
                    .map(|(p, a)| mu.cylinder_measure(p, a))
                    .collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut worst: f64 = 0.0;
        for (idx, psi) in grid.points.iter().enumerate() {
            let nb = grid.neighbours(idx);
            for (c, &value) in values[idx].iter().enumerate() {
                let delta = nb
                    .iter()
                    .map(|&n| (values[n][c] - value).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(delta);
                rows.push(ContinuityRow {
                    grid_step: grid.step,
                    cylinder_id: c,
                    psi: psi.clone(),
                    measure: value,
                    adjacent_delta: delta,
                });
            }
        }
        modulus.push((grid.step, worst));
    }
    Ok(ContinuityProfile { rows, modulus })
}

/// A deterministic family of `count` level-`k` cylinders at fiber 0.
pub fn cylinder_family(diagram: &Diagram, k: usize, count: usize, seed: u64) -> Result<Vec<(FinitePath, GroupElement)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Ok((random_nonmaximal_path(diagram, k, &mut rng)?, GroupElement::zero(0))))
        .collect()
}

/// `LaurentPolynomial` at a point, exposed for reports.
pub fn eval_entry(p: &LaurentPolynomial, lambda: &[f64]) -> Result<f64> {
    p.eval(lambda)
}
