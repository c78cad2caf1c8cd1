//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Expected values come from oracles written here against the raw tower
//! words, not from the library routines under test.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use skewadic::algebra::{GroupElement, IntegerMatrix};
use skewadic::bratteli::{build_diagram, Diagram, FinitePath};
use skewadic::cocycles::{
    amplify_for_common_prefix, delta_closure_probe, shift_image, skewed_adic_step, tail_cocycle,
    tail_orbit_witness, FloorCocycle, SkewedPathState,
};
use skewadic::iet::{compose_loop, pf_lengths, simulate_return_times, visit_frequencies};
use skewadic::instance::RauzyInstance;
use skewadic::maharam::{
    continuity_profile, level_counting_matrix, perron, MaharamMeasure, MaharamParameter, PsiGrid,
};
use skewadic::skew::{birkhoff_sum_at_return, check_periodic_type, SkewCocycle};

const INVARIANCE_TOL: f64 = 1e-10;
const PF_TOL: f64 = 1e-10;
const FREQUENCY_TOL: f64 = 5e-3;
const SEED: u64 = 20;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn(&[Case]) -> Check);

fn instance_paths() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("instances directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
}

struct Case {
    path: PathBuf,
    inst: RauzyInstance,
    phi: SkewCocycle,
    diagram: Diagram,
    f: FloorCocycle,
}

fn cases() -> Vec<Case> {
    instance_paths()
        .into_iter()
        .map(|path| {
            let inst = RauzyInstance::load(&path).expect("instance loads");
            let phi = inst.phi.clone().expect("packaged instances carry a cocycle");
            let diagram = build_diagram(&inst.towers);
            let f = FloorCocycle::new(&diagram, &phi).expect("floor cocycle");
            Case {
                path,
                inst,
                phi,
                diagram,
                f,
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn to_i64(m: &IntegerMatrix) -> Vec<Vec<i64>> {
    m.to_i64_rows().expect("small matrices")
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `A[i][j]` = occurrences of `i` in `w_j`.
fn incidence(words: &[Vec<usize>]) -> Vec<Vec<i64>> {
    let d = words.len();
    let mut a = vec![vec![0i64; d]; d];
    for (j, w) in words.iter().enumerate() {
        for &i in w {
            a[i][j] += 1;
        }
    }
    a
}

/// `f(j, l) = -sum_{l' < l} phi_{w_j[l']}`, straight from the words.
fn oracle_f(words: &[Vec<usize>], phi: &SkewCocycle, j: usize, l: usize) -> Vec<i64> {
    let mut acc = vec![0i64; phi.m()];
    for &i in &words[j][..l] {
        for (c, x) in phi.value(i).coords().iter().enumerate() {
            acc[c] -= x;
        }
    }
    acc
}

fn oracle_sum(words: &[Vec<usize>], phi: &SkewCocycle, p: &FinitePath) -> Vec<i64> {
    let mut acc = vec![0i64; phi.m()];
    for e in p.edges() {
        for (c, x) in oracle_f(words, phi, e.tower, e.floor).into_iter().enumerate() {
            acc[c] += x;
        }
    }
    acc
}

fn criterion_1(cases: &[Case]) -> Check {
    for c in cases {
        let lp = &c.inst.lp;
        let lengths = pf_lengths(&lp.matrix()).map_err(|e| e.to_string())?;
        for k in 1..=3 {
            let towers = compose_loop(lp, k).map_err(|e| e.to_string())?;
            let (q, words) = simulate_return_times(lp.start(), &lengths, k as u32).map_err(|e| e.to_string())?;
            ensure(q == towers.heights() && words == towers.words(), || {
                format!("{}: level {k} towers differ from the simulated orbit", c.inst.name)
            })?;
        }
    }
    Ok(format!("{} instances, k <= 3", cases.len()))
}

fn criterion_2(cases: &[Case]) -> Check {
    for c in cases {
        let lp = &c.inst.lp;
        let a1 = incidence(c.inst.towers.words());
        ensure(to_i64(&lp.matrix()) == a1, || format!("{}: A(1) is not the incidence matrix", c.inst.name))?;
        let mut ak = a1.clone();
        for k in 1..=4 {
            if k > 1 {
                ak = mat_mul(&ak, &a1);
            }
            let towers = compose_loop(lp, k).map_err(|e| e.to_string())?;
            ensure(to_i64(towers.matrix()) == ak, || format!("{}: A({k}) != A(1)^{k}", c.inst.name))?;
            let col: Vec<u64> = (0..ak.len()).map(|j| ak.iter().map(|r| r[j] as u64).sum()).collect();
            ensure(col == towers.heights(), || format!("{}: column sums of A({k}) != q", c.inst.name))?;
        }
        let d = c.phi.d();
        for j in 0..d {
            // (A^T phi)_j = sum_i A[i][j] phi_i
            let mut atphi = vec![0i64; c.phi.m()];
            for (i, row) in a1.iter().enumerate() {
                for (x, y) in atphi.iter_mut().zip(c.phi.value(i).coords()) {
                    *x += row[j] * y;
                }
            }
            let word_sum = birkhoff_sum_at_return(&c.inst.towers, &c.phi, j).map_err(|e| e.to_string())?;
            ensure(word_sum.coords() == atphi.as_slice(), || format!("{}: word sum of tower {}", c.inst.name, j + 1))?;
            ensure(atphi.as_slice() == c.phi.value(j).coords(), || format!("{}: A^T phi != phi", c.inst.name))?;
        }
        ensure(check_periodic_type(&lp.matrix(), &c.phi), || format!("{}: periodic type", c.inst.name))?;
    }
    Ok("A(k) = A^k, column sums, word sums, A^T phi = phi".into())
}

fn criterion_3(cases: &[Case]) -> Check {
    let mut total = 0;
    for c in cases {
        let words = c.inst.towers.words();
        let d = c.diagram.d();
        for k in 1..=3 {
            // heights[r][j] = |tower j| at level r
            let heights: Vec<Vec<u64>> = (0..k)
                .map(|r| {
                    if r == 0 {
                        vec![1; d]
                    } else {
                        compose_loop(&c.inst.lp, r).unwrap().heights().to_vec()
                    }
                })
                .collect();
            let reference = compose_loop(&c.inst.lp, k).unwrap();
            let paths = c.diagram.enumerate_paths(k);
            let floors: u64 = reference.heights().iter().sum();
            ensure(paths.len() as u64 == floors, || format!("{}: {} paths, {floors} floors", c.inst.name, paths.len()))?;
            let mut seen = HashSet::new();
            let mut index = HashMap::new();
            let (mut maxes, mut mins) = (0, 0);
            for p in &paths {
                let mut h = 0u64;
                for (r, e) in p.edges().iter().enumerate() {
                    h += words[e.tower][..e.floor].iter().map(|&x| heights[r][x]).sum::<u64>();
                }
                let j = p.target();
                let fc = c.diagram.path_to_floor(p).map_err(|e| e.to_string())?;
                ensure(fc.tower == j && fc.height == h, || format!("{}: floor of {p}", c.inst.name))?;
                ensure(seen.insert((j, h)), || format!("{}: floor ({j}, {h}) coded twice", c.inst.name))?;
                ensure(c.diagram.floor_to_path(k, j, h).as_ref() == Ok(p), || format!("{}: inverse at {p}", c.inst.name))?;
                ensure(reference.word(j)[h as usize] == c.diagram.source(p.first()), || {
                    format!("{}: {p} is not in interval {}", c.inst.name, c.diagram.source(p.first()) + 1)
                })?;
                index.insert(p.clone(), (j, h));
                let top = h + 1 == reference.heights()[j];
                let bottom = h == 0;
                ensure(c.diagram.is_maximal(p) == top && c.diagram.is_minimal(p) == bottom, || {
                    format!("{}: extremality of {p}", c.inst.name)
                })?;
                maxes += top as usize;
                mins += bottom as usize;
            }
            ensure(maxes == d && mins == d, || format!("{}: {maxes} maximal, {mins} minimal", c.inst.name))?;
            for p in paths.iter().filter(|p| !c.diagram.is_maximal(p)) {
                let (j, h) = index[p];
                let next = c.diagram.adic_successor(p).map_err(|e| e.to_string())?;
                ensure(index[&next] == (j, h + 1), || format!("{}: successor of {p}", c.inst.name))?;
            }
            total += paths.len();
        }
    }
    Ok(format!("{total} paths, k <= 3"))
}

fn random_floor(rng: &mut ChaCha8Rng, heights: &[u64], margin: u64) -> (usize, u64) {
    let j = rng.random_range(0..heights.len());
    (j, rng.random_range(0..heights[j] - margin))
}

fn criterion_4(cases: &[Case]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for c in cases {
        let words = c.inst.towers.words();
        // a level whose towers are taller than the orbit segments
        let k = (1..=c.diagram.max_level())
            .find(|&k| c.diagram.level_heights(k).unwrap().iter().all(|&q| q > 21))
            .ok_or("no tall level")?;
        let heights = c.diagram.level_heights(k).unwrap().to_vec();
        for _ in 0..1000 {
            let (j, h) = random_floor(&mut rng, &heights, 1);
            let p = c.diagram.floor_to_path(k, j, h).unwrap();
            let v = tail_cocycle(&c.diagram, &c.f, &p).map_err(|e| e.to_string())?;
            let expect = c.phi.value(words[p.first().tower][p.first().floor]);
            ensure(&v == expect, || format!("{}: phi_f({p}) = {v}, expected {expect}", c.inst.name))?;
        }
        for _ in 0..1000 {
            let (j, h) = random_floor(&mut rng, &heights, 20);
            let p = c.diagram.floor_to_path(k, j, h).unwrap();
            let mut cur = p.clone();
            let mut acc = vec![0i64; c.phi.m()];
            let base = oracle_sum(words, &c.phi, &p);
            for n in 1..=20 {
                for (x, y) in acc.iter_mut().zip(tail_cocycle(&c.diagram, &c.f, &cur).unwrap().coords()) {
                    *x += y;
                }
                cur = c.diagram.adic_successor(&cur).unwrap();
                let rhs: Vec<i64> = base.iter().zip(oracle_sum(words, &c.phi, &cur)).map(|(a, b)| a - b).collect();
                ensure(acc == rhs, || format!("{}: orbit identity at {p}, n = {n}", c.inst.name))?;
            }
        }
    }
    Ok("1000 tail values and 1000 orbit segments of length 20 per instance".into())
}

fn criterion_5(cases: &[Case]) -> Check {
    const K: usize = 2;
    let mut pairs = 0usize;
    for c in cases {
        let words = c.inst.towers.words();
        let m = c.phi.m();
        let heights = c.diagram.level_heights(K).unwrap().to_vec();
        // states (p, a) with a in a small box, grouped by sigma_f^K image
        let mut states = Vec::new();
        for p in c.diagram.enumerate_paths(K) {
            let s = oracle_sum(words, &c.phi, &p);
            for shift in -1i64..=1 {
                let a: Vec<i64> = s.iter().enumerate().map(|(i, x)| -x + if i == 0 { shift } else { 0 }).collect();
                states.push(SkewedPathState::new(p.clone(), GroupElement::new(a)));
            }
        }
        let mut groups: HashMap<_, Vec<SkewedPathState>> = HashMap::new();
        for s in states {
            groups.entry(shift_image(&c.f, &s, K).unwrap()).or_default().push(s);
        }
        let mut pick = ChaCha8Rng::seed_from_u64(SEED + 5);
        for (image, members) in &groups {
            let j = image.vertex;
            ensure(members.len() as u64 == heights[j], || {
                format!("{}: image group of size {} in tower {}", c.inst.name, members.len(), j + 1)
            })?;
            // walk the tower from its base floor; every member must appear,
            // so each pair (s1, s2) is witnessed by the index difference
            let mut cur = members.iter().find(|s| c.diagram.is_minimal(&s.path)).ok_or("no base floor")?.clone();
            let mut index = HashMap::new();
            for h in 0..heights[j] as i64 {
                index.insert(cur.clone(), h);
                if h + 1 < heights[j] as i64 {
                    cur = skewed_adic_step(&c.diagram, &c.f, &cur).unwrap();
                }
            }
            ensure(members.iter().all(|s| index.contains_key(s)), || {
                format!("{}: a floor with the image of tower {} is off its orbit", c.inst.name, j + 1)
            })?;
            pairs += members.len() * members.len();
            // the library's witness search agrees on a sample of pairs
            for _ in 0..200 {
                let s1 = &members[pick.random_range(0..members.len())];
                let s2 = &members[pick.random_range(0..members.len())];
                let n = tail_orbit_witness(&c.diagram, &c.f, s1, s2, K).map_err(|e| e.to_string())?;
                ensure(n == Some(index[s2] - index[s1]), || {
                    format!("{}: witness for {} ~ {} is {n:?}", c.inst.name, s1.path, s2.path)
                })?;
            }
        }
        // orbits inside one tower keep their image
        for (j, &height) in heights.iter().enumerate() {
            for shift in 0..m as i64 + 1 {
                let p = c.diagram.floor_to_path(K, j, 0).unwrap();
                let mut s = SkewedPathState::new(p, GroupElement::new(vec![shift; m]));
                let image = shift_image(&c.f, &s, K).unwrap();
                for _ in 1..height {
                    s = skewed_adic_step(&c.diagram, &c.f, &s).unwrap();
                    ensure(shift_image(&c.f, &s, K).unwrap() == image, || {
                        format!("{}: image changes along tower {}", c.inst.name, j + 1)
                    })?;
                }
            }
        }
    }
    Ok(format!("{pairs} witnessed pairs at level {K}"))
}

fn criterion_6(cases: &[Case]) -> Check {
    let mut notes = Vec::new();
    for c in cases {
        let cert = amplify_for_common_prefix(&c.inst.lp, &c.phi).map_err(|e| format!("{}: {e}", c.inst.name))?;
        ensure(cert.verdict && cert.invariant_factors.iter().all(|&x| x == 1), || {
            format!("{}: invariant factors {:?}", c.inst.name, cert.invariant_factors)
        })?;
        ensure(cert.invariant_factors.len() == c.phi.m(), || format!("{}: rank", c.inst.name))?;
        let gens: HashSet<Vec<i64>> = cert.generators.iter().cloned().collect();
        let values: HashSet<Vec<i64>> = c.phi.values().iter().map(|v| v.coords().to_vec()).collect();
        ensure(gens == values, || format!("{}: generators {gens:?} vs values {values:?}", c.inst.name))?;
        let probe = delta_closure_probe(&c.diagram, &c.f, &cert.generator_matrix(c.phi.m()), 100, SEED);
        ensure(probe.passed() && probe.samples == 100, || format!("{}: probe {probe:?}", c.inst.name))?;
        notes.push(format!("{}: N = {}x, M = {}", c.inst.name, cert.exponent, cert.m_prefix));
    }
    Ok(notes.join("; "))
}

/// `M^(k)` by brute force over paths, as exponent -> count maps.
fn oracle_counting(c: &Case, k: usize) -> Vec<Vec<BTreeMap<Vec<i64>, i64>>> {
    let d = c.diagram.d();
    let words = c.inst.towers.words();
    let mut m = vec![vec![BTreeMap::new(); d]; d];
    for p in c.diagram.enumerate_paths(k) {
        let i = words[p.first().tower][p.first().floor];
        *m[i][p.target()].entry(oracle_sum(words, &c.phi, &p)).or_insert(0) += 1;
    }
    m
}

fn criterion_7(cases: &[Case]) -> Check {
    for c in cases {
        let lm = level_counting_matrix(&c.diagram, &c.f);
        let d = c.diagram.d();
        let a1 = to_i64(&c.inst.lp.matrix());
        ensure(to_i64(&lm.eval_at_ones()) == a1, || format!("{}: M(1) != A", c.inst.name))?;
        let mut ak = a1.clone();
        for k in 1..=4u32 {
            if k > 1 {
                ak = mat_mul(&ak, &a1);
            }
            let mk = lm.pow(k).map_err(|e| e.to_string())?;
            let oracle = oracle_counting(c, k as usize);
            for i in 0..d {
                for j in 0..d {
                    let got: BTreeMap<Vec<i64>, i64> = mk
                        .get(i, j)
                        .terms()
                        .map(|(a, b)| (a.coords().to_vec(), i64::try_from(b).unwrap()))
                        .collect();
                    ensure(got == oracle[i][j], || format!("{}: M^{k}[{i}][{j}]", c.inst.name))?;
                    let total: i64 = got.values().sum();
                    ensure(total == ak[i][j], || format!("{}: sum of b({k})[{i}][{j}]", c.inst.name))?;
                    ensure(mk.get(i, j).coefficient_sum() == BigInt::from(ak[i][j]), || "coefficient sum".into())?;
                }
            }
        }
    }
    Ok("k <= 4, coefficient-exact".into())
}

fn float_pow(m: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut acc: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _ in 0..k {
        acc = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|l| acc[i][l] * m[l][j]).sum()).collect())
            .collect();
    }
    acc
}

fn criterion_8(cases: &[Case]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let (mut inv, mut quasi, mut rec) = (0.0f64, 0.0f64, 0.0f64);
    for c in cases {
        let words = c.inst.towers.words();
        let d = c.diagram.d();
        let m = c.phi.m();
        for _ in 0..20 {
            let psi: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let param = MaharamParameter::new(psi.clone()).unwrap();
            let mu = MaharamMeasure::new(&c.diagram, &c.f, param).map_err(|e| e.to_string())?;
            let pair = |a: &[i64]| a.iter().zip(&psi).map(|(x, y)| *x as f64 * y).sum::<f64>();
            // M(lambda) from the edge list
            let mut ml = vec![vec![0.0; d]; d];
            for (j, w) in words.iter().enumerate() {
                for (l, &i) in w.iter().enumerate() {
                    ml[i][j] += pair(&oracle_f(words, &c.phi, j, l)).exp();
                }
            }
            for k in 1..=5 {
                let heights = c.diagram.level_heights(k).unwrap().to_vec();
                for _ in 0..200 {
                    let (j, h) = random_floor(&mut rng, &heights, 1);
                    let p = c.diagram.floor_to_path(k, j, h).unwrap();
                    let a: Vec<i64> = (0..m).map(|_| rng.random_range(-3..=3)).collect();
                    let next = c.diagram.adic_successor(&p).unwrap();
                    let phi_p = c.phi.value(words[p.first().tower][p.first().floor]).coords();
                    let shifted: Vec<i64> = a.iter().zip(phi_p).map(|(x, y)| x + y).collect();
                    let before = mu.cylinder_measure(&p, &GroupElement::new(a.clone()));
                    let after = mu.cylinder_measure(&next, &GroupElement::new(shifted));
                    inv = inv.max((after - before).abs());
                    let zero = GroupElement::zero(m);
                    let ratio = mu.cylinder_measure(&next, &zero) / mu.cylinder_measure(&p, &zero);
                    let expect = (-pair(phi_p)).exp();
                    quasi = quasi.max((ratio - expect).abs() / expect);
                }
                // w0 = M(lambda)^k w(k), w(k)_j read off a cylinder into j
                let mk = float_pow(&ml, k);
                let mut wk = vec![0.0; d];
                for (j, w) in wk.iter_mut().enumerate() {
                    let p = c.diagram.floor_to_path(k, j, 0).unwrap();
                    let s: Vec<i64> = oracle_sum(words, &c.phi, &p).iter().map(|x| -x).collect();
                    *w = mu.cylinder_measure(&p, &GroupElement::new(s));
                }
                for (i, row) in mk.iter().enumerate() {
                    let rhs: f64 = row.iter().zip(&wk).map(|(x, y)| x * y).sum();
                    rec = rec.max((mu.base_measure(i, &GroupElement::zero(m)) - rhs).abs());
                }
            }
        }
    }
    let line = format!("invariance {inv:.2e}, quasi-invariance {quasi:.2e}, recurrence {rec:.2e}");
    ensure(inv <= INVARIANCE_TOL && quasi <= INVARIANCE_TOL && rec <= INVARIANCE_TOL, || line.clone())?;
    Ok(line)
}

fn criterion_9(cases: &[Case]) -> Check {
    let mut worst_pf = 0.0f64;
    let mut worst_freq = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    for c in cases {
        let a = c.inst.lp.matrix();
        let lengths = pf_lengths(&a).map_err(|e| e.to_string())?;
        let mu = MaharamMeasure::new(&c.diagram, &c.f, MaharamParameter::zero(c.phi.m())).unwrap();
        let v = &mu.perron().v;
        // PF lengths are normalized to total length 1, like v
        for (x, y) in v.iter().zip(lengths.lengths_f64()) {
            worst_pf = worst_pf.max((x - y).abs());
        }
        let direct = perron(&a.to_f64_rows()).unwrap();
        for (x, y) in v.iter().zip(&direct.v) {
            worst_pf = worst_pf.max((x - y).abs());
        }
        let start = rng.random_range(0.0..1.0);
        let freq = visit_frequencies(c.inst.lp.start(), &lengths, start, 1_000_000).map_err(|e| e.to_string())?;
        for (x, y) in freq.iter().zip(v) {
            worst_freq = worst_freq.max((x - y).abs());
        }
    }
    let line = format!("PF gap {worst_pf:.2e}, frequency gap {worst_freq:.2e}");
    ensure(worst_pf <= PF_TOL && worst_freq <= FREQUENCY_TOL, || line.clone())?;
    Ok(line)
}

fn criterion_10(cases: &[Case]) -> Check {
    let mut notes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    for c in cases {
        let m = c.phi.m();
        let heights = c.diagram.level_heights(4).unwrap().to_vec();
        let family: Vec<(FinitePath, GroupElement)> = (0..8)
            .map(|_| {
                let (j, h) = random_floor(&mut rng, &heights, 1);
                let a = GroupElement::new((0..m).map(|_| rng.random_range(-1..=1)).collect());
                (c.diagram.floor_to_path(4, j, h).unwrap(), a)
            })
            .collect();
        let grids: Vec<PsiGrid> = (2..=5).map(|r| PsiGrid::dyadic(m, -1.0, 1.0, r)).collect();
        let profile = continuity_profile(&c.diagram, &c.f, &grids, &family).map_err(|e| e.to_string())?;
        // recompute the modulus on the one-dimensional slices through 0
        let mut own = Vec::new();
        for r in 2..=5u32 {
            let n = 1usize << r;
            let h = 2.0 / n as f64;
            let mut worst = 0.0f64;
            for axis in 0..m {
                let values: Vec<Vec<f64>> = (0..=n)
                    .map(|i| {
                        let mut psi = vec![0.0; m];
                        psi[axis] = -1.0 + h * i as f64;
                        let mu = MaharamMeasure::new(&c.diagram, &c.f, MaharamParameter::new(psi).unwrap()).unwrap();
                        family.iter().map(|(p, a)| mu.cylinder_measure(p, a)).collect()
                    })
                    .collect();
                for w in values.windows(2) {
                    for (x, y) in w[0].iter().zip(&w[1]) {
                        worst = worst.max((x - y).abs());
                    }
                }
            }
            own.push(worst);
        }
        ensure(profile.is_monotone(), || format!("{}: modulus {:?}", c.inst.name, profile.modulus))?;
        ensure(own.windows(2).all(|w| w[1] < w[0]), || format!("{}: slice modulus {own:?}", c.inst.name))?;
        for ((_, full), slice) in profile.modulus.iter().zip(&own) {
            ensure(slice <= full, || format!("{}: slice modulus exceeds the full grid", c.inst.name))?;
        }
        notes.push(format!(
            "{}: {:.2e} -> {:.2e}",
            c.inst.name,
            profile.modulus[0].1,
            profile.modulus.last().unwrap().1
        ));
    }
    Ok(notes.join("; "))
}

fn verify_json(path: &Path, inject: &str) -> Result<(i32, Value), String> {
    let exec = skewadic::cli::run([
        "skewadic",
        "verify",
        "--instance",
        path.to_str().unwrap(),
        "--inject",
        inject,
    ]);
    let v: Value = serde_json::from_str(&exec.stdout).map_err(|e| format!("{e}: {}", exec.stderr))?;
    Ok((exec.code, v))
}

fn criterion_11(cases: &[Case]) -> Check {
    for c in cases {
        let bumped = c.phi.perturbed(0, 0, 1);
        ensure(!check_periodic_type(&c.inst.lp.matrix(), &bumped), || format!("{}: perturbation undetected", c.inst.name))?;
        for (inject, layer) in [("phi-plus-one", "c02"), ("swap-word", "c03")] {
            let (code, report) = verify_json(&c.path, inject)?;
            let checks = report["checks"].as_array().ok_or("no checks")?;
            let statuses: Vec<&str> = checks.iter().map(|x| x["status"].as_str().unwrap_or("")).collect();
            let first = checks.iter().position(|x| x["status"] == "fail").ok_or("no failing layer")?;
            ensure(code == 2, || format!("{}: exit code {code}", c.inst.name))?;
            ensure(checks[first]["id"] == layer, || format!("{}/{inject}: first failure {}", c.inst.name, checks[first]["id"]))?;
            ensure(statuses[..first].iter().all(|s| *s == "pass"), || format!("{}/{inject}: {statuses:?}", c.inst.name))?;
            ensure(statuses[first + 1..].iter().all(|s| *s == "skipped"), || {
                format!("{}/{inject}: cascade {statuses:?}", c.inst.name)
            })?;
        }
    }
    Ok("phi entry + 1 stops at c02, swapped word order stops at c03, later layers skipped".into())
}

fn main() -> ExitCode {
    let cases = cases();
    let criteria: [Criterion; 11] = [
        ("tower words match simulation", criterion_1),
        ("exact cocycle identities", criterion_2),
        ("path/floor dictionary", criterion_3),
        ("tail cocycle equals phi", criterion_4),
        ("tail equivalence equals orbit", criterion_5),
        ("aperiodicity certificate", criterion_6),
        ("level-counting cocycle", criterion_7),
        ("Maharam measure formula", criterion_8),
        ("psi = 0 consistency", criterion_9),
        ("continuity in psi", criterion_10),
        ("fault injection", criterion_11),
    ];
    let names: Vec<String> = cases.iter().map(|c| c.inst.name.clone()).collect();
    println!("acceptance on instances {names:?}");
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check(&cases);
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
