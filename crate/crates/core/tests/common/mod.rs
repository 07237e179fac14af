//! Independent convex-programming oracles for TV minimization, plus the
//! random instances shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use gradcs::analysis::{min_separation, SupportSet};
use gradcs::harness::{gen_piecewise_signal, SignalSpec};
use gradcs::rng::stream;
use gradcs::sampling::{uniform_mask, Indices, MeasurementSet, SamplingMask, SamplingScheme};
use gradcs::transforms::{Signal, C64};
use rand::Rng;

struct Triplets {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    b: Vec<f64>,
    next: usize,
}

impl Triplets {
    fn new() -> Self {
        Triplets {
            rows: Vec::new(),
            cols: Vec::new(),
            vals: Vec::new(),
            b: Vec::new(),
            next: 0,
        }
    }

    fn row(&mut self, entries: &[(usize, f64)], rhs: f64) {
        for &(c, v) in entries {
            if v != 0.0 {
                self.rows.push(self.next);
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.b.push(rhs);
        self.next += 1;
    }
}

fn solve(
    vars: usize,
    cost: Vec<f64>,
    t: Triplets,
    cones: Vec<SupportedConeT<f64>>,
) -> (f64, Vec<f64>) {
    let p = CscMatrix::zeros((vars, vars));
    let a = CscMatrix::new_from_triplets(t.next, vars, t.rows, t.cols, t.vals);
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-10)
        .tol_gap_rel(1e-10)
        .tol_feas(1e-10)
        .build()
        .unwrap();
    let mut solver = DefaultSolver::new(&p, &cost, &a, &t.b, &cones, settings).unwrap();
    solver.solve();
    assert!(
        matches!(
            solver.solution.status,
            SolverStatus::Solved | SolverStatus::AlmostSolved
        ),
        "oracle status {:?}",
        solver.solution.status
    );
    (solver.solution.obj_val, solver.solution.x.clone())
}

/// `min ||D z||_1` over real `z` with `P_Ω A z = y`, as a linear program in
/// `(z, t)`. The mask should be closed under `k -> -k` so that the complex
/// minimum is attained by a real signal. Returns the optimum and `z`.
pub fn tv_lp_1d(meas: &MeasurementSet) -> (f64, Vec<f64>) {
    let n = meas.mask().n();
    let Indices::D1(ks) = meas.mask().indices() else {
        panic!("1D mask expected")
    };
    let mut t = Triplets::new();
    let mut seen = Vec::new();
    for (&k, y) in ks.iter().zip(meas.y()) {
        // a real z has conjugate-symmetric spectrum; keep one row per pair
        let key = k.rem_euclid(n as i64);
        let partner = (-k).rem_euclid(n as i64);
        if seen.contains(&key) || seen.contains(&partner) {
            continue;
        }
        seen.push(key);
        let phase = |j: usize| 2.0 * PI * k as f64 * (j + 1) as f64 / n as f64;
        let re: Vec<(usize, f64)> = (0..n).map(|j| (j, phase(j).cos())).collect();
        t.row(&re, y.re);
        if key != partner {
            let im: Vec<(usize, f64)> = (0..n).map(|j| (j, phase(j).sin())).collect();
            t.row(&im, y.im);
        }
    }
    let eq = t.next;
    for j in 0..n {
        let nx = (j + 1) % n;
        t.row(&[(j, 1.0), (nx, -1.0), (n + j, -1.0)], 0.0);
        t.row(&[(j, -1.0), (nx, 1.0), (n + j, -1.0)], 0.0);
    }
    let mut cost = vec![0.0; 2 * n];
    cost[n..].iter_mut().for_each(|c| *c = 1.0);
    let (obj, x) = solve(
        2 * n,
        cost,
        t,
        vec![
            SupportedConeT::ZeroConeT(eq),
            SupportedConeT::NonnegativeConeT(2 * n),
        ],
    );
    (obj, x[..n].to_vec())
}

/// `min sum |(D1 z + i D2 z)_p|` over complex `n x n` grids with
/// `P_Ω A z = y`, as a second-order cone program in `(Re z, Im z, t)`.
pub fn tv_socp_2d(meas: &MeasurementSet) -> f64 {
    let n = meas.mask().n();
    let nn = n * n;
    let Indices::D2(ks) = meas.mask().indices() else {
        panic!("2D mask expected")
    };
    let mut t = Triplets::new();
    let mut seen = Vec::new();
    for (&(k1, k2), y) in ks.iter().zip(meas.y()) {
        if seen.contains(&(k1, k2)) {
            continue;
        }
        seen.push((k1, k2));
        let mut re = Vec::with_capacity(2 * nn);
        let mut im = Vec::with_capacity(2 * nn);
        for r in 0..n {
            for c in 0..n {
                let ph =
                    2.0 * PI * (k1 as f64 * (r + 1) as f64 + k2 as f64 * (c + 1) as f64) / n as f64;
                let (s, co) = ph.sin_cos();
                let p = r * n + c;
                // (a + ib)(co + i s) = (a co - b s) + i (a s + b co)
                re.push((p, co));
                re.push((nn + p, -s));
                im.push((p, s));
                im.push((nn + p, co));
            }
        }
        t.row(&re, y.re);
        t.row(&im, y.im);
    }
    let eq = t.next;
    for r in 0..n {
        for c in 0..n {
            let p = r * n + c;
            let down = ((r + 1) % n) * n + c;
            let right = r * n + (c + 1) % n;
            // cone (t, Re Dz, Im Dz) with Re Dz = D1 a - D2 b, Im Dz = D1 b + D2 a
            t.row(&[(2 * nn + p, -1.0)], 0.0);
            t.row(
                &[(down, -1.0), (p, 1.0), (nn + right, 1.0), (nn + p, -1.0)],
                0.0,
            );
            t.row(
                &[(nn + down, -1.0), (nn + p, 1.0), (right, -1.0), (p, 1.0)],
                0.0,
            );
        }
    }
    let mut cost = vec![0.0; 3 * nn];
    cost[2 * nn..].iter_mut().for_each(|c| *c = 1.0);
    let mut cones = vec![SupportedConeT::ZeroConeT(eq)];
    cones.extend((0..nn).map(|_| SupportedConeT::SecondOrderConeT(3)));
    solve(3 * nn, cost, t, cones).0
}

/// `min ||D z||_1` over complex `z` with `||P_Ω A z - y||_2 <= radius`
/// (rows with multiplicity), as a second-order cone program in
/// `(Re z, Im z, t)`.
pub fn tv_socp_1d(meas: &MeasurementSet, radius: f64) -> f64 {
    let n = meas.mask().n();
    let Indices::D1(ks) = meas.mask().indices() else {
        panic!("1D mask expected")
    };
    let mut t = Triplets::new();
    let mut cones = Vec::new();
    t.row(&[], radius);
    for (&k, y) in ks.iter().zip(meas.y()) {
        let mut re = Vec::with_capacity(2 * n);
        let mut im = Vec::with_capacity(2 * n);
        for j in 0..n {
            let (s, c) = (2.0 * PI * k as f64 * (j + 1) as f64 / n as f64).sin_cos();
            re.push((j, c));
            re.push((n + j, -s));
            im.push((j, s));
            im.push((n + j, c));
        }
        t.row(&re, y.re);
        t.row(&im, y.im);
    }
    cones.push(SupportedConeT::SecondOrderConeT(1 + 2 * ks.len()));
    for j in 0..n {
        let nx = (j + 1) % n;
        t.row(&[(2 * n + j, -1.0)], 0.0);
        t.row(&[(j, -1.0), (nx, 1.0)], 0.0);
        t.row(&[(n + j, -1.0), (n + nx, 1.0)], 0.0);
        cones.push(SupportedConeT::SecondOrderConeT(3));
    }
    let mut cost = vec![0.0; 3 * n];
    cost[2 * n..].iter_mut().for_each(|c| *c = 1.0);
    solve(3 * n, cost, t, cones).0
}

/// Uniform mask closed under `k -> -k`.
pub fn symmetric_mask(n: usize, m: usize, seed: u64) -> SamplingMask {
    let Indices::D1(ks) = uniform_mask(n, m, seed).unwrap().indices().clone() else {
        unreachable!()
    };
    let half = (n / 2) as i64;
    let mut sym: Vec<i64> = ks
        .iter()
        .flat_map(|&k| [k, if k == half { k } else { -k }])
        .collect();
    sym.sort_unstable();
    sym.dedup();
    let len = sym.len();
    SamplingMask::new(
        n,
        Indices::D1(sym),
        len,
        true,
        SamplingScheme::Uniform,
        seed,
    )
    .unwrap()
}

/// Random real piecewise-constant instance with unit TV.
pub fn unit_tv_signal(n: usize, seed: u64) -> Signal {
    let mut rng = stream(seed, "oracle-signal", 0);
    let jumps = rng.random_range(2..=4);
    let g = gen_piecewise_signal(&SignalSpec::custom(n, jumps, 2.0 / n as f64), seed).unwrap();
    let tv = g.signal.tv_norm();
    g.signal
        .with_values(g.signal.values().iter().map(|v| v / tv).collect())
        .unwrap()
}

pub fn random_signs(seed: u64, s: usize) -> Vec<C64> {
    let mut rng = stream(seed, "signs", 0);
    (0..s)
        .map(|_| C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
        .collect()
}

pub fn random_support(n: usize, s: usize, gap: usize, seed: u64) -> SupportSet {
    let mut rng = stream(seed, "support", 0);
    loop {
        let mut t: Vec<usize> = (0..s).map(|_| rng.random_range(1..=n)).collect();
        t.sort_unstable();
        t.dedup();
        if t.len() == s {
            let sup = SupportSet::new(n, t).unwrap();
            if min_separation(&sup) * n as f64 >= gap as f64 {
                return sup;
            }
        }
    }
}
