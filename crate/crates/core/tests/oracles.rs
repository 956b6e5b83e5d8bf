//! Independent reference computations for the discrete operators.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use fractura::adapt::{run, spatial_estimate, DriverConfig};
use fractura::fem::{assemble_momentum, assemble_phasefield, Discretization, Loads, PhaseInputs, N_QUAD};
use fractura::linalg::{solve_saddle, solve_spd, Csr, SparseSym};
use fractura::mesh::{project_nodal, refine, BoundarySides, Marking, NotchedRectangle, TriMesh};
use fractura::model::{dissipation, MaterialParams};
use fractura::scenario::{branching_preset, MeshSpec, NotchModel, Scale};
use fractura::tintegrate::{alpha_params, oscillator, staggered_step, FieldState, StaggerOptions};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Textbook generalized-α for `ü + ω²u = 0`, solved for `a_{n+1}`.
fn scalar_alpha(omega: f64, u0: f64, v0: f64, dt: f64, steps: usize, rho: f64) -> (f64, f64) {
    let af = 1.0 / (1.0 + rho);
    let am = (2.0 - rho) / (1.0 + rho);
    let gamma = 0.5 + am - af;
    let beta = 0.25 * (1.0 + am - af).powi(2);
    let k = omega * omega;
    let (mut u, mut v, mut a) = (u0, v0, -k * u0);
    for _ in 0..steps {
        let pred = u + dt * v + dt * dt * (0.5 - beta) * a;
        let a1 = -((1.0 - am) * a + k * ((1.0 - af) * u + af * pred)) / (am + k * af * beta * dt * dt);
        let u1 = pred + beta * dt * dt * a1;
        let v1 = v + dt * ((1.0 - gamma) * a + gamma * a1);
        (u, v, a) = (u1, v1, a1);
    }
    (u, v)
}

#[test]
fn oscillator_energy_matches_scalar_reference() {
    let period = 2.0 * std::f64::consts::PI;
    for rho in [0.0, 0.5, 1.0] {
        let a = alpha_params(rho).unwrap();
        for n in [10usize, 100] {
            let (u, v) = oscillator(1.0, 1.0, 0.0, period / n as f64, n, &a).unwrap();
            let (ur, vr) = scalar_alpha(1.0, 1.0, 0.0, period / n as f64, n, rho);
            let (e, er) = (0.5 * (u * u + v * v), 0.5 * (ur * ur + vr * vr));
            assert!((e - er).abs() <= 1e-12 * er, "rho {rho} n {n}: {e} vs {er}");
            assert!((u - ur).abs() <= 1e-12 && (v - vr).abs() <= 1e-12);
        }
    }
}

fn plate(width: f64, height: f64, notch: f64, nx: usize, ny: usize) -> TriMesh {
    NotchedRectangle { width, height, notch_length: notch, nx, ny, slit: notch > 0.0 }
        .build(BoundarySides::tension_top_bottom())
        .unwrap()
}

#[test]
fn quadratic_projection_error_is_second_order() {
    let mut errs = Vec::new();
    for nx in [4usize, 8, 16] {
        let coarse = plate(1.0, 1.0, 0.0, nx, nx);
        let mid = refine(&coarse, &Marking::all(&coarse), 1e-9).unwrap();
        let fine = refine(&mid, &Marking::all(&mid), 1e-9).unwrap();
        let f: Vec<f64> = coarse.vertices().iter().map(|p| p[0] * p[0]).collect();
        let projected = project_nodal(&coarse, &mid, &f, 1).and_then(|v| project_nodal(&mid, &fine, &v, 1)).unwrap();
        let h = 1.0 / nx as f64;
        let err = fine.vertices().iter().zip(&projected).map(|(p, v)| (v - p[0] * p[0]).abs()).fold(0.0, f64::max);
        // linear interpolation of x² along an edge is off by at most Δx²/4
        assert!(err <= 0.25 * h * h + 1e-15, "{err} vs {}", 0.25 * h * h);
        errs.push(err);
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() < 0.1, "{order}");
    }
}

/// Strip `[−10ℓ, 10ℓ] x [0, dx]`, one cell tall.
fn strip(ell: f64, n: usize) -> TriMesh {
    let dx = 20.0 * ell / n as f64;
    let mut vertices = Vec::new();
    for j in 0..2 {
        for i in 0..=n {
            vertices.push([-10.0 * ell + i as f64 * dx, j as f64 * dx]);
        }
    }
    let mut triangles = Vec::new();
    for i in 0..n {
        triangles.push([i, i + 1, n + 2 + i]);
        triangles.push([i, n + 2 + i, n + 1 + i]);
    }
    TriMesh::new(vertices, triangles, BTreeMap::new()).unwrap()
}

#[test]
fn exact_profile_dissipates_gc() {
    let p = common::desk_material();
    let n = 4000;
    let mesh = strip(p.ell, n);
    let phi: Vec<f64> = mesh.vertices().iter().map(|x| 1.0 - (-x[0].abs() / p.ell).exp()).collect();
    let height = 20.0 * p.ell / n as f64;
    let d = dissipation(&mesh, &phi, &p) / height;
    // truncation at ±10ℓ loses Gc e^{-20}
    assert!((d / p.gc - 1.0).abs() < 1e-4, "{}", d / p.gc);
}

#[test]
fn undamaged_unloaded_plate_does_not_move() {
    let s = branching_preset(Scale::Desk);
    let mesh = plate(2.0, 1.0, 0.5, 16, 8);
    let disc = Discretization::new(&mesh, &s.material, Loads::default()).unwrap();
    let state = FieldState::at_rest(&mesh);
    let sys =
        assemble_momentum(&mesh, &disc, &state.phi, &s.material, &alpha_params(0.5).unwrap(), 1e-4, &state).unwrap();
    assert!(sys.rhs.iter().all(|r| *r == 0.0));
    let du = solve_spd(&sys.matrix, &sys.rhs, 1e-12).unwrap();
    assert!(du.iter().all(|d| *d == 0.0));
}

#[test]
fn static_limit_gives_uniform_plane_strain_tension() {
    let mut p = common::desk_material();
    p.rho0 = 1e-9;
    let sigma = 1e4;
    let (e, nu) = (208e6, 0.3);
    for n in [4usize, 8] {
        let mesh = plate(2.0, 1.0, 0.0, 2 * n, n);
        let disc = Discretization::new(&mesh, &p, Loads { traction: sigma }).unwrap();
        let state = FieldState::at_rest(&mesh);
        let alpha = alpha_params(0.0).unwrap();
        let sys = assemble_momentum(&mesh, &disc, &state.phi, &p, &alpha, 1e3, &state).unwrap();
        let du = solve_spd(&sys.matrix, &sys.rhs, 1e-13).unwrap();
        let u = disc.u.dofs.expand(&du);
        let opening = |x: f64| {
            let at = |y: f64| {
                let i =
                    mesh.vertices().iter().position(|q| (q[0] - x).abs() < 1e-12 && (q[1] - y).abs() < 1e-12).unwrap();
                [u[2 * i], u[2 * i + 1]]
            };
            let (top, bottom) = (at(1.0), at(0.0));
            top[1] - bottom[1]
        };
        let exact_yy = sigma * (1.0 - nu * nu) / e;
        for x in [0.0, 1.0, 2.0] {
            let got = opening(x);
            assert!((got - exact_yy).abs() <= 1e-2 * exact_yy, "n {n} x {x}: {got} vs {exact_yy}");
        }
        let width_change = {
            let at = |x: f64| {
                let i = mesh
                    .vertices()
                    .iter()
                    .position(|q| (q[0] - x).abs() < 1e-12 && (q[1] - 0.5).abs() < 1e-12)
                    .unwrap();
                u[2 * i]
            };
            at(2.0) - at(0.0)
        };
        let exact_xx = -2.0 * nu * (1.0 + nu) * sigma / e;
        assert!((width_change - exact_xx).abs() <= 1e-2 * exact_xx.abs(), "{width_change} vs {exact_xx}");
    }
}

/// Steady phase field on a strip with history `h` in the elements whose
/// centroid lies within `ell / 2` of the origin.
fn steady_with_history(p: &MaterialParams, n: usize, h: f64) -> (TriMesh, Vec<f64>) {
    let mesh = strip(p.ell, n);
    let mut q = *p;
    q.eta = 0.0;
    let disc = Discretization::new(&mesh, &q, Loads::default()).unwrap();
    let mut history = vec![0.0; mesh.n_triangles() * N_QUAD];
    for t in 0..mesh.n_triangles() {
        if mesh.centroid(t)[0].abs() < 0.5 * p.ell {
            history[t * N_QUAD..(t + 1) * N_QUAD].iter_mut().for_each(|x| *x = h);
        }
    }
    let phi_n = vec![1.0; mesh.n_vertices()];
    let zeros = vec![0.0; mesh.n_vertices()];
    let inputs = PhaseInputs { phi_n: &phi_n, phidot_n: &zeros, history: &history };
    let sys = assemble_phasefield(&mesh, &disc, &q, &alpha_params(0.0).unwrap(), 1.0, inputs, false).unwrap();
    let d = solve_spd(&sys.matrix, &sys.rhs, 1e-13).unwrap();
    let phi = disc.phi.dofs.expand(&d).iter().zip(&phi_n).map(|(a, b)| a + b).collect();
    (mesh, phi)
}

/// Finite differences for `ℓ²φ'' = (1 + 2ℓH/Gc) φ − 1` with natural ends.
fn dense_1d(p: &MaterialParams, n: usize, h: f64) -> Vec<f64> {
    let dx = 20.0 * p.ell / n as f64;
    let mut a = DMatrix::zeros(n + 1, n + 1);
    let mut b = DVector::from_element(n + 1, 1.0);
    for i in 0..=n {
        let x = -10.0 * p.ell + i as f64 * dx;
        // lumped weight over the dual cell
        let in_band = |x: f64| if x.abs() < 0.5 * p.ell { h } else { 0.0 };
        let w = 0.5 * (in_band(x - 0.25 * dx) + in_band(x + 0.25 * dx));
        let c = p.ell * p.ell / (dx * dx);
        let edge = if i == 0 || i == n { 0.5 } else { 1.0 };
        a[(i, i)] = edge * (1.0 + 2.0 * p.ell * w / p.gc);
        b[i] = edge;
        if i > 0 {
            a[(i, i)] += c;
            a[(i, i - 1)] -= c;
        }
        if i < n {
            a[(i, i)] += c;
            a[(i, i + 1)] -= c;
        }
    }
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

#[test]
fn history_band_lowers_the_phase_field_monotonically() {
    let p = common::desk_material();
    let n = 200;
    let mut last_min = 1.0;
    for h in [0.0, 10.0, 100.0, 1000.0, 10000.0] {
        let (mesh, phi) = steady_with_history(&p, n, h);
        let min = phi.iter().copied().fold(1.0, f64::min);
        if h == 0.0 {
            assert!((min - 1.0).abs() < 1e-10);
        } else {
            assert!(min < last_min, "H {h}: {min} !< {last_min}");
        }
        last_min = min;
        let reference = dense_1d(&p, n, h);
        for (i, x) in mesh.vertices().iter().enumerate() {
            let k = ((x[0] + 10.0 * p.ell) / (20.0 * p.ell / n as f64)).round() as usize;
            assert!((phi[i] - reference[k]).abs() < 2e-2, "H {h} x {}: {} vs {}", x[0], phi[i], reference[k]);
        }
    }
}

fn profile_estimate(p: &MaterialParams, n: usize) -> (TriMesh, Vec<f64>) {
    let mesh = strip(p.ell, n);
    let mid = n / 2;
    let fixed = BTreeSet::from([mid, n + 1 + mid]);
    let mut q = *p;
    q.eta = 0.0;
    let disc = Discretization::with_phase_constraints(&mesh, &q, Loads::default(), &fixed).unwrap();
    let mut state = FieldState::at_rest(&mesh);
    for &v in &fixed {
        state.phi[v] = 0.0;
    }
    let history = state.history.clone();
    let est = spatial_estimate(&mesh, &disc, &q, &alpha_params(0.0).unwrap(), 1.0, &state, &history, 1e-13).unwrap();
    (mesh, est.contributions)
}

#[test]
fn profile_estimate_shrinks_and_concentrates() {
    let p = common::desk_material();
    let mut norms = Vec::new();
    for n in [20usize, 40, 80] {
        let (_, c) = profile_estimate(&p, n);
        norms.push(c.iter().sum::<f64>().sqrt());
    }
    for w in norms.windows(2) {
        assert!(w[1] < 0.75 * w[0], "{norms:?}");
    }

    let (mesh, c) = profile_estimate(&p, 20);
    let total: f64 = c.iter().sum();
    let mut sorted = c.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top: f64 = sorted[..sorted.len().div_ceil(10)].iter().sum();
    assert!(top >= 0.8 * total, "top decile carries {}", top / total);
    // the largest contributions touch the broken vertex
    let worst = (0..c.len()).max_by(|a, b| c[*a].partial_cmp(&c[*b]).unwrap()).unwrap();
    assert!(mesh.centroid(worst)[0].abs() < 2.0 * p.ell);
}

#[test]
fn saddle_matches_dense_kkt() {
    let mut r = common::rng(21);
    for _ in 0..5 {
        let (n, m) = (20, 12);
        let mut gd = DMatrix::<f64>::identity(n, n);
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 1.0));
        }
        for _ in 0..30 {
            let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
            if i == j {
                continue;
            }
            let w = r.gen_range(0.0..0.2);
            for (a, b, v) in [(i, i, w), (j, j, w), (i, j, -w), (j, i, -w)] {
                gd[(a, b)] += v;
            }
            trip.extend([(i, i, w), (j, j, w), (i.max(j), i.min(j), -w)]);
        }
        let gram = SparseSym::from_triplets(n, trip);
        let mut bt = Vec::new();
        let mut bd = DMatrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                if i == j || r.gen::<f64>() < 0.2 {
                    let v = r.gen_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 };
                    bt.push((i, j, v));
                    bd[(i, j)] = v;
                }
            }
        }
        let b = Csr::from_triplets(n, m, bt);
        let g: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let sol = solve_saddle(&gram, &b, &g, 1e-13).unwrap();

        let mut kkt = DMatrix::zeros(n + m, n + m);
        kkt.view_mut((0, 0), (n, n)).copy_from(&gd);
        kkt.view_mut((0, n), (n, m)).copy_from(&bd);
        kkt.view_mut((n, 0), (m, n)).copy_from(&bd.transpose());
        let mut rhs = DVector::zeros(n + m);
        rhs.rows_mut(0, n).copy_from(&DVector::from_vec(g.clone()));
        let x = kkt.lu().solve(&rhs).unwrap();
        for i in 0..n {
            assert!((sol.eps[i] - x[i]).abs() <= 1e-8, "eps {i}");
        }
        for j in 0..m {
            assert!((sol.phi[j] - x[n + j]).abs() <= 1e-8, "phi {j}");
        }
        let mut bte = vec![0.0; m];
        b.matvec_transpose(&sol.eps, &mut bte);
        assert!(bte.iter().all(|v| v.abs() <= 1e-10));

        let scaled: Vec<f64> = g.iter().map(|v| 3.0 * v).collect();
        let s3 = solve_saddle(&gram, &b, &scaled, 1e-13).unwrap();
        for i in 0..n {
            assert!((s3.eps[i] - 3.0 * sol.eps[i]).abs() <= 1e-9);
        }
    }
}

#[test]
fn spd_200_matches_dense_cholesky() {
    let mut r = common::rng(4);
    let n = 200;
    let g = DMatrix::from_fn(n, n, |_, _| if r.gen::<f64>() < 0.05 { r.gen_range(-1.0..1.0) } else { 0.0 });
    let a = g.transpose() * &g + DMatrix::identity(n, n);
    let trip = (0..n)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .filter(|&(i, j)| a[(i, j)] != 0.0)
        .map(|(i, j)| (i, j, a[(i, j)]));
    let sparse = SparseSym::from_triplets(n, trip.collect::<Vec<_>>());
    let b: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let x = solve_spd(&sparse, &b, 1e-12).unwrap();
    let xd = a.cholesky().unwrap().solve(&DVector::from_vec(b));
    for i in 0..n {
        assert!((x[i] - xd[i]).abs() <= 1e-8);
    }
}

#[test]
fn stagger_contracts_at_crack_onset() {
    let mut s = branching_preset(Scale::Desk);
    s.material.ell = 0.05;
    s.mesh = MeshSpec::Structured { nx: 32, ny: 16 };
    s.notch_model = NotchModel::Slit;
    let cfg = DriverConfig {
        rho_inf: 0.0,
        tol_max: s.tol_max,
        adapt_space: false,
        max_steps: Some(400),
        ..Default::default()
    };
    let mut onset = None;
    let _ = run(&s, &cfg, &mut |rec, mesh, state| {
        let min = state.phi.iter().copied().fold(1.0, f64::min);
        if min < 0.6 {
            onset = Some((mesh.clone(), state.clone(), rec.dt));
            return Err(fractura::Error::InvalidParameter("onset reached".into()));
        }
        Ok(())
    });
    let (mesh, state, dt) = onset.expect("damage develops");
    assert_eq!(mesh.n_triangles(), 1024);
    let disc = Discretization::new(&mesh, &s.material, s.loads()).unwrap();
    let opts = StaggerOptions { tol: 1e-10, max_iter: 30, ..Default::default() };
    let out = staggered_step(&mesh, &disc, &s.material, &alpha_params(0.0).unwrap(), dt, &state, opts).unwrap();
    assert!(out.iterations >= 3, "{}", out.iterations);
    let du = &out.du_history[1..];
    for w in du.windows(2) {
        assert!(w[1] <= w[0], "{:?}", out.du_history);
    }
}

#[test]
fn stiff_mode_is_damped_to_the_spectral_radius() {
    // the high mode of any stiff two-mass chain decouples into this scalar problem
    let omega = 1e4;
    let dt = 0.1;
    for rho in [0.0, 0.5, 1.0] {
        let a = alpha_params(rho).unwrap();
        let energy = |u: f64, v: f64| omega * omega * u * u + v * v;
        // the stiff-limit eigenvalue is defective, so average over many steps
        let n = 200;
        let (u, v) = oscillator(omega, 1.0, 0.0, dt, n, &a).unwrap();
        let radius = (energy(u, v) / energy(1.0, 0.0)).powf(0.5 / n as f64);
        assert!(radius <= rho + 0.05, "rho {rho}: {radius}");
        if rho == 1.0 {
            assert!(radius > 0.95);
        }
        if rho == 0.0 {
            // triple zero eigenvalue: gone after three steps, up to O(1/(ω dt))
            let (u3, v3) = oscillator(omega, 1.0, 0.0, dt, 3, &a).unwrap();
            assert!((energy(u3, v3) / energy(1.0, 0.0)).sqrt() <= 0.05);
        }
    }
}
