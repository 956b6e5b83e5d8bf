#![allow(dead_code)]

use fractura::adapt::spatial_estimate;
use fractura::fem::{assemble_phasefield, Discretization, PhaseInputs, N_QUAD};
use fractura::mesh::{mark_by_fraction, refine, BoundarySides, NotchedRectangle, TriMesh};
use fractura::model::MaterialParams;
use fractura::scenario::{branching_preset, Scale};
use fractura::tintegrate::{alpha_params, FieldState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn desk_material() -> MaterialParams {
    branching_preset(Scale::Desk).material
}

/// Small notched plate, refined a couple of times at random.
pub fn random_mesh(r: &mut ChaCha8Rng) -> TriMesh {
    let nx = r.gen_range(6..12);
    let ny = 2 * r.gen_range(2..4);
    let mut mesh = NotchedRectangle { width: 0.2, height: 0.1, notch_length: 0.05, nx, ny, slit: false }
        .build(BoundarySides::tension_top_bottom())
        .unwrap();
    for _ in 0..r.gen_range(0..3) {
        let errs: Vec<f64> = (0..mesh.n_triangles()).map(|_| r.gen::<f64>()).collect();
        let m = mark_by_fraction(&errs, 0.7).unwrap();
        mesh = refine(&mesh, &m, 1e-6).unwrap();
    }
    mesh
}

pub fn random_state(r: &mut ChaCha8Rng, mesh: &TriMesh) -> FieldState {
    let mut s = FieldState::at_rest(mesh);
    for p in s.phi.iter_mut() {
        *p = r.gen_range(0.3..1.0);
    }
    for p in s.phidot.iter_mut() {
        *p = r.gen_range(-10.0..10.0);
    }
    for u in s.u.iter_mut() {
        *u = r.gen_range(-1e-4..1e-4);
    }
    s.history = (0..mesh.n_triangles() * N_QUAD).map(|_| r.gen_range(0.0..200.0)).collect();
    s
}

pub struct EstimatorCheck {
    /// `max |Bᵀε|` over the P1 test functions.
    pub orthogonality: f64,
    pub norm: f64,
    /// `|Σ contributions − norm²| / norm²`.
    pub sum_error: f64,
}

pub fn estimator_check(seed: u64) -> EstimatorCheck {
    let mut r = rng(seed);
    let mesh = random_mesh(&mut r);
    let params = desk_material();
    let alpha = alpha_params(r.gen_range(0.0..=1.0)).unwrap();
    let dt = r.gen_range(1e-6..1e-4);
    let state = random_state(&mut r, &mesh);
    let disc = Discretization::new(&mesh, &params, Default::default()).unwrap();
    let est = spatial_estimate(&mesh, &disc, &params, &alpha, dt, &state, &state.history, 1e-13).unwrap();

    let inputs = PhaseInputs { phi_n: &state.phi, phidot_n: &state.phidot, history: &state.history };
    let sys = assemble_phasefield(&mesh, &disc, &params, &alpha, dt, inputs, true).unwrap();
    let b = sys.matrix.columns_prefix(disc.phi.dofs.n_free());
    let mut bte = vec![0.0; b.ncols()];
    b.matvec_transpose(&est.eps, &mut bte);
    let orthogonality = bte.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let n2 = est.norm * est.norm;
    let sum: f64 = est.contributions.iter().sum();
    EstimatorCheck { orthogonality, norm: est.norm, sum_error: (sum - n2).abs() / n2 }
}
