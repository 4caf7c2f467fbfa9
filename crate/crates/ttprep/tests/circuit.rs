use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use ttprep::circuit::{
    complete_isometry, depth_report, grover_rudolph_baseline, merge_gates, reshape_core,
    tt_to_circuit, CircuitError, CircuitPlan, GateKind, GateOp, GateOrigin,
};
use ttprep::metrics::{fidelity, to_complex};
use ttprep::quantize::{discretize, ordering_bitmap, DistributionSpec, GridSpec, OrderingScheme};
use ttprep::sim::run;
use ttprep::tensor::{pad_ranks_pow2, tt_eval, tt_from_dense, tt_to_dense, DenseTensor};
use ttprep::{TTCore, TensorTrain};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_core(rng: &mut StdRng, l: usize, n: usize, r: usize) -> TTCore {
    let data: Vec<f64> = (0..l * n * r).map(|_| rng.gen_range(-1.0..1.0)).collect();
    TTCore::new(l, n, r, data).unwrap()
}

fn random_quantics_tt(rng: &mut StdRng, ranks: &[usize]) -> TensorTrain {
    let cores = ranks
        .windows(2)
        .map(|w| random_core(rng, w[0], 2, w[1]))
        .collect();
    TensorTrain::new(cores).unwrap()
}

fn random_unitary(rng: &mut StdRng, m: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(m, m, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    a.qr().q()
}

fn simulated_amps(plan: &CircuitPlan) -> Vec<Complex64> {
    run(plan).unwrap().amps().to_vec()
}

#[test]
fn reshape_stacks_bit_over_bond() {
    let mut rng = StdRng::seed_from_u64(5);
    let core = random_core(&mut rng, 4, 2, 8);
    let m = reshape_core(&core).unwrap();
    assert_eq!((m.nrows(), m.ncols()), (8, 8));
    // row (i_k=1, j=2) equals the core slice data[2,1,:]
    for b in 0..8 {
        assert_eq!(m[(1 * 4 + 2, b)], core.get(2, 1, b));
    }
    for j in 0..4 {
        for i in 0..2 {
            for b in 0..8 {
                assert_eq!(m[(i * 4 + j, b)], core.get(j, i, b));
            }
        }
    }

    let first = random_core(&mut rng, 1, 2, 3);
    let m = reshape_core(&first).unwrap();
    assert_eq!((m.nrows(), m.ncols()), (2, 3));

    let odd = random_core(&mut rng, 3, 2, 2);
    assert!(matches!(
        reshape_core(&odd),
        Err(CircuitError::InvalidInput(_))
    ));
}

#[test]
fn isometry_completion_extends_to_a_unitary() {
    // square input comes back unchanged
    let mut rng = StdRng::seed_from_u64(11);
    let a = DMatrix::<f64>::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
    let q = a.qr().q();
    let full = complete_isometry(&q).unwrap();
    assert!((&full - &q).iter().all(|x| x.abs() <= 1e-12));

    // e0 completes to the identity
    let e0 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
    let full = complete_isometry(&e0).unwrap();
    assert!((&full - DMatrix::<f64>::identity(2, 2))
        .iter()
        .all(|x| x.abs() <= 1e-12));

    // random 8x3 isometry: kept columns exact, result unitary, deterministic
    let a = DMatrix::<f64>::from_fn(8, 3, |_, _| rng.gen_range(-1.0..1.0));
    let iso = a.qr().q();
    let full = complete_isometry(&iso).unwrap();
    for j in 0..3 {
        for i in 0..8 {
            assert!((full[(i, j)] - iso[(i, j)]).abs() <= 1e-12);
        }
    }
    let gram = full.transpose() * &full;
    assert!((&gram - DMatrix::<f64>::identity(8, 8))
        .iter()
        .all(|x| x.abs() <= 1e-10));
    assert_eq!(full, complete_isometry(&iso).unwrap());

    // garbage input rejected
    let bad = DMatrix::<f64>::from_element(4, 2, 0.5);
    assert!(complete_isometry(&bad).is_err());
}

#[test]
fn gate_op_enforces_unitarity_and_support_shape() {
    let mut rng = StdRng::seed_from_u64(3);
    let u = random_unitary(&mut rng, 4);
    let g = GateOp::unitary(5, u, GateOrigin::TtCore(5)).unwrap();
    assert_eq!(g.qubits(), &[5, 4]);
    assert_eq!(g.width(), 2);

    let not_unitary = DMatrix::from_element(2, 2, c(0.7, 0.0));
    assert!(matches!(
        GateOp::unitary(1, not_unitary, GateOrigin::Merged),
        Err(CircuitError::NotUnitary(_))
    ));

    // support would extend above qubit 1
    let u = random_unitary(&mut rng, 4);
    assert!(GateOp::unitary(1, u, GateOrigin::Merged).is_err());

    // non-square / non-power-of-two shapes
    let rect = DMatrix::from_element(2, 3, c(0.0, 0.0));
    assert!(GateOp::unitary(2, rect, GateOrigin::Merged).is_err());
    let odd = DMatrix::<Complex64>::identity(3, 3);
    assert!(GateOp::unitary(3, odd, GateOrigin::Merged).is_err());

    // multiplexed angle count must be 2^(width-1)
    assert!(GateOp::multiplexed_ry(2, vec![0.1; 3], GateOrigin::BaselineLevel(2)).is_err());
    assert!(GateOp::multiplexed_ry(2, vec![0.1; 2], GateOrigin::BaselineLevel(2)).is_ok());
}

fn uniform_rank_one(d: usize) -> TensorTrain {
    let cores = (0..d)
        .map(|_| TTCore::new(1, 2, 1, vec![std::f64::consts::FRAC_1_SQRT_2; 2]).unwrap())
        .collect();
    TensorTrain::new(cores).unwrap()
}

#[test]
fn rank_one_uniform_compiles_to_single_qubit_gates() {
    let tt = uniform_rank_one(3);
    let plan = tt_to_circuit(&tt, 8).unwrap();
    assert_eq!(plan.gates().len(), 3);
    assert_eq!(plan.total_gate_count(), 3);
    assert!(plan.gates().iter().all(|g| g.width() == 1));
    assert!((plan.normalizer() - 1.0).abs() <= 1e-12);

    let amps = simulated_amps(&plan);
    let want = 1.0 / (8.0f64).sqrt();
    for z in &s_amps(&amps) {
        assert!((z - want).abs() <= 1e-12);
    }
}

fn s_amps(amps: &[Complex64]) -> Vec<f64> {
    amps.iter().map(|z| z.re).collect()
}

#[test]
fn delta_distribution_compiles_to_its_basis_state() {
    let mut data = vec![0.0; 8];
    data[5] = 1.0;
    let dense = DenseTensor::new(vec![2, 2, 2], data).unwrap();
    let tt = tt_from_dense(&dense, 0.0, 8).unwrap();
    let tt = pad_ranks_pow2(&tt);
    let plan = tt_to_circuit(&tt, 8).unwrap();
    let amps = simulated_amps(&plan);
    assert!((amps[5].norm() - 1.0).abs() <= 1e-10, "|101> amplitude");
    for (i, z) in amps.iter().enumerate() {
        if i != 5 {
            assert!(z.norm() <= 1e-8, "index {i}");
        }
    }
}

#[test]
fn lognormal_six_qubits_reaches_target_fidelity() {
    let dist = DistributionSpec::canonical_lognormal_1d();
    let grid = dist.canonical_grid(6).unwrap();
    let ordering = ordering_bitmap(OrderingScheme::Sequential, 1, 6).unwrap();
    let dd = discretize(dist, &grid, &ordering).unwrap();
    let probs = dd.materialize_probs(1 << 22).unwrap();
    let target: Vec<f64> = probs.iter().map(|p| p.sqrt()).collect();

    let dense = DenseTensor::new(vec![2; 6], target.clone()).unwrap();
    let tt = tt_from_dense(&dense, 0.0, 8).unwrap();
    let tt = pad_ranks_pow2(&tt);
    let plan = tt_to_circuit(&tt, 8).unwrap();
    let amps = simulated_amps(&plan);
    let f = fidelity(&amps, &to_complex(&target)).unwrap();
    assert!(f >= 1.0 - 1e-8, "fidelity {f}");
}

#[test]
fn exact_compilation_reproduces_every_amplitude() {
    let mut rng = StdRng::seed_from_u64(17);
    for ranks in [
        vec![1usize, 2, 4, 8, 8, 8, 4, 2, 1],
        vec![1, 2, 2, 2, 1],
        vec![1, 2, 4, 4, 2, 1],
    ] {
        let tt = random_quantics_tt(&mut rng, &ranks);
        let d = tt.len();
        let chi = *ranks.iter().max().unwrap();
        let plan = tt_to_circuit(&tt, chi).unwrap();
        assert_eq!(plan.gates().len(), d);
        assert_eq!(plan.num_qubits(), d);

        // normalizer equals the Frobenius norm of the amplitude tensor
        let dense = tt_to_dense(&tt, 1 << 20).unwrap();
        assert!((plan.normalizer() - dense.frobenius_norm()).abs() <= 1e-8);

        let amps = simulated_amps(&plan);
        for (flat, z) in amps.iter().enumerate() {
            let idx: Vec<usize> = (0..d).map(|k| (flat >> (d - 1 - k)) & 1).collect();
            let want = tt_eval(&tt, &idx).unwrap() / plan.normalizer();
            assert!(
                (z - c(want, 0.0)).norm() <= 1e-8,
                "ranks {ranks:?} index {flat}: {z} vs {want}"
            );
        }
    }
}

#[test]
fn gate_widths_track_the_left_ranks() {
    let mut rng = StdRng::seed_from_u64(23);
    let ranks = vec![1usize, 2, 4, 8, 8, 4, 2, 1];
    let tt = random_quantics_tt(&mut rng, &ranks);
    let d = tt.len();
    let plan = tt_to_circuit(&tt, 8).unwrap();
    // gates are listed in application order [W_d, ..., W_1]
    for (pos, gate) in plan.gates().iter().enumerate() {
        let k = d - pos; // core index, 1-based
        let expect = 1 + ranks[k - 1].trailing_zeros() as usize;
        assert_eq!(gate.width(), expect, "core {k}");
        assert_eq!(gate.qubits()[0], k);
        assert!(matches!(gate.origin(), GateOrigin::TtCore(i) if *i == k));
    }
    let max_width = plan.gates().iter().map(|g| g.width()).max().unwrap();
    assert_eq!(max_width, 1 + 3);
}

#[test]
fn compiler_rejects_bad_trains() {
    let mut rng = StdRng::seed_from_u64(29);
    // rank above the cap
    let tt = random_quantics_tt(&mut rng, &[1, 2, 4, 2, 1]);
    assert!(matches!(
        tt_to_circuit(&tt, 2),
        Err(CircuitError::RankCapExceeded(_))
    ));
    // non-power-of-two rank
    let tt = random_quantics_tt(&mut rng, &[1, 2, 3, 2, 1]);
    assert!(tt_to_circuit(&tt, 8).is_err());
    // mode size other than two
    let cores = vec![random_core(&mut rng, 1, 3, 1)];
    let tt = TensorTrain::new(cores).unwrap();
    assert!(tt_to_circuit(&tt, 8).is_err());
}

#[test]
fn merging_collapses_the_nested_staircase() {
    let mut rng = StdRng::seed_from_u64(31);
    let gates = vec![
        GateOp::unitary(4, random_unitary(&mut rng, 16), GateOrigin::TtCore(4)).unwrap(),
        GateOp::unitary(3, random_unitary(&mut rng, 8), GateOrigin::TtCore(3)).unwrap(),
        GateOp::unitary(2, random_unitary(&mut rng, 4), GateOrigin::TtCore(2)).unwrap(),
        GateOp::unitary(1, random_unitary(&mut rng, 2), GateOrigin::TtCore(1)).unwrap(),
    ];
    let plan = CircuitPlan::new(4, gates, 1.0).unwrap();
    let merged = merge_gates(&plan);
    assert_eq!(merged.gates().len(), 1);
    assert_eq!(merged.gates()[0].width(), 4);
    assert!(matches!(merged.gates()[0].origin(), GateOrigin::Merged));
    assert!(merged.depth() <= plan.depth());

    let a = simulated_amps(&plan);
    let b = simulated_amps(&merged);
    let f = fidelity(&a, &b).unwrap();
    assert!(f >= 1.0 - 1e-10, "fidelity {f}");
}

#[test]
fn merging_leaves_disjoint_single_qubit_gates_alone() {
    let tt = uniform_rank_one(4);
    let plan = tt_to_circuit(&tt, 8).unwrap();
    let merged = merge_gates(&plan);
    assert_eq!(merged.gates().len(), plan.gates().len());
}

#[test]
fn merging_preserves_the_prepared_state() {
    let mut rng = StdRng::seed_from_u64(37);
    let tt = random_quantics_tt(&mut rng, &[1, 2, 4, 4, 4, 4, 2, 2, 1]);
    let plan = tt_to_circuit(&tt, 4).unwrap();
    let merged = merge_gates(&plan);
    assert!(merged.gates().len() < plan.gates().len());
    assert!(merged.depth() <= plan.depth());
    assert!(merged.total_gate_count() <= plan.total_gate_count());
    let f = fidelity(&simulated_amps(&plan), &simulated_amps(&merged)).unwrap();
    assert!(f >= 1.0 - 1e-10, "fidelity {f}");
}

fn lognormal_dd(q: usize) -> ttprep::quantize::DiscreteDistribution {
    let dist = DistributionSpec::canonical_lognormal_1d();
    let grid = dist.canonical_grid(q).unwrap();
    let ordering = ordering_bitmap(OrderingScheme::Sequential, 1, q).unwrap();
    discretize(dist, &grid, &ordering).unwrap()
}

#[test]
fn baseline_single_qubit_angle_is_closed_form() {
    let grid = GridSpec::new(vec![(0.0, 1.0)], 1).unwrap();
    let ordering = ordering_bitmap(OrderingScheme::Sequential, 1, 1).unwrap();
    let dd = discretize(
        DistributionSpec::custom(|x: &[f64]| if x[0] < 0.5 { 0.25 } else { 0.75 }),
        &grid,
        &ordering,
    )
    .unwrap();
    let plan = grover_rudolph_baseline(&dd).unwrap();
    assert_eq!(plan.gates().len(), 1);
    assert_eq!(plan.total_gate_count(), 1);
    match plan.gates()[0].kind() {
        GateKind::MultiplexedRy(angles) => {
            assert_eq!(angles.len(), 1);
            let want = 2.0 * (0.25f64).sqrt().acos();
            assert!((angles[0] - want).abs() <= 1e-14);
        }
        other => panic!("expected a multiplexed rotation, got {other:?}"),
    }
    let amps = simulated_amps(&plan);
    assert!((amps[0].re - 0.5).abs() <= 1e-12);
    assert!((amps[1].re - 0.75f64.sqrt()).abs() <= 1e-12);
}

#[test]
fn baseline_uniform_rotations_are_all_half_pi() {
    let grid = GridSpec::new(vec![(0.0, 1.0)], 3).unwrap();
    let ordering = ordering_bitmap(OrderingScheme::Sequential, 1, 3).unwrap();
    let dd = discretize(DistributionSpec::custom(|_: &[f64]| 1.0), &grid, &ordering).unwrap();
    let plan = grover_rudolph_baseline(&dd).unwrap();
    for gate in plan.gates() {
        match gate.kind() {
            GateKind::MultiplexedRy(angles) => {
                for a in angles {
                    assert!((a - std::f64::consts::FRAC_PI_2).abs() <= 1e-12);
                }
            }
            other => panic!("unexpected gate {other:?}"),
        }
    }
    let amps = simulated_amps(&plan);
    let want = 1.0 / (8.0f64).sqrt();
    for z in amps {
        assert!((z.re - want).abs() <= 1e-12);
    }
}

#[test]
fn baseline_node_count_is_exponential_and_exact() {
    let dd = lognormal_dd(8);
    let plan = grover_rudolph_baseline(&dd).unwrap();
    assert_eq!(plan.gates().len(), 8);
    assert_eq!(plan.total_gate_count(), 255);

    let probs = dd.materialize_probs(1 << 22).unwrap();
    let target: Vec<f64> = probs.iter().map(|p| p.sqrt()).collect();
    let f = fidelity(&simulated_amps(&plan), &to_complex(&target)).unwrap();
    assert!(f >= 1.0 - 1e-10, "fidelity {f}");
}

#[test]
fn baseline_zero_subtrees_get_zero_angles() {
    let grid = GridSpec::new(vec![(0.0, 1.0)], 2).unwrap();
    let ordering = ordering_bitmap(OrderingScheme::Sequential, 1, 2).unwrap();
    let dd = discretize(
        DistributionSpec::custom(|x: &[f64]| if x[0] >= 0.5 { 1.0 } else { 0.0 }),
        &grid,
        &ordering,
    )
    .unwrap();
    let plan = grover_rudolph_baseline(&dd).unwrap();
    let amps = simulated_amps(&plan);
    let s = 0.5f64.sqrt();
    assert!(amps[0].norm() <= 1e-12);
    assert!(amps[1].norm() <= 1e-12);
    assert!((amps[2].re - s).abs() <= 1e-12);
    assert!((amps[3].re - s).abs() <= 1e-12);
    // level 2's branch under the dead prefix carries the zero-angle convention
    match plan.gates()[1].kind() {
        GateKind::MultiplexedRy(angles) => assert_eq!(angles[0], 0.0),
        other => panic!("unexpected gate {other:?}"),
    }
}

#[test]
fn baseline_rejects_multivariate_input() {
    let grid = GridSpec::new(vec![(0.5, 2.0), (0.5, 2.0)], 2).unwrap();
    let ordering = ordering_bitmap(OrderingScheme::Sequential, 2, 2).unwrap();
    let dd = discretize(
        DistributionSpec::canonical_lognormal_nd(2),
        &grid,
        &ordering,
    )
    .unwrap();
    assert!(grover_rudolph_baseline(&dd).is_err());
}

#[test]
fn depth_counts_longest_overlapping_chain() {
    let mut rng = StdRng::seed_from_u64(41);
    // three disjoint 1-qubit gates
    let gates = vec![
        GateOp::unitary(1, random_unitary(&mut rng, 2), GateOrigin::Merged).unwrap(),
        GateOp::unitary(2, random_unitary(&mut rng, 2), GateOrigin::Merged).unwrap(),
        GateOp::unitary(3, random_unitary(&mut rng, 2), GateOrigin::Merged).unwrap(),
    ];
    let plan = CircuitPlan::new(3, gates, 1.0).unwrap();
    let report = depth_report(&plan);
    assert_eq!(report.depth, 1);
    assert_eq!(report.gate_count, 3);
    assert_eq!(report.max_gate_width, 1);
    assert_eq!(report.two_level_decomposed_depth_estimate, 12.0);

    // a staircase where consecutive gates share a qubit
    let d = 5;
    let gates: Vec<GateOp> = (1..d)
        .rev()
        .map(|k| {
            GateOp::unitary(k + 1, random_unitary(&mut rng, 4), GateOrigin::Merged).unwrap()
        })
        .collect();
    let plan = CircuitPlan::new(d, gates, 1.0).unwrap();
    assert_eq!(depth_report(&plan).depth, d - 1);
    assert_eq!(
        depth_report(&plan).two_level_decomposed_depth_estimate,
        (d - 1) as f64 * 16.0
    );
}

#[test]
fn merged_depth_never_exceeds_unmerged() {
    let mut rng = StdRng::seed_from_u64(43);
    for _ in 0..10 {
        let ranks = vec![1usize, 2, 4, 4, 2, 2, 2, 1];
        let tt = random_quantics_tt(&mut rng, &ranks);
        let plan = tt_to_circuit(&tt, 4).unwrap();
        let merged = merge_gates(&plan);
        assert!(depth_report(&merged).depth <= depth_report(&plan).depth);
    }
}

#[test]
fn plan_construction_validates_supports() {
    let mut rng = StdRng::seed_from_u64(47);
    let g = GateOp::unitary(5, random_unitary(&mut rng, 2), GateOrigin::Merged).unwrap();
    assert!(CircuitPlan::new(4, vec![g], 1.0).is_err());
    assert!(CircuitPlan::new(4, vec![], 0.0).is_err());
    assert!(CircuitPlan::new(4, vec![], -1.0).is_err());
}
