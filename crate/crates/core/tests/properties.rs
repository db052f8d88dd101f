use proptest::prelude::*;

use qcap::capacity::{maximize_mutual_info, ConstraintSpec, SolverOptions};
use qcap::channel::KrausChannel;
use qcap::cli::problem::{matrix_from_rows, matrix_to_rows};
use qcap::cli::record::format_float;
use qcap::entropy::{
    entropy, holevo_chi, mutual_information, mutual_information_via_relent, relative_entropy,
    Ensemble, ExtendedReal,
};
use qcap::observable::ConstraintObservable;
use qcap::random::{
    random_channel, random_density, random_observable_matrix, random_unitary, seeded,
};
use qcap::state::{partial_trace, DensityMatrix, Subsystem};

#[derive(Clone, Debug)]
struct Setup {
    seed: u64,
    din: usize,
    dout: usize,
    rank: usize,
}

fn setup() -> impl Strategy<Value = Setup> {
    (any::<u64>(), 1usize..=3, 1usize..=3).prop_flat_map(|(seed, din, dout)| {
        (Just(seed), Just(din + 1), Just(dout + 1), 1..=din + 1).prop_map(
            |(seed, din, dout, rank)| Setup {
                seed,
                din,
                dout,
                rank,
            },
        )
    })
}

impl Setup {
    fn build(&self) -> (KrausChannel, DensityMatrix) {
        let mut rng = seeded(self.seed);
        let r = (self.din.div_ceil(self.dout)).max(1 + (self.seed % 3) as usize);
        let ch = random_channel(&mut rng, self.din, self.dout, r);
        (ch, random_density(&mut rng, self.din, self.rank))
    }
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn entropy_is_bounded_and_unitarily_invariant(seed in any::<u64>(), d in 2usize..=5, rank in 1usize..=5) {
        let mut rng = seeded(seed);
        let s = random_density(&mut rng, d, rank.min(d));
        let h = entropy(&s).unwrap();
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= (d as f64).ln() + 1e-12);
        let u = random_unitary(&mut rng, d);
        prop_assert!((entropy(&s.conjugate_by(&u)).unwrap() - h).abs() < 1e-9);
    }

    #[test]
    fn channel_outputs_are_states(p in setup()) {
        let (ch, s) = p.build();
        prop_assert!(ch.tp_defect() < 1e-10);
        let out = ch.apply(&s).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(out.eigenvalues().unwrap().iter().all(|&x| x > -1e-10));
        let env = ch.complementary_apply(&s).unwrap();
        prop_assert!((env.matrix().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mutual_information_routes_agree_and_are_bounded(p in setup()) {
        let (ch, s) = p.build();
        let a = mutual_information(&s, &ch).unwrap();
        let b = mutual_information_via_relent(&s, &ch).unwrap().to_f64();
        prop_assert!((a - b).abs() < 1e-7, "{} vs {}", a, b);
        prop_assert!(a >= -1e-9);
        prop_assert!(a <= 2.0 * entropy(&s).unwrap() + 1e-9);
    }

    #[test]
    fn post_processing_cannot_increase_mutual_information(p in setup(), seed2 in any::<u64>()) {
        let (ch, s) = p.build();
        let mut rng = seeded(seed2);
        let post = random_channel(&mut rng, p.dout, 2, 2);
        let joined = post.compose(&ch).unwrap();
        let before = mutual_information(&s, &ch).unwrap();
        let after = mutual_information(&s, &joined).unwrap();
        prop_assert!(after <= before + 1e-9, "{} > {}", after, before);
    }

    #[test]
    fn relative_entropy_is_nonnegative(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = seeded(seed);
        let a = random_density(&mut rng, d, d);
        let b = random_density(&mut rng, d, d);
        let v = relative_entropy(&a, &b).unwrap();
        prop_assert!(v.to_f64() >= -1e-10);
        prop_assert!(relative_entropy(&a, &a).unwrap().to_f64().abs() < 1e-9);
        let pure = random_density(&mut rng, d, 1);
        prop_assert!(matches!(relative_entropy(&a, &pure).unwrap(), ExtendedReal::Infinite));
    }

    #[test]
    fn holevo_quantity_sits_below_mutual_information(p in setup(), m in 2usize..=4) {
        let (ch, _) = p.build();
        let mut rng = seeded(p.seed ^ 0x5eed);
        let members: Vec<(f64, DensityMatrix)> =
            (0..m).map(|_| (1.0 / m as f64, random_density(&mut rng, p.din, 1))).collect();
        let ens = Ensemble::new(members).unwrap();
        let chi = holevo_chi(&ens, &ch).unwrap();
        let out = ch.apply(&ens.average()).unwrap();
        prop_assert!(chi >= -1e-10);
        prop_assert!(chi <= entropy(&out).unwrap() + 1e-10);
        prop_assert!(chi <= mutual_information(&ens.average(), &ch).unwrap() + 1e-9);
    }

    #[test]
    fn kraus_reduction_preserves_the_channel(p in setup()) {
        let (ch, _) = p.build();
        let doubled: Vec<_> = ch
            .kraus_ops()
            .iter()
            .flat_map(|k| [k.scale(0.6), k.scale(0.8)])
            .collect();
        let wide = KrausChannel::new(doubled).unwrap();
        let small = wide.reduce_kraus_rank().unwrap();
        prop_assert!(small.n_kraus() <= ch.n_kraus());
        prop_assert!((&small.choi() - &ch.choi()).max_abs() < 1e-10);
    }

    #[test]
    fn partial_traces_undo_tensor_products(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3) {
        let mut rng = seeded(seed);
        let a = random_density(&mut rng, da, da);
        let b = random_density(&mut rng, db, db);
        let ab = a.tensor(&b);
        let back_a = partial_trace(&ab, (da, db), Subsystem::A).unwrap();
        let back_b = partial_trace(&ab, (da, db), Subsystem::B).unwrap();
        prop_assert!((&back_a.matrix().clone() - a.matrix()).max_abs() < 1e-12);
        prop_assert!((&back_b.matrix().clone() - b.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn csv_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn problem_matrices_round_trip(entries in prop::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 9)) {
        let rows: Vec<Vec<[f64; 2]>> = entries.chunks(3).map(|r| r.iter().map(|&(a, b)| [a, b]).collect()).collect();
        let m = matrix_from_rows(&rows).unwrap();
        prop_assert_eq!(matrix_to_rows(&m), rows);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn capacity_grows_with_energy_and_respects_the_constraint(
        seed in any::<u64>(),
        r in 1usize..=3,
        a in 0.5..2.0f64,
        (t1, t2) in (0.05..0.45f64, 0.05..0.45f64),
    ) {
        let mut rng = seeded(seed);
        let ch = random_channel(&mut rng, 2, 2, r);
        let f = ConstraintObservable::from_matrix(random_observable_matrix(&mut rng, &[0.0, a])).unwrap();
        let (lo, hi) = (t1.min(t2) * a, t1.max(t2) * a);
        let opts = SolverOptions::default();
        let c_lo = maximize_mutual_info(&ch, &ConstraintSpec::new(f.clone(), lo).unwrap(), &opts).unwrap();
        let c_hi = maximize_mutual_info(&ch, &ConstraintSpec::new(f, hi).unwrap(), &opts).unwrap();
        prop_assert!(c_lo.value <= c_hi.value + 2e-6);
        prop_assert!(c_lo.constraint_slack >= -1e-8);
        prop_assert!(c_hi.constraint_slack >= -1e-8);
        prop_assert!(c_hi.value <= 2.0 * 2f64.ln() + 1e-9);
    }
}
