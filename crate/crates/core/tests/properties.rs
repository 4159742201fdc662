use nalgebra::DMatrix;
use num_bigint::BigUint;
use proptest::prelude::*;
use qcap::capacity::{ce_objective, concavity_slack};
use qcap::gaussian::{coherent_bounds, gaussian_ce, GaussianParams};
use qcap::qmath::random::{random_channel, random_density};
use qcap::qmath::{von_neumann_entropy, ComplexMatrix, DensityOperator};
use qcap::reverse_shannon::{ba_capacity, constrained_mi, Dmc};
use qcap::typeclasses::{enumerate_types, type_from_rank, type_of, typical_eigenstate_set, TypeClass};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=4, 1usize..=4, 1usize..=4).prop_filter("isometry must exist", |&(a, b, k)| b * k >= a)
}

fn stochastic_row(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, d).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kraus_families_are_complete(seed in any::<u64>(), (d_in, d_out, k) in dims()) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let ch = random_channel(&mut rng, d_in, d_out, k);
        let sum = ch.kraus().iter().fold(ComplexMatrix::zeros(d_in, d_in), |s, a| s + a.adjoint() * a);
        let err = (sum - DMatrix::identity(d_in, d_in)).norm();
        prop_assert!(err < 1e-10, "sum A^dag A deviates from I by {err}");
    }

    #[test]
    fn entropy_within_bounds(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let rho = random_density(&mut rng, d);
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= -1e-12 && s <= (d as f64).log2() + 1e-12);
    }

    #[test]
    fn objective_bounded_and_concave(seed in any::<u64>(), p in 0.0f64..=1.0, (d_in, d_out, k) in dims()) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let ch = random_channel(&mut rng, d_in, d_out, k);
        let rho = random_density(&mut rng, d_in);
        let f = ce_objective(&ch, &rho).unwrap();
        // I(rho, N) <= 2 log2 d_in and <= 2 S(rho)
        prop_assert!(f >= -1e-10 && f <= 2.0 * von_neumann_entropy(&rho) + 1e-10);
        let sigma = random_density(&mut rng, d_in);
        prop_assert!(concavity_slack(&ch, &rho, &sigma, p).unwrap() >= -1e-8);
    }

    #[test]
    fn blahut_arimoto_dominates_every_input(
        rows in prop::collection::vec(stochastic_row(3), 2..=4),
        q in stochastic_row(4),
    ) {
        let dmc = Dmc::new(rows).unwrap();
        let q: Vec<f64> = {
            let q = &q[..dmc.inputs()];
            let s: f64 = q.iter().sum();
            q.iter().map(|x| x / s).collect()
        };
        let (c, q_star) = ba_capacity(&dmc, 1e-10).unwrap();
        prop_assert!(constrained_mi(&dmc, &q).unwrap() <= c + 1e-8);
        prop_assert!((constrained_mi(&dmc, &q_star).unwrap() - c).abs() < 1e-8);
    }

    #[test]
    fn type_rank_round_trip(n in 0usize..=12, d in 1usize..=4, seed in any::<u64>()) {
        let types = enumerate_types(n, d).unwrap();
        let pick = (seed as usize) % types.len();
        let t = &types[pick];
        prop_assert_eq!(t.rank(), pick as u128);
        prop_assert_eq!(&type_from_rank(n, d, t.rank()).unwrap(), t);
    }

    #[test]
    fn type_of_string_matches_counts(x in prop::collection::vec(0usize..3, 0..20)) {
        let t = type_of(&x, 3).unwrap();
        for a in 0..3 {
            prop_assert_eq!(t.counts()[a], x.iter().filter(|&&v| v == a).count());
        }
        prop_assert_eq!(&t, &TypeClass::new(t.counts().to_vec()).unwrap());
    }

    #[test]
    fn typical_cardinality_matches_brute_force(n in 1usize..=10, p in 0.05f64..0.95, delta in 0.01f64..0.5) {
        let set = typical_eigenstate_set(&[p, 1.0 - p], n, delta).unwrap();
        let brute = (0u32..1 << n)
            .filter(|&m| {
                let ones = m.count_ones() as f64;
                let zeros = n as f64 - ones;
                (zeros - p * n as f64).abs() < delta * n as f64
                    && (ones - (1.0 - p) * n as f64).abs() < delta * n as f64
            })
            .count();
        prop_assert_eq!(set.cardinality().unwrap(), BigUint::from(brute));
        prop_assert_eq!(set.iter().unwrap().count(), brute);
    }

    #[test]
    fn gaussian_ce_continuous_at_unit_k(s in 0.01f64..100.0, n in 0.01f64..100.0) {
        let at = |k: f64| gaussian_ce(&GaussianParams::new(s, n, k).unwrap()).unwrap();
        let c = at(1.0);
        for k in [1.0 - 1e-7, 1.0 + 1e-7] {
            prop_assert!((at(k) - c).abs() < 1e-5 * (1.0 + c), "jump at k = {k}");
        }
    }

    #[test]
    fn gaussian_ce_between_coherent_bounds(s in 0.01f64..100.0, n in 0.01f64..100.0, k in 0.05f64..5.0) {
        let p = GaussianParams::new(s, n, k).unwrap();
        let ce = gaussian_ce(&p).unwrap();
        let (lo, hi) = coherent_bounds(&p).unwrap();
        prop_assert!(lo <= ce + 1e-9 && ce <= hi + 1e-9);
    }
}

#[test]
fn pure_state_has_zero_entropy() {
    let rho = DensityOperator::basis(3, 1);
    assert!(von_neumann_entropy(&rho).abs() < 1e-12);
}
