use proptest::prelude::*;
use veq_core::{PolyCone, Region};

const TOL: f64 = 1e-9;

fn cones() -> Vec<PolyCone> {
    vec![
        PolyCone::orthant(2),
        PolyCone::orthant(3),
        PolyCone::new(vec![vec![1.0, 1.0], vec![-1.0, 1.0]], "ice").unwrap(),
    ]
}

fn vec_in(dim: usize, scale: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-scale..scale, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn interior_implies_closed_and_antisymmetry(z2 in vec_in(2, 10.0), z3 in vec_in(3, 10.0)) {
        for cone in cones() {
            let z = if cone.dim() == 2 { &z2 } else { &z3 };
            let m = |r| cone.member(z, r, TOL).unwrap();
            prop_assert!(!m(Region::InIntC) || m(Region::InC));
            prop_assert!(!m(Region::InNegIntC) || m(Region::InNegC));
            prop_assert!(!(m(Region::InIntC) && m(Region::InNegIntC)));
        }
    }

    #[test]
    fn pointed_at_tolerance(z2 in vec_in(2, 1.0), z3 in vec_in(3, 1.0), r in 0.0f64..50.0) {
        for cone in cones() {
            let rep = cone.validate(TOL);
            prop_assert!(rep.is_valid());
            let z: Vec<f64> = (if cone.dim() == 2 { &z2 } else { &z3 }).iter().map(|v| v * r * TOL).collect();
            if cone.member(&z, Region::InC, TOL).unwrap() && cone.member(&z, Region::InNegC, TOL).unwrap() {
                let n = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!(n <= rep.kappa * TOL * (1.0 + 1e-9), "|z| = {n}, kappa = {}", rep.kappa);
            }
        }
    }
}

#[test]
fn interior_plus_cone_stays_interior() {
    for (k, cone) in cones().into_iter().enumerate() {
        let c1: Vec<Vec<f64>> = cone
            .sample(Region::InIntC, 12_000, 11 + k as u64)
            .unwrap()
            .into_iter()
            .filter(|c| cone.margin(c).unwrap() >= 10.0 * TOL)
            .take(10_000)
            .collect();
        let c2 = cone.sample(Region::InC, 10_000, 101 + k as u64).unwrap();
        assert_eq!(c1.len(), 10_000);
        for (a, b) in c1.iter().zip(&c2) {
            let s: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
            assert!(cone.member(&s, Region::InIntC, TOL).unwrap(), "{a:?} + {b:?}");
        }
    }
}

#[test]
fn samples_are_seed_deterministic() {
    let cone = &cones()[2];
    assert_eq!(cone.sample(Region::InC, 50, 4).unwrap(), cone.sample(Region::InC, 50, 4).unwrap());
    assert_ne!(cone.sample(Region::InC, 50, 4).unwrap(), cone.sample(Region::InC, 50, 5).unwrap());
}
