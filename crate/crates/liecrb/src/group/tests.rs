use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use super::series::exp_series;
use super::*;

fn random_algebra(group: &Group, rng: &mut impl Rng, scale: f64) -> AlgebraVector {
    let n = group.dim();
    let coords = DVector::from_iterator(n, (0..n).map(|_| rng.random_range(-scale..scale)));
    group.algebra(coords).unwrap()
}

fn all_groups() -> Vec<Group> {
    vec![
        Group::so3(),
        Group::se3(),
        Group::se2(),
        Group::abelian(3).unwrap(),
    ]
}

#[test]
fn hat_of_zero_is_zero_matrix() {
    let g = Group::so3();
    assert_eq!(g.zero_algebra().hat(), DMatrix::zeros(3, 3));
}

#[test]
fn hat_so3_first_generator_entries() {
    let g = Group::so3();
    let m = g.algebra_from(&[1.0, 0.0, 0.0]).unwrap().hat();
    assert_eq!(m[(2, 1)], 1.0);
    assert_eq!(m[(1, 2)], -1.0);
    assert_eq!(m.norm_squared(), 2.0);
}

#[test]
fn hat_abelian_embedding() {
    let g = Group::abelian(2).unwrap();
    let m = g.algebra_from(&[3.0, 4.0]).unwrap().hat();
    assert_eq!(m[(0, 2)], 3.0);
    assert_eq!(m[(1, 2)], 4.0);
    assert_eq!(m.norm_squared(), 25.0);
}

#[test]
fn hat_rejects_wrong_length() {
    let g = Group::so3();
    assert!(matches!(
        g.algebra_from(&[1.0, 2.0]),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn vee_of_zero_matrix_is_zero() {
    let g = Group::se3();
    let v = g.vee(&DMatrix::zeros(4, 4)).unwrap();
    assert_eq!(v.coords(), &DVector::zeros(6));
}

#[test]
fn vee_hat_round_trip_is_exact() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for group in all_groups() {
        for _ in 0..200 {
            let v = random_algebra(&group, &mut rng, 2.0);
            let back = group.vee(&v.hat()).unwrap();
            assert_eq!(back.coords(), v.coords(), "on {}", group.name());
        }
    }
}

#[test]
fn vee_projects_small_orthogonal_perturbations() {
    let g = Group::so3();
    let v = g.algebra_from(&[0.0, 0.0, 1.0]).unwrap();
    let mut m = v.hat();
    // Symmetric perturbation, orthogonal to the skew subspace.
    m[(0, 1)] += 1e-12;
    m[(1, 0)] += 1e-12;
    let back = g.vee(&m).unwrap();
    assert_eq!(back.coords(), v.coords());
}

#[test]
fn vee_rejects_matrices_outside_subspace() {
    let g = Group::so3();
    let mut m = DMatrix::zeros(3, 3);
    m[(0, 0)] = 1e-3;
    assert!(matches!(g.vee(&m), Err(Error::NotInAlgebra { .. })));
}

#[test]
fn exp_of_zero_is_identity() {
    for group in all_groups() {
        let e = group.zero_algebra().exp();
        assert_eq!(e.matrix(), group.identity().matrix());
    }
}

#[test]
fn exp_so3_quarter_turn_about_z() {
    let g = Group::so3();
    let r = g.algebra_from(&[0.0, 0.0, FRAC_PI_2]).unwrap().exp();
    let expected = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    assert!((r.matrix() - expected).norm() < 1e-15);
}

#[test]
fn exp_abelian_is_translation() {
    let g = Group::abelian(2).unwrap();
    let e = g.algebra_from(&[0.7, -1.5]).unwrap().exp();
    assert_eq!(e.matrix()[(0, 2)], 0.7);
    assert_eq!(e.matrix()[(1, 2)], -1.5);
}

#[test]
fn closed_form_exp_matches_series() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    for group in all_groups() {
        for _ in 0..100 {
            let v = random_algebra(&group, &mut rng, 1.2);
            let closed = v.exp();
            let series = exp_series(&v.hat());
            assert!(
                (closed.matrix() - &series).norm() < 1e-13,
                "exp mismatch on {}",
                group.name()
            );
        }
    }
}

#[test]
fn log_of_identity_is_zero() {
    for group in all_groups() {
        let v = group.identity().log().unwrap();
        assert_eq!(v.coords(), &DVector::zeros(group.dim()));
    }
}

#[test]
fn log_exp_round_trip_small_vector() {
    let g = Group::so3();
    let v = g.algebra_from(&[0.1, -0.2, 0.3]).unwrap();
    let back = v.exp().log().unwrap();
    assert!((back.coords() - v.coords()).norm() < 1e-12);
}

#[test]
fn log_exp_round_trips_inside_unit_ball() {
    let mut rng = ChaCha12Rng::seed_from_u64(13);
    for group in all_groups() {
        for _ in 0..1000 {
            let mut v = random_algebra(&group, &mut rng, 1.0);
            if v.norm() >= 1.0 {
                v = v.scaled(0.9 / v.norm());
            }
            let back = v.exp().log().unwrap();
            assert!(
                (back.coords() - v.coords()).norm() < 1e-10,
                "round trip on {}: {:?}",
                group.name(),
                v.coords()
            );
        }
    }
}

#[test]
fn log_near_branch_cut_uses_stable_extraction() {
    let g = Group::so3();
    let angle = PI - 1e-3;
    let v = g.algebra_from(&[angle, 0.0, 0.0]).unwrap();
    let back = v.exp().log().unwrap();
    assert!((back.coords()[0] - angle).abs() < 1e-9);
    assert!(back.coords()[1].abs() < 1e-9 && back.coords()[2].abs() < 1e-9);
    let round = back.exp();
    assert!((round.matrix() - v.exp().matrix()).norm() < 1e-9);
}

#[test]
fn log_at_branch_cut_errors_with_angle() {
    let g = Group::so3();
    let v = g.algebra_from(&[PI - 1e-8, 0.0, 0.0]).unwrap();
    match v.exp().log() {
        Err(Error::LogBranchCut { angle, limit }) => {
            assert!((angle - PI).abs() < 1e-6);
            assert!((limit - (PI - 1e-6)).abs() < 1e-12);
        }
        other => panic!("expected branch-cut error, got {other:?}"),
    }

    let se2 = Group::se2();
    let w = se2.algebra_from(&[PI - 1e-9, 0.5, 0.5]).unwrap();
    assert!(matches!(w.exp().log(), Err(Error::LogBranchCut { .. })));
}

#[test]
fn se2_log_round_trip() {
    let g = Group::se2();
    let v = g.algebra_from(&[2.5, -1.0, 3.0]).unwrap();
    let back = v.exp().log().unwrap();
    assert!((back.coords() - v.coords()).norm() < 1e-12);
}

#[test]
fn compose_with_inverse_gives_identity() {
    let mut rng = ChaCha12Rng::seed_from_u64(17);
    for group in all_groups() {
        let g = random_algebra(&group, &mut rng, 1.0).exp();
        let prod = g.compose(&g.inverse()).unwrap();
        assert!(
            (prod.matrix() - group.identity().matrix()).norm() < 1e-12,
            "on {}",
            group.name()
        );
    }
}

#[test]
fn compose_with_identity_is_exact() {
    let g = Group::so3();
    let x = g.algebra_from(&[0.4, 0.1, -0.2]).unwrap().exp();
    let same = g.identity().compose(&x).unwrap();
    assert_eq!(same.matrix(), x.matrix());
}

#[test]
fn compose_rejects_group_mismatch() {
    let a = Group::so3().identity();
    let b = Group::se2().identity();
    assert!(matches!(a.compose(&b), Err(Error::GroupMismatch { .. })));
}

#[test]
fn se3_inverse_block_formula() {
    let g = Group::se3();
    let v = g.algebra_from(&[0.3, -0.2, 0.5, 1.0, 2.0, -0.5]).unwrap();
    let e = v.exp();
    let inv = e.inverse();
    let r = e.matrix().view((0, 0), (3, 3)).into_owned();
    let t = DVector::from_iterator(3, (0..3).map(|i| e.matrix()[(i, 3)]));
    let expected_t = -(r.transpose() * t);
    for i in 0..3 {
        for j in 0..3 {
            assert!((inv.matrix()[(i, j)] - r[(j, i)]).abs() < 1e-15);
        }
        assert!((inv.matrix()[(i, 3)] - expected_t[i]).abs() < 1e-14);
    }
    let prod = e.compose(&inv).unwrap();
    assert!((prod.matrix() - g.identity().matrix()).norm() < 1e-14);
}

#[test]
fn group_closure_under_long_composition_chains() {
    let mut rng = ChaCha12Rng::seed_from_u64(19);
    for group in all_groups() {
        let mut acc = group.identity();
        for _ in 0..10_000 {
            let step = random_algebra(&group, &mut rng, 0.5).exp();
            acc = acc.compose(&step).unwrap();
        }
        assert!(
            acc.constraint_residual() < 1e-9,
            "closure drift on {}: {}",
            group.name(),
            acc.constraint_residual()
        );
    }
}

#[test]
fn bracket_of_vector_with_itself_vanishes() {
    let mut rng = ChaCha12Rng::seed_from_u64(23);
    for group in all_groups() {
        let x = random_algebra(&group, &mut rng, 1.0);
        assert_eq!(x.bracket(&x).norm(), 0.0, "on {}", group.name());
    }
}

#[test]
fn bracket_so3_is_cross_product_algebra() {
    let g = Group::so3();
    let e3 = g.basis_vector(0).bracket(&g.basis_vector(1));
    assert_eq!(e3.coords(), g.basis_vector(2).coords());
}

#[test]
fn bracket_abelian_always_zero() {
    let g = Group::abelian(4).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(29);
    for _ in 0..20 {
        let x = random_algebra(&g, &mut rng, 3.0);
        let y = random_algebra(&g, &mut rng, 3.0);
        assert_eq!(x.bracket(&y).norm(), 0.0);
    }
}

#[test]
fn bracket_antisymmetry() {
    let mut rng = ChaCha12Rng::seed_from_u64(31);
    for group in all_groups() {
        for _ in 0..100 {
            let x = random_algebra(&group, &mut rng, 1.0);
            let y = random_algebra(&group, &mut rng, 1.0);
            let xy = x.bracket(&y);
            let yx = y.bracket(&x);
            assert!(
                (xy.coords() + yx.coords()).norm() < 1e-14,
                "antisymmetry on {}",
                group.name()
            );
        }
    }
}

#[test]
fn jacobi_identity_on_random_triples() {
    let mut rng = ChaCha12Rng::seed_from_u64(37);
    for group in all_groups() {
        for _ in 0..100 {
            let x = random_algebra(&group, &mut rng, 1.0);
            let y = random_algebra(&group, &mut rng, 1.0);
            let z = random_algebra(&group, &mut rng, 1.0);
            let sum = x.bracket(&y.bracket(&z)).coords()
                + y.bracket(&z.bracket(&x)).coords()
                + z.bracket(&x.bracket(&y)).coords();
            assert!(sum.norm() < 1e-12, "Jacobi on {}", group.name());
        }
    }
}

#[test]
fn ad_matrix_of_zero_is_zero() {
    let g = Group::se3();
    assert_eq!(g.zero_algebra().ad_matrix(), DMatrix::zeros(6, 6));
}

#[test]
fn ad_matrix_so3_is_hat() {
    let g = Group::so3();
    let x = g.algebra_from(&[0.3, -0.7, 1.1]).unwrap();
    assert_eq!(x.ad_matrix(), x.hat());
}

#[test]
fn ad_matrix_applied_to_itself_vanishes() {
    let mut rng = ChaCha12Rng::seed_from_u64(41);
    for group in all_groups() {
        let x = random_algebra(&group, &mut rng, 1.0);
        assert!((x.ad_matrix() * x.coords()).norm() < 1e-14);
    }
}

#[test]
fn ad_matrix_reproduces_brackets() {
    let mut rng = ChaCha12Rng::seed_from_u64(43);
    for group in all_groups() {
        for _ in 0..50 {
            let x = random_algebra(&group, &mut rng, 1.0);
            let y = random_algebra(&group, &mut rng, 1.0);
            let via_ad = x.ad_matrix() * y.coords();
            let direct = x.bracket(&y);
            assert!(
                (via_ad - direct.coords()).norm() < 1e-14,
                "ad consistency on {}",
                group.name()
            );
        }
    }
}

#[test]
fn ad_matrix_columns_match_structure_constants() {
    for group in all_groups() {
        let n = group.dim();
        let c = group.structure_constants();
        for i in 0..n {
            let ad = group.basis_vector(i).ad_matrix();
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(ad[(k, j)], c.get(i, j, k), "on {}", group.name());
                }
            }
        }
    }
}

#[test]
fn structure_constants_antisymmetric_in_first_two_indices() {
    for group in all_groups() {
        let n = group.dim();
        let c = group.structure_constants();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(c.get(i, j, k), -c.get(j, i, k));
                }
            }
        }
    }
}

#[test]
fn element_constructor_rejects_invalid_matrices() {
    let g = Group::so3();
    let mut bad = DMatrix::identity(3, 3);
    bad[(0, 0)] = 1.0 + 1e-6;
    assert!(matches!(g.element(bad), Err(Error::NotInGroup { .. })));
}

#[test]
fn project_restores_group_membership() {
    let g = Group::so3();
    let mut drifted = g
        .algebra_from(&[0.4, 0.2, -0.3])
        .unwrap()
        .exp()
        .matrix()
        .clone();
    drifted[(0, 1)] += 1e-5;
    let projected = g.project(&GroupElement {
        mat: drifted,
        group: g.clone(),
    });
    assert!(projected.constraint_residual() < 1e-12);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn coords3() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-0.9f64..0.9, 3)
    }

    proptest! {
        #[test]
        fn prop_vee_hat_round_trip_so3(c in coords3()) {
            let g = Group::so3();
            let v = g.algebra_from(&c).unwrap();
            let back = g.vee(&v.hat()).unwrap();
            prop_assert_eq!(back.coords(), v.coords());
        }

        #[test]
        fn prop_exp_log_round_trip_so3(c in coords3()) {
            let g = Group::so3();
            let v = g.algebra_from(&c).unwrap();
            let back = v.exp().log().unwrap();
            prop_assert!((back.coords() - v.coords()).norm() < 1e-10);
        }

        #[test]
        fn prop_bracket_antisymmetric_se3(
            a in proptest::collection::vec(-1.0f64..1.0, 6),
            b in proptest::collection::vec(-1.0f64..1.0, 6),
        ) {
            let g = Group::se3();
            let x = g.algebra_from(&a).unwrap();
            let y = g.algebra_from(&b).unwrap();
            prop_assert!((x.bracket(&y).coords() + y.bracket(&x).coords()).norm() < 1e-14);
        }
    }
}
