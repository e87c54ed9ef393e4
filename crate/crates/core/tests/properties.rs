use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use torichodge::cox::{graded_piece_dim, GradedJacobianRing, GradedPolynomial};
use torichodge::document::{Character, Document, Morphism, Term};
use torichodge::linalg::{dot, int, rat, smith_normal_form, Int, IntMatrix, Rat};
use torichodge::logforms::{cech_cohomology, LogModel, LogSheaf};
use torichodge::polyhedra::{Cone, Fan};
use torichodge::toric::{class_groups, over_point, EquivariantSetup};

fn projective(n: usize) -> EquivariantSetup {
    let mut rays: Vec<Vec<Int>> = (0..n).map(|i| (0..n).map(|j| int((i == j) as i64)).collect()).collect();
    rays.push(vec![int(-1); n]);
    let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    over_point(Fan::new(n, rays, cones).unwrap()).unwrap()
}

fn p1xp1() -> EquivariantSetup {
    over_point(Fan::from_i64(2, &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]], &[&[0, 2], &[0, 3], &[1, 2], &[1, 3]])).unwrap()
}

fn hirzebruch(a: i64) -> EquivariantSetup {
    over_point(Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])).unwrap()
}

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(-8i64..=8, r * c)
            .prop_map(move |xs| IntMatrix::new(r, c, xs.into_iter().map(int).collect()))
    })
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn series_coefficient(vars: usize, top: usize, k: usize) -> u64 {
    let mut c = vec![1u64];
    for _ in 0..vars {
        let mut next = vec![0u64; c.len() + top];
        for (i, x) in c.iter().enumerate() {
            for j in 0..=top {
                next[i + j] += x;
            }
        }
        c = next;
    }
    c.get(k).copied().unwrap_or(0)
}

fn fermat(s: &EquivariantSetup, d: u32) -> GradedPolynomial {
    let n = s.fan().num_rays();
    let terms = (0..n)
        .map(|i| {
            let mut e = vec![0u32; n];
            e[i] = d;
            (rat(1), e)
        })
        .collect();
    GradedPolynomial::new(&class_groups(s), terms).unwrap()
}

fn rational() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=7).prop_map(|(a, b)| Rat::new(int(a), int(b)))
}

fn document() -> impl Strategy<Value = Document> {
    (1usize..=3).prop_flat_map(|rank| {
        let rays = prop::collection::vec(prop::collection::vec(-3i64..=3, rank), 1..=5);
        rays.prop_flat_map(move |rays| {
            let k = rays.len();
            let cones = prop::collection::vec(prop::collection::btree_set(0..k, 1..=k), 1..=3);
            let divisors = prop::collection::btree_map("[a-z]{1,6}", prop::collection::vec(-4i64..=4, k), 0..=3);
            let terms = prop::collection::vec((rational(), prop::collection::vec(0u32..=4, k)), 1..=3);
            let polys = prop::collection::btree_map("[a-z]{1,6}", terms, 0..=2);
            let fibers = prop::collection::btree_map(
                "[a-z]{1,6}",
                prop::collection::vec((prop::collection::vec(-2i64..=2, 1), rational()), 1..=2),
                0..=2,
            );
            let morphism = prop::option::of(prop::collection::vec(-2i64..=2, rank));
            let rays = rays.clone();
            (cones, divisors, polys, fibers, morphism).prop_map(move |(cones, divisors, polys, fibers, morphism)| {
                let has_base = morphism.is_some();
                Document {
                    version: 1,
                    rank,
                    rays: rays.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect(),
                    cones: cones.into_iter().map(|c| c.into_iter().collect()).collect(),
                    morphism: morphism.map(|row| Morphism {
                        matrix: vec![row.into_iter().map(int).collect()],
                        target_cone: vec![vec![int(1)]],
                    }),
                    divisors: divisors.into_iter().map(|(n, v)| (n, v.into_iter().map(int).collect())).collect(),
                    polynomials: polys
                        .into_iter()
                        .map(|(n, ts)| (n, ts.into_iter().map(|(coeff, exponents)| Term { coeff, exponents }).collect()))
                        .collect(),
                    fibers: fibers
                        .into_iter()
                        .filter(|_| has_base)
                        .map(|(n, cs)| {
                            let cs = cs
                                .into_iter()
                                .map(|(c, value)| Character { character: c.into_iter().map(int).collect(), value })
                                .collect();
                            (n, cs)
                        })
                        .collect::<BTreeMap<_, _>>(),
                }
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(m in matrix()) {
        let f = smith_normal_form(&m);
        prop_assert_eq!(f.u.mul(&m).mul(&f.v), f.s.clone());
        prop_assert!(f.u.det().abs().is_one());
        prop_assert!(f.v.det().abs().is_one());
        prop_assert!(f.s.is_diagonal());
        let d: Vec<Int> = (0..m.rows().min(m.cols())).map(|i| f.s.get(i, i).clone()).collect();
        prop_assert_eq!(f.invariant_factors(), d[..f.rank()].to_vec());
        for w in d.windows(2) {
            prop_assert!(!w[0].is_negative());
            let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            prop_assert!(divides);
        }
        prop_assert_eq!(f.rank(), m.rank());
    }

    #[test]
    fn double_dual_is_the_cone(dim in 2usize..=4, gens in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..=5)) {
        let gens: Vec<Vec<Int>> = gens.iter().map(|g| g[..dim].iter().map(|&x| int(x)).collect()).collect();
        let c = Cone::new(dim, gens.clone());
        prop_assert!(c.dual().dual().same_set(&c));
        for g in &gens {
            prop_assert!(c.contains(g));
            for m in c.dual().generators() {
                prop_assert!(!dot(m, g).is_negative());
            }
        }
    }

    #[test]
    fn document_json_round_trip(doc in document()) {
        let text = doc.to_json();
        let back = Document::parse(&text);
        prop_assert!(back.is_ok(), "{:?}", back.err());
        prop_assert_eq!(back.unwrap(), doc);
    }

    #[test]
    fn line_bundle_euler_characteristic_on_the_plane(d in -6i64..=5) {
        // Riemann-Roch: chi(O(d)) = (d+1)(d+2)/2.
        let s = projective(2);
        let sheaf = LogSheaf::new(&s, 0, LogModel::Tilde, vec![int(d), int(0), int(0)]).unwrap();
        let h = cech_cohomology(&sheaf, None).unwrap().h;
        let chi: i64 = h.iter().enumerate().map(|(q, &x)| if q % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        prop_assert_eq!(chi, (d + 1) * (d + 2) / 2);
        prop_assert_eq!(h[0] as i64, binomial(d + 2, 2));
        prop_assert_eq!(h[2] as i64, binomial(-d - 1, 2));
        prop_assert!(h.iter().skip(3).all(|&x| x == 0));
    }

    #[test]
    fn bidegree_cohomology_on_p1xp1(a in -4i64..=3, b in -4i64..=3) {
        let s = p1xp1();
        let sheaf = LogSheaf::new(&s, 0, LogModel::Tilde, vec![int(a), int(0), int(b), int(0)]).unwrap();
        let h = cech_cohomology(&sheaf, None).unwrap().h;
        // Kunneth with h^0(O(k)) = k+1 and h^1(O(k)) = -k-1 on P1.
        let h0 = |k: i64| (k + 1).max(0);
        let h1 = |k: i64| (-k - 1).max(0);
        prop_assert_eq!(h[0] as i64, h0(a) * h0(b));
        prop_assert_eq!(h[1] as i64, h0(a) * h1(b) + h1(a) * h0(b));
        prop_assert_eq!(h[2] as i64, h1(a) * h1(b));
    }

    #[test]
    fn graded_pieces_depend_only_on_the_class(a in 1i64..=3, c in 0i64..=3, m in prop::collection::vec(-3i64..=3, 2), shape in 0i64..=2) {
        let s = hirzebruch(shape);
        let b = vec![int(a + shape * c), int(0), int(0), int(c)];
        let shifted: Vec<Int> = (0..4).map(|r| &b[r] + dot(&[int(m[0]), int(m[1])], s.fan().ray(r))).collect();
        let groups = class_groups(&s);
        prop_assert_eq!(groups.degree(&b), groups.degree(&shifted));
        prop_assert_eq!(graded_piece_dim(&s, &b).unwrap(), graded_piece_dim(&s, &shifted).unwrap());
    }

    #[test]
    fn fermat_jacobian_ring_matches_its_hilbert_series(n in 1usize..=3, d in 2u32..=4, k in 0usize..=9) {
        let s = projective(n);
        let jr = GradedJacobianRing::new(&s, fermat(&s, d)).unwrap();
        let mut b = vec![int(0); n + 1];
        b[0] = int(k as i64);
        let dim = jr.graded_dim_for_divisor(&b).unwrap() as u64;
        prop_assert_eq!(dim, series_coefficient(n + 1, d as usize - 2, k));
    }

    #[test]
    fn jacobian_ring_is_gorenstein(n in 1usize..=2, d in 3u32..=4, k in 0usize..=6) {
        let s = projective(n);
        let jr = GradedJacobianRing::new(&s, fermat(&s, d)).unwrap();
        let socle = (n + 1) * (d as usize - 2);
        prop_assume!(k <= socle);
        let dim = |deg: usize| {
            let mut b = vec![int(0); n + 1];
            b[0] = int(deg as i64);
            jr.graded_dim_for_divisor(&b).unwrap()
        };
        prop_assert_eq!(dim(k), dim(socle - k));
        prop_assert_eq!(dim(socle), 1);
        prop_assert_eq!(dim(socle + 1), 0);
    }
}

#[test]
fn gorenstein_symmetry_for_a_non_fermat_cubic() {
    let s = projective(2);
    let groups = class_groups(&s);
    let f = GradedPolynomial::new(
        &groups,
        vec![
            (rat(1), vec![3, 0, 0]),
            (rat(1), vec![0, 3, 0]),
            (rat(1), vec![0, 0, 3]),
            (Rat::new(int(-3), int(2)), vec![1, 1, 1]),
        ],
    )
    .unwrap();
    let jr = GradedJacobianRing::new(&s, f).unwrap();
    let dims: Vec<usize> = (0..=4).map(|k| jr.graded_dim_for_divisor(&[int(k), int(0), int(0)]).unwrap()).collect();
    assert_eq!(dims, vec![1, 3, 3, 1, 0]);
}
