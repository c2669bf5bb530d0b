use bh_core::{
    canonical_associate, det_exact, gaussian_gcd, phase_to_gaussian, GaussianInt, PhaseExponent,
};
use proptest::prelude::*;

const UNITS: [GaussianInt; 4] = [
    GaussianInt::new(1, 0),
    GaussianInt::new(0, 1),
    GaussianInt::new(-1, 0),
    GaussianInt::new(0, -1),
];

fn cofactor_det(m: &[GaussianInt], d: usize) -> GaussianInt {
    if d == 0 {
        return GaussianInt::ONE;
    }
    let mut acc = GaussianInt::ZERO;
    for c in 0..d {
        let minor: Vec<GaussianInt> = (1..d)
            .flat_map(|r| (0..d).filter(move |&j| j != c).map(move |j| (r, j)))
            .map(|(r, j)| m[r * d + j])
            .collect();
        let term = m[c] * cofactor_det(&minor, d - 1);
        acc = if c % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn small_gaussian() -> impl Strategy<Value = GaussianInt> {
    (-1i64..=1, -1i64..=1).prop_map(|(re, im)| GaussianInt::new(re, im))
}

fn gaussian(r: i64) -> impl Strategy<Value = GaussianInt> {
    (-r..=r, -r..=r).prop_map(|(re, im)| GaussianInt::new(re, im))
}

fn square_matrix() -> impl Strategy<Value = (usize, Vec<GaussianInt>)> {
    (1usize..=4).prop_flat_map(|d| (Just(d), proptest::collection::vec(small_gaussian(), d * d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bareiss_matches_cofactor_expansion((d, m) in square_matrix()) {
        prop_assert_eq!(det_exact(&m, d), cofactor_det(&m, d));
    }
}

proptest! {
    #[test]
    fn phase_map_is_a_homomorphism(q in prop::sample::select(vec![1u8, 2, 4]), a in 0i64..16, b in 0i64..16) {
        let (x, y) = (PhaseExponent::new(a, q).unwrap(), PhaseExponent::new(b, q).unwrap());
        let lhs = phase_to_gaussian(x.mul(y)).unwrap();
        let rhs = phase_to_gaussian(x).unwrap() * phase_to_gaussian(y).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(phase_to_gaussian(x.conj()).unwrap(), phase_to_gaussian(x).unwrap().conj());
    }

    #[test]
    fn gcd_is_greatest_common_divisor(a in gaussian(12), b in gaussian(12)) {
        prop_assume!(!(a.is_zero() && b.is_zero()));
        let g = gaussian_gcd(a, b).unwrap();
        prop_assert!(g.divides(a) && g.divides(b));
        prop_assert_eq!(canonical_associate(g), g);
        for re in -5i64..=5 {
            for im in -5i64..=5 {
                let d = GaussianInt::new(re, im);
                if d.is_zero() || d.norm() > 25 {
                    continue;
                }
                if d.divides(a) && d.divides(b) {
                    prop_assert!(d.divides(g), "{} divides both but not gcd {}", d, g);
                }
            }
        }
    }

    #[test]
    fn canonical_associate_is_idempotent_and_associate(z in gaussian(50)) {
        let c = canonical_associate(z);
        prop_assert_eq!(canonical_associate(c), c);
        prop_assert!(UNITS.iter().any(|&u| u * z == c));
        prop_assert!(UNITS.iter().all(|&u| canonical_associate(u * z) == c));
        if !z.is_zero() {
            prop_assert!(c.re > 0 && c.im >= 0);
        }
    }

    #[test]
    fn euclidean_division_shrinks_norm(a in gaussian(40), b in gaussian(40)) {
        prop_assume!(!b.is_zero());
        let (quot, rem) = a.div_rem(b);
        prop_assert_eq!(quot * b + rem, a);
        prop_assert!(rem.norm() < b.norm());
    }
}

#[test]
fn gcd_of_zero_pair_is_an_error() {
    assert!(gaussian_gcd(GaussianInt::ZERO, GaussianInt::ZERO).is_err());
}
