//! Brute-force verifiers, kept independent of the constructive code they
//! audit.
//!
//! The Hilbert basis of the orthant is sieved from the lattice points of
//! the unit box: any point of the orthant with a coordinate above 1
//! decomposes by subtracting a unit vector, so every additively
//! irreducible point lives in the box. Junior points come from the coset
//! representatives directly. The cross-check routine replays a whole
//! resolution geometrically and compares it against the remainder
//! polynomial word by word.

use std::collections::HashSet;

use num::rational::Ratio;
use num::{One, Zero};

use crate::cf::{remainder_polynomial, Word};
use crate::fan::{fujiki_oka_resolve, Cone};
use crate::lattice::{LatticePoint, Overlattice, ProperFraction};
use crate::{Error, Result, Scalar};

/// Junior elements (age-1 lattice points of the open simplex) and the
/// simplex vertices, reported separately.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JuniorPoints<T: Scalar> {
    pub elements: Vec<LatticePoint<T>>,
    pub vertices: Vec<LatticePoint<T>>,
}

/// All lattice points of the orthant within the closed unit box.
fn box_points<T: Scalar>(lattice: &Overlattice<T>) -> Vec<LatticePoint<T>> {
    let n = lattice.rank();
    let mut out: HashSet<LatticePoint<T>> = HashSet::new();
    for rep in lattice.coset_representatives() {
        let zeros: Vec<usize> = (0..n)
            .filter(|&i| rep.coords()[i].is_zero())
            .collect();
        for mask in 0u32..(1u32 << zeros.len()) {
            let mut coords = rep.coords().to_vec();
            for (b, &i) in zeros.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    coords[i] = Ratio::one();
                }
            }
            out.insert(LatticePoint::new(coords));
        }
    }
    let mut out: Vec<LatticePoint<T>> = out.into_iter().collect();
    out.sort();
    out
}

fn le_componentwise<T: Scalar>(a: &LatticePoint<T>, b: &LatticePoint<T>) -> bool {
    a.coords()
        .iter()
        .zip(b.coords().iter())
        .all(|(x, y)| x <= y)
}

/// The Hilbert basis of the positive orthant with respect to the lattice:
/// the nonzero points that are not a sum of two nonzero lattice points of
/// the orthant.
pub fn hilbert_basis<T: Scalar>(lattice: &Overlattice<T>) -> Vec<LatticePoint<T>> {
    let candidates = box_points(lattice);
    let nonzero: Vec<LatticePoint<T>> = candidates
        .iter()
        .filter(|p| !p.is_zero())
        .cloned()
        .collect();
    let set: HashSet<LatticePoint<T>> = nonzero.iter().cloned().collect();
    nonzero
        .iter()
        .filter(|u| {
            !nonzero.iter().any(|x| {
                x != *u && le_componentwise(x, u) && {
                    let y = (*u).sub(x);
                    !y.is_zero() && set.contains(&y)
                }
            })
        })
        .cloned()
        .collect()
}

/// All nonzero age-1 points of the closed junior simplex; vertices are
/// listed apart, not among the elements.
pub fn junior_points<T: Scalar>(lattice: &Overlattice<T>) -> JuniorPoints<T> {
    let n = lattice.rank();
    let mut elements: Vec<LatticePoint<T>> = lattice
        .coset_representatives()
        .into_iter()
        .filter(|p| p.age() == Ratio::one())
        .collect();
    elements.sort();
    JuniorPoints {
        elements,
        vertices: (0..n).map(|i| LatticePoint::unit(n, i)).collect(),
    }
}

/// Necessary condition for a crepant resolution to exist: the Hilbert
/// basis must consist of junior elements and vertices only. `false`
/// certifies that no crepant resolution exists; `true` decides nothing.
pub fn first_existence_check<T: Scalar>(lattice: &Overlattice<T>) -> Result<bool> {
    if !lattice.is_gorenstein() {
        return Err(Error::NonGorenstein);
    }
    let hb: HashSet<LatticePoint<T>> = hilbert_basis(lattice).into_iter().collect();
    let jp = junior_points(lattice);
    let expected: HashSet<LatticePoint<T>> = jp
        .elements
        .into_iter()
        .chain(jp.vertices.into_iter())
        .collect();
    Ok(hb == expected)
}

/// Replays the Fujiki-Oka resolution of `f` geometrically and compares
/// the singularity type found at every blow-up word against the remainder
/// polynomial coefficient at the same word.
pub fn cross_check_types<T: Scalar>(f: &ProperFraction<T>) -> Result<bool> {
    if !f.is_normal_semi_unimodular() {
        return Err(Error::NotSemiUnimodular);
    }
    let n = f.rank();
    let lattice = Overlattice::new(n, vec![f.clone()])?;
    let (_, transcript) = fujiki_oka_resolve(&Cone::orthant(n), 0, &lattice)?;
    let rp = remainder_polynomial(f)?;
    let geometric: Vec<(Word, ProperFraction<T>)> = transcript.singular_types();
    let combinatorial: Vec<(Word, ProperFraction<T>)> = rp
        .terms()
        .iter()
        .map(|(w, c)| (w.clone(), c.clone()))
        .collect();
    Ok(geometric == combinatorial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::minimal_points;

    type F = ProperFraction<i64>;
    type P = LatticePoint<i64>;
    type L = Overlattice<i64>;

    fn f(nums: &[i64], den: i64) -> F {
        F::from_i64(nums, den).unwrap()
    }

    #[test]
    fn hilbert_basis_of_surface_singularity() {
        // boundary of the Newton polygon of 1/11(1,8): units plus the
        // minimal-resolution rays
        let lat = L::new(2, vec![f(&[1, 8], 11)]).unwrap();
        let mut hb = hilbert_basis(&lat);
        hb.sort();
        let mut expect = vec![
            P::unit(2, 0),
            P::unit(2, 1),
            P::from_i64(&[1, 8], 11),
            P::from_i64(&[2, 5], 11),
            P::from_i64(&[3, 2], 11),
            P::from_i64(&[7, 1], 11),
        ];
        expect.sort();
        assert_eq!(hb, expect);
        // trivial lattice: unit vectors only
        for n in 2..=4 {
            let mut hb = hilbert_basis(&L::standard(n));
            hb.sort();
            let mut units: Vec<P> = (0..n).map(|i| P::unit(n, i)).collect();
            units.sort();
            assert_eq!(hb, units);
        }
    }

    #[test]
    fn hilbert_basis_contains_minimal_points() {
        let lat = L::new(3, vec![f(&[1, 2, 8], 11)]).unwrap();
        let hb: HashSet<P> = hilbert_basis(&lat).into_iter().collect();
        for p in minimal_points(&f(&[1, 2, 8], 11), 3).unwrap() {
            assert!(hb.contains(&p), "missing minimal point {p}");
        }
    }

    #[test]
    fn hilbert_basis_is_order_independent() {
        // same lattice from shuffled/redundant generator lists
        let a = L::new(3, vec![f(&[1, 2, 8], 11)]).unwrap();
        let b = L::new(3, vec![f(&[2, 4, 5], 11), f(&[1, 2, 8], 11)]).unwrap();
        assert_eq!(hilbert_basis(&a), hilbert_basis(&b));
        let c = L::new(
            3,
            vec![f(&[1, 3, 0], 4), f(&[1, 0, 3], 4)],
        )
        .unwrap();
        let d = L::new(
            3,
            vec![f(&[1, 0, 3], 4), f(&[0, 1, 3], 4), f(&[1, 3, 0], 4)],
        )
        .unwrap();
        assert_eq!(hilbert_basis(&c), hilbert_basis(&d));
    }

    #[test]
    fn junior_counts() {
        // five of the ten nonzero multiples of 1/11(1,2,8) have age 1
        let lat = L::new(3, vec![f(&[1, 2, 8], 11)]).unwrap();
        let jp = junior_points(&lat);
        assert_eq!(jp.elements.len(), 5);
        for k in [1i64, 2, 3, 6, 7] {
            assert!(jp.elements.contains(&f(&[1, 2, 8], 11).pow(&k).as_point()));
        }
        assert_eq!(jp.vertices.len(), 3);
        // trivial lattice has none
        assert!(junior_points(&L::standard(4)).elements.is_empty());
        // 1/15(1,2,4,8): age-1 multiples are k = 1, 2, 4, 8
        let lat15 = L::new(4, vec![f(&[1, 2, 4, 8], 15)]).unwrap();
        let jp15 = junior_points(&lat15);
        assert_eq!(jp15.elements.len(), 4);
        for k in [1i64, 2, 4, 8] {
            assert!(jp15
                .elements
                .contains(&f(&[1, 2, 4, 8], 15).pow(&k).as_point()));
        }
    }

    #[test]
    fn existence_checks() {
        // crepant resolution exists: the necessary condition holds
        let lat15 = L::new(4, vec![f(&[1, 2, 4, 8], 15)]).unwrap();
        assert!(first_existence_check(&lat15).unwrap());
        // passes the check although no crepant resolution exists
        let lat39 = L::new(4, vec![f(&[1, 5, 8, 25], 39)]).unwrap();
        assert!(first_existence_check(&lat39).unwrap());
        // obstructed case: the sieve decides either way; freeze the result
        let lat_obs = L::new(4, vec![f(&[1, 6, 4, 4], 15)]).unwrap();
        let verdict = first_existence_check(&lat_obs).unwrap();
        assert!(!verdict, "1/15(1,6,4,4) has a non-junior Hilbert basis member");
        // non-Gorenstein input rejected
        let bad = L::new(2, vec![f(&[1, 3], 5)]).unwrap();
        assert_eq!(first_existence_check(&bad), Err(Error::NonGorenstein));
    }

    #[test]
    fn cross_checks() {
        assert!(cross_check_types(&f(&[1, 2, 8], 11)).unwrap());
        assert!(cross_check_types(&f(&[1, 1, 0], 2)).unwrap());
        assert!(cross_check_types(&f(&[1, 5, 6, 12], 24)).unwrap());
        // randomized-ish Gorenstein sweep, r <= 60
        for r in 2i64..=60 {
            for a in [1i64, 2, r / 2, r - 2].iter().filter(|&&a| a > 0 && a < r) {
                let b = ((r - 1 - a) % r + r) % r;
                let g = f(&[1, *a, b], r);
                if !g.is_gorenstein() {
                    continue;
                }
                assert!(
                    cross_check_types(&g).unwrap(),
                    "cross-check fails for 1/{r}(1,{a},{b})"
                );
            }
        }
    }
}
