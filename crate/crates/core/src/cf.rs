//! Hirzebruch-Jung expansions, remainder/round-down maps and polynomials,
//! and the combinatorial crepancy and obstruction criteria.
//!
//! For a semi-unimodular proper fraction `(1, a_2, ..., a_n)/r` the i-th
//! remainder map divides the vector componentwise by `a_i`, keeping the
//! residues and placing `(-r mod a_i)` in slot i; the round-down map keeps
//! the floor quotients. Iterating the remainder maps over all words in the
//! index alphabet `{2, ..., n}` yields the remainder polynomial, which
//! catalogs every singularity met by the Fujiki-Oka resolution. The
//! resolution is crepant exactly when every coefficient has age 1.

use std::collections::BTreeMap;
use std::fmt;

use num::rational::Ratio;
use num::{One, Signed, Zero};

use crate::lattice::{LatticePoint, ProperFraction};
use crate::{Error, Result, Scalar};

/// A word over the index alphabet `I = {2, ..., n}`, read left to right
/// in application order. Ordered shortlex, which fixes the term order of
/// the polynomials and makes witnesses deterministic.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: &[usize]) -> Self {
        Self(letters.to_vec())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extended(&self, letter: usize) -> Self {
        let mut v = self.0.clone();
        v.push(letter);
        Self(v)
    }

    /// All letters equal (and at least one of them).
    pub fn is_iterated(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|&l| l == self.0[0])
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

/// Value of a remainder or round-down map: finite, or the infinity
/// sentinel produced when the dividing entry is zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MapValue<V> {
    Finite(V),
    Infinity,
}

impl<V> MapValue<V> {
    pub fn finite(self) -> Option<V> {
        match self {
            MapValue::Finite(v) => Some(v),
            MapValue::Infinity => None,
        }
    }
}

fn check_letter<T: Scalar>(i: usize, f: &ProperFraction<T>) -> Result<()> {
    if !f.is_normal_semi_unimodular() {
        return Err(Error::NotSemiUnimodular);
    }
    if i < 2 || i > f.rank() {
        return Err(Error::InvalidLetter {
            letter: i,
            rank: f.rank(),
        });
    }
    Ok(())
}

/// The i-th remainder map.
pub fn remainder_map<T: Scalar>(
    i: usize,
    f: &ProperFraction<T>,
) -> Result<MapValue<ProperFraction<T>>> {
    check_letter(i, f)?;
    let d = f.numerators()[i - 1].clone();
    if d.is_zero() {
        return Ok(MapValue::Infinity);
    }
    let nums: Vec<T> = f
        .numerators()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            if j == i - 1 {
                (-f.denominator().clone()).mod_floor(&d)
            } else {
                a.mod_floor(&d)
            }
        })
        .collect();
    Ok(MapValue::Finite(ProperFraction::new(nums, d)?))
}

/// The i-th round-down map.
pub fn rounddown_map<T: Scalar>(i: usize, f: &ProperFraction<T>) -> Result<MapValue<Vec<T>>> {
    check_letter(i, f)?;
    let d = f.numerators()[i - 1].clone();
    if d.is_zero() {
        return Ok(MapValue::Infinity);
    }
    let v: Vec<T> = f
        .numerators()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            if j == i - 1 {
                (-f.denominator().clone()).div_floor(&d)
            } else {
                a.div_floor(&d)
            }
        })
        .collect();
    Ok(MapValue::Finite(v))
}

/// The remainder polynomial: every word of remainder maps applied to the
/// input, excluding terms that are infinity or reduce to the trivial
/// fraction `(0,...,0)/1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RemainderPolynomial<T: Scalar> {
    terms: BTreeMap<Word, ProperFraction<T>>,
}

impl<T: Scalar> RemainderPolynomial<T> {
    /// Terms in shortlex order; the empty word carries the input fraction.
    pub fn terms(&self) -> &BTreeMap<Word, ProperFraction<T>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, w: &Word) -> Option<&ProperFraction<T>> {
        self.terms.get(w)
    }

    /// First term (shortlex) whose coefficient age differs from 1.
    pub fn first_non_junior(&self) -> Option<(&Word, &ProperFraction<T>)> {
        self.terms.iter().find(|(_, c)| c.age() != Ratio::one())
    }
}

pub fn remainder_polynomial<T: Scalar>(f: &ProperFraction<T>) -> Result<RemainderPolynomial<T>> {
    if !f.is_normal_semi_unimodular() {
        return Err(Error::NotSemiUnimodular);
    }
    let n = f.rank();
    let mut terms = BTreeMap::new();
    terms.insert(Word::empty(), f.clone());
    let mut stack = vec![(Word::empty(), f.clone())];
    while let Some((w, c)) = stack.pop() {
        for i in 2..=n {
            if let MapValue::Finite(child) = remainder_map(i, &c)? {
                if !child.is_identity() {
                    debug_assert!(child.denominator() < c.denominator());
                    let cw = w.extended(i);
                    terms.insert(cw.clone(), child.clone());
                    stack.push((cw, child));
                }
            }
        }
    }
    Ok(RemainderPolynomial { terms })
}

/// The round-down polynomial, supported on the nonempty words of the
/// remainder polynomial: the term at `w . x_i` is the round-down image of
/// the remainder coefficient at `w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RoundDownPolynomial<T: Scalar> {
    terms: BTreeMap<Word, Vec<T>>,
}

impl<T: Scalar> RoundDownPolynomial<T> {
    pub fn terms(&self) -> &BTreeMap<Word, Vec<T>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, w: &Word) -> Option<&Vec<T>> {
        self.terms.get(w)
    }
}

pub fn rounddown_polynomial<T: Scalar>(f: &ProperFraction<T>) -> Result<RoundDownPolynomial<T>> {
    let rp = remainder_polynomial(f)?;
    let mut terms = BTreeMap::new();
    for (w, c) in rp.terms() {
        for i in 2..=f.rank() {
            let cw = w.extended(i);
            if rp.get(&cw).is_some() {
                let v = rounddown_map(i, c)?
                    .finite()
                    .expect("remainder child finite implies round-down finite");
                terms.insert(cw, v);
            }
        }
    }
    Ok(RoundDownPolynomial { terms })
}

/// Crepancy of the Fujiki-Oka resolution, decided from the ages of the
/// remainder polynomial alone.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Crepancy<T: Scalar> {
    CrepantFo,
    NotCrepantFo {
        word: Word,
        coefficient: ProperFraction<T>,
    },
}

impl<T: Scalar> Crepancy<T> {
    pub fn is_crepant(&self) -> bool {
        matches!(self, Crepancy::CrepantFo)
    }
}

/// The Fujiki-Oka resolution of `1/r(1, a_2, ..., a_n)` is crepant iff
/// every coefficient of the remainder polynomial has age exactly 1. The
/// witness is the first violating word in shortlex order.
pub fn crepant_by_ages<T: Scalar>(f: &ProperFraction<T>) -> Result<Crepancy<T>> {
    let rp = remainder_polynomial(f)?;
    Ok(match rp.first_non_junior() {
        None => Crepancy::CrepantFo,
        Some((w, c)) => Crepancy::NotCrepantFo {
            word: w.clone(),
            coefficient: c.clone(),
        },
    })
}

/// A sufficient obstruction to the existence of any toric crepant
/// resolution.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Obstruction<T: Scalar> {
    /// The generator itself has age >= 2.
    GeneratorAge {
        fraction: ProperFraction<T>,
        age: Ratio<T>,
    },
    /// An iterated term of the remainder polynomial has age >= 2.
    IteratedTerm {
        word: Word,
        coefficient: ProperFraction<T>,
        age: Ratio<T>,
    },
}

/// Result of scanning for obstructions. An empty list means no
/// obstruction was found -- explicitly *not* a proof that a crepant
/// resolution exists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ObstructionReport<T: Scalar> {
    pub obstructions: Vec<Obstruction<T>>,
}

impl<T: Scalar> ObstructionReport<T> {
    pub fn is_obstructed(&self) -> bool {
        !self.obstructions.is_empty()
    }
}

pub fn obstruction_scan<T: Scalar>(f: &ProperFraction<T>) -> Result<ObstructionReport<T>> {
    if !f.is_normal_semi_unimodular() {
        return Err(Error::NotSemiUnimodular);
    }
    if !f.is_gorenstein() {
        return Err(Error::NonGorenstein);
    }
    let age = f.age();
    if age >= Ratio::from(T::from(2)) {
        return Ok(ObstructionReport {
            obstructions: vec![Obstruction::GeneratorAge {
                fraction: f.clone(),
                age,
            }],
        });
    }
    let rp = remainder_polynomial(f)?;
    let two = Ratio::from(T::from(2));
    let obstructions = rp
        .terms()
        .iter()
        .filter(|(w, _)| w.is_iterated())
        .filter(|(_, c)| c.age() >= two)
        .map(|(w, c)| Obstruction::IteratedTerm {
            word: w.clone(),
            coefficient: c.clone(),
            age: c.age(),
        })
        .collect();
    Ok(ObstructionReport { obstructions })
}

/// Hirzebruch-Jung continued fraction of `r/a`: the unique expansion
/// `r/a = x_1 - 1/(x_2 - 1/(... - 1/x_s))` with all `x_i >= 2`.
pub fn hj_expand<T: Scalar>(r: &T, a: &T) -> Result<Vec<T>> {
    if !r.gcd(a).is_one() {
        return Err(Error::NonCoprime {
            r: r.to_string(),
            a: a.to_string(),
        });
    }
    if a <= &T::zero() || a >= r {
        return Err(Error::OutOfRange {
            what: format!("a = {a} must satisfy 0 < a < r = {r}"),
        });
    }
    let mut coeffs = Vec::new();
    let mut prev = r.clone();
    let mut cur = a.clone();
    while !cur.is_zero() {
        let x = prev.div_ceil(&cur);
        let next = x.clone() * cur.clone() - prev;
        coeffs.push(x);
        prev = cur;
        cur = next;
    }
    Ok(coeffs)
}

/// Inverse of [`hj_expand`]: the `(r, a)` with `r/a = [x_1, ..., x_s]`.
pub fn hj_from_coeffs<T: Scalar>(coeffs: &[T]) -> Result<(T, T)> {
    if coeffs.is_empty() {
        return Err(Error::EmptyVector);
    }
    let two = T::from(2);
    if coeffs.iter().any(|x| x < &two) {
        return Err(Error::OutOfRange {
            what: "every coefficient must be >= 2".into(),
        });
    }
    let mut p = coeffs.last().unwrap().clone();
    let mut q = T::one();
    for x in coeffs.iter().rev().skip(1) {
        let np = x.clone() * p.clone() - q;
        q = p;
        p = np;
    }
    Ok((p, q))
}

/// The primitive ray sequence `v_0 = e_2, v_1 = 1/r(1, a), ..., v_{s+1} = e_1`
/// of the minimal resolution of `1/r(1, a)`, satisfying the three-term
/// recurrence `v_{i+1} + v_{i-1} = x_i v_i`.
pub fn hj_rays<T: Scalar>(r: &T, a: &T) -> Result<Vec<LatticePoint<T>>> {
    let coeffs = hj_expand(r, a)?;
    let mut rays = Vec::with_capacity(coeffs.len() + 2);
    rays.push(LatticePoint::new(vec![Ratio::zero(), Ratio::one()]));
    rays.push(LatticePoint::new(vec![
        Ratio::new(T::one(), r.clone()),
        Ratio::new(a.clone(), r.clone()),
    ]));
    for x in &coeffs {
        let last = rays[rays.len() - 1].clone();
        let prev = rays[rays.len() - 2].clone();
        rays.push(last.scale(&Ratio::from(x.clone())).sub(&prev));
    }
    debug_assert_eq!(
        rays.last().unwrap(),
        &LatticePoint::new(vec![Ratio::one(), Ratio::zero()])
    );
    Ok(rays)
}

/// The i-th minimal points of a Gorenstein semi-unimodular fraction: the
/// lifts `1/r(k, a_2 k mod r, ..., a_n k mod r)` of the interior rays
/// `1/r(k, a_i k mod r)` of the two-dimensional slice `1/r(1, a_i)`.
pub fn minimal_points<T: Scalar>(f: &ProperFraction<T>, i: usize) -> Result<Vec<LatticePoint<T>>> {
    check_letter(i, f)?;
    if !f.is_gorenstein() {
        return Err(Error::NonGorenstein);
    }
    let r = f.denominator().clone();
    let a = f.numerators()[i - 1].clone();
    if a.is_zero() || !r.gcd(&a).is_one() {
        return Err(Error::GcdViolation {
            what: format!("slice 1/{r}(1,{a}) requires a_i nonzero and coprime to r"),
        });
    }
    let rays = hj_rays(&r, &a)?;
    let interior = &rays[1..rays.len() - 1];
    let mut out = Vec::with_capacity(interior.len());
    for v in interior {
        // first coordinate of the slice ray is k/r
        let k = (v.coords()[0].clone() * Ratio::from(r.clone())).to_integer();
        out.push(f.pow(&k).as_point());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = ProperFraction<i64>;

    fn f(nums: &[i64], den: i64) -> F {
        F::from_i64(nums, den).unwrap()
    }

    fn word(ls: &[usize]) -> Word {
        Word::from_letters(ls)
    }

    #[test]
    fn shortlex_order() {
        let mut ws = vec![
            word(&[3, 2]),
            word(&[2]),
            word(&[]),
            word(&[3]),
            word(&[2, 4]),
            word(&[3, 3, 2]),
        ];
        ws.sort();
        assert_eq!(
            ws,
            vec![
                word(&[]),
                word(&[2]),
                word(&[3]),
                word(&[2, 4]),
                word(&[3, 2]),
                word(&[3, 3, 2]),
            ]
        );
        assert!(word(&[2]).is_iterated());
        assert!(word(&[3, 3]).is_iterated());
        assert!(!word(&[3, 2]).is_iterated());
        assert!(!word(&[]).is_iterated());
        assert_eq!(word(&[3, 3, 2]).to_string(), "x3x3x2");
    }

    #[test]
    fn hj_expansion_goldens() {
        assert_eq!(hj_expand(&11i64, &8).unwrap(), vec![2, 2, 3, 2]);
        assert_eq!(hj_expand(&7i64, &3).unwrap(), vec![3, 2, 2]);
        assert_eq!(hj_expand(&5i64, &1).unwrap(), vec![5]);
        assert!(matches!(hj_expand(&11i64, &22), Err(Error::NonCoprime { .. })));
        assert!(matches!(hj_expand(&4i64, &2), Err(Error::NonCoprime { .. })));
        assert!(matches!(hj_expand(&5i64, &7), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn hj_inverse_goldens() {
        assert_eq!(hj_from_coeffs(&[3i64, 2, 2]).unwrap(), (7, 3));
        assert_eq!(hj_from_coeffs(&[2i64, 2, 3, 2]).unwrap(), (11, 8));
        assert_eq!(hj_from_coeffs(&[9i64]).unwrap(), (9, 1));
        assert!(matches!(
            hj_from_coeffs(&[2i64, 1, 2]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn hj_reconstruction_sweep() {
        for r in 2i64..=500 {
            for a in 1..r {
                if num::integer::gcd(r, a) == 1 {
                    let coeffs = hj_expand(&r, &a).unwrap();
                    assert!(coeffs.iter().all(|&x| x >= 2));
                    assert_eq!(hj_from_coeffs(&coeffs).unwrap(), (r, a));
                }
            }
        }
    }

    #[test]
    fn hj_ray_table() {
        let rays = hj_rays(&11i64, &8).unwrap();
        let expect: Vec<LatticePoint<i64>> = vec![
            LatticePoint::from_integers(&[0, 1]),
            LatticePoint::from_i64(&[1, 8], 11),
            LatticePoint::from_i64(&[2, 5], 11),
            LatticePoint::from_i64(&[3, 2], 11),
            LatticePoint::from_i64(&[7, 1], 11),
            LatticePoint::from_integers(&[1, 0]),
        ];
        assert_eq!(rays, expect);
        // (7,3): rejected middle rays 1/7(2,6); the recurrence gives
        // 1/7(1,3), 1/7(3,2), 1/7(5,1)
        let rays7 = hj_rays(&7i64, &3).unwrap();
        assert_eq!(
            rays7[1..4].to_vec(),
            vec![
                LatticePoint::from_i64(&[1, 3], 7),
                LatticePoint::from_i64(&[3, 2], 7),
                LatticePoint::from_i64(&[5, 1], 7),
            ]
        );
        assert_eq!(
            hj_rays(&2i64, &1).unwrap(),
            vec![
                LatticePoint::from_integers(&[0, 1]),
                LatticePoint::from_i64(&[1, 1], 2),
                LatticePoint::from_integers(&[1, 0]),
            ]
        );
    }

    #[test]
    fn hj_recurrence_and_primitivity_sweep() {
        use crate::lattice::Overlattice;
        for r in 2i64..=200 {
            for a in 1..r {
                if num::integer::gcd(r, a) != 1 {
                    continue;
                }
                let coeffs = hj_expand(&r, &a).unwrap();
                let rays = hj_rays(&r, &a).unwrap();
                let lat = Overlattice::new(2, vec![f(&[1, a], r)]).unwrap();
                for (i, x) in coeffs.iter().enumerate() {
                    let lhs = rays[i].add(&rays[i + 2]);
                    let rhs = rays[i + 1].scale(&Ratio::from(*x));
                    assert_eq!(lhs, rhs, "recurrence fails at r={r}, a={a}, i={i}");
                }
                for v in &rays {
                    assert!(lat.is_primitive(v).unwrap(), "non-primitive ray r={r} a={a}");
                }
            }
        }
    }

    #[test]
    fn map_goldens() {
        let v = f(&[1, 2, 5, 7], 8);
        assert_eq!(
            remainder_map(2, &v).unwrap(),
            MapValue::Finite(f(&[1, 0, 1, 1], 2))
        );
        assert_eq!(
            remainder_map(3, &v).unwrap(),
            MapValue::Finite(f(&[1, 2, 2, 2], 5))
        );
        assert_eq!(
            rounddown_map(2, &v).unwrap(),
            MapValue::Finite(vec![0, -4, 2, 3])
        );
        assert_eq!(
            rounddown_map(3, &v).unwrap(),
            MapValue::Finite(vec![0, 0, -2, 1])
        );
        assert_eq!(
            rounddown_map(2, &f(&[1, 2, 8], 11)).unwrap(),
            MapValue::Finite(vec![0, -6, 4])
        );
        // a_i = 0 gives infinity
        assert_eq!(
            remainder_map(3, &f(&[1, 1, 0], 2)).unwrap(),
            MapValue::Infinity
        );
        // preconditions
        assert_eq!(
            remainder_map(2, &f(&[2, 1], 5)),
            Err(Error::NotSemiUnimodular)
        );
        assert!(matches!(
            remainder_map(5, &v),
            Err(Error::InvalidLetter { .. })
        ));
    }

    #[test]
    fn remainder_polynomial_golden_128_over_11() {
        let rp = remainder_polynomial(&f(&[1, 2, 8], 11)).unwrap();
        let expect: Vec<(Word, F)> = vec![
            (word(&[]), f(&[1, 2, 8], 11)),
            (word(&[2]), f(&[1, 1, 0], 2)),
            (word(&[3]), f(&[1, 2, 5], 8)),
            (word(&[3, 2]), f(&[1, 0, 1], 2)),
            (word(&[3, 3]), f(&[1, 2, 2], 5)),
            (word(&[3, 3, 2]), f(&[1, 1, 0], 2)),
            (word(&[3, 3, 3]), f(&[1, 0, 1], 2)),
        ];
        let got: Vec<(Word, F)> = rp
            .terms()
            .iter()
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn remainder_polynomial_exclusion_edge() {
        // children of 1/2(1,1,0) are the excluded fraction and infinity
        let rp = remainder_polynomial(&f(&[1, 1, 0], 2)).unwrap();
        assert_eq!(rp.len(), 1);
        assert_eq!(rp.get(&word(&[])), Some(&f(&[1, 1, 0], 2)));
    }

    #[test]
    fn remainder_polynomial_golden_1248_over_15() {
        let rp = remainder_polynomial(&f(&[1, 2, 4, 8], 15)).unwrap();
        let expect: Vec<(Word, F)> = vec![
            (word(&[]), f(&[1, 2, 4, 8], 15)),
            (word(&[2]), f(&[1, 1, 0, 0], 2)),
            (word(&[3]), f(&[1, 2, 1, 0], 4)),
            (word(&[4]), f(&[1, 2, 4, 1], 8)),
            (word(&[3, 2]), f(&[1, 0, 1, 0], 2)),
            (word(&[4, 2]), f(&[1, 0, 0, 1], 2)),
            (word(&[4, 3]), f(&[1, 2, 0, 1], 4)),
            (word(&[4, 3, 2]), f(&[1, 0, 0, 1], 2)),
        ];
        let got: Vec<(Word, F)> = rp
            .terms()
            .iter()
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        assert_eq!(got, expect);
        assert!(rp.terms().values().all(|c| c.age() == Ratio::one()));
    }

    #[test]
    fn rounddown_polynomial_golden_128_over_11() {
        let zp = rounddown_polynomial(&f(&[1, 2, 8], 11)).unwrap();
        let expect: Vec<(Word, Vec<i64>)> = vec![
            (word(&[2]), vec![0, -6, 4]),
            (word(&[3]), vec![0, 0, -2]),
            (word(&[3, 2]), vec![0, -4, 2]),
            (word(&[3, 3]), vec![0, 0, -2]),
            (word(&[3, 3, 2]), vec![0, -3, 1]),
            (word(&[3, 3, 3]), vec![0, 1, -3]),
        ];
        let got: Vec<(Word, Vec<i64>)> = zp
            .terms()
            .iter()
            .map(|(w, v)| (w.clone(), v.clone()))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn division_identity_sweep() {
        // parent = a_i * (round-down) + (remainder), including slot i with -r
        let corpus = [
            f(&[1, 2, 8], 11),
            f(&[1, 2, 4, 8], 15),
            f(&[1, 6, 4, 4], 15),
            f(&[1, 5, 6, 12], 24),
            f(&[1, 5, 8, 25], 39),
        ];
        for root in &corpus {
            let rp = remainder_polynomial(root).unwrap();
            for (w, c) in rp.terms() {
                for i in 2..=root.rank() {
                    let (MapValue::Finite(rem), MapValue::Finite(z)) =
                        (remainder_map(i, c).unwrap(), rounddown_map(i, c).unwrap())
                    else {
                        continue;
                    };
                    let d = c.numerators()[i - 1];
                    // denominator of the child before canonical reduction is d
                    let scale = d / rem.denominator();
                    for j in 0..root.rank() {
                        let parent = if j == i - 1 {
                            -c.denominator()
                        } else {
                            c.numerators()[j]
                        };
                        let child = rem.numerators()[j] * scale;
                        assert_eq!(
                            parent,
                            d * z[j] + child,
                            "division identity fails at {w} slot {j}"
                        );
                    }
                    // strict denominator decrease along kept extensions
                    if let Some(kept) = rp.get(&w.extended(i)) {
                        assert!(kept.denominator() < c.denominator());
                    }
                }
            }
        }
    }

    #[test]
    fn gorenstein_depth_one_integrality_sweep() {
        // if the age of f is 1, every depth-1 coefficient has integer age
        for r in 2i64..=40 {
            for a in 0..r {
                let b = r - 1 - a;
                if b < 0 {
                    continue;
                }
                let g = f(&[1, a, b], r);
                if g.age() != Ratio::one() {
                    continue;
                }
                for i in 2..=3 {
                    if let MapValue::Finite(c) = remainder_map(i, &g).unwrap() {
                        assert!(
                            c.age().is_integer(),
                            "non-integral age for R_{i}(1/{r}(1,{a},{b}))"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dimension_two_degeneration() {
        // The round-down coefficients of 1/r(1,a) recover the HJ expansion:
        // slot-2 entries are the negated coefficients, the last one dropped
        // because its remainder child is the excluded fraction.
        for (r, a) in [(11i64, 8i64), (7, 3), (5, 1), (12, 7)] {
            let zp = rounddown_polynomial(&f(&[1, a], r)).unwrap();
            let hj = hj_expand(&r, &a).unwrap();
            let got: Vec<i64> = zp.terms().values().map(|v| -v[1]).collect();
            assert_eq!(got, hj[..hj.len() - 1].to_vec(), "r={r}, a={a}");
        }
        // 1/2(1,1): single remainder node, empty round-down polynomial
        let zp = rounddown_polynomial(&f(&[1, 1], 2)).unwrap();
        assert!(zp.is_empty());
    }

    #[test]
    fn crepancy_verdicts() {
        assert!(crepant_by_ages(&f(&[1, 2, 4, 8], 15)).unwrap().is_crepant());
        assert!(crepant_by_ages(&f(&[1, 2, 8], 11)).unwrap().is_crepant());
        match crepant_by_ages(&f(&[1, 5, 6, 12], 24)).unwrap() {
            Crepancy::NotCrepantFo {
                word: w,
                coefficient,
            } => {
                assert_eq!(w, word(&[2, 4]));
                assert_eq!(coefficient, f(&[1, 1, 1, 1], 2));
            }
            _ => panic!("expected non-crepant verdict"),
        }
        // semi-isolated Gorenstein threefolds are always crepant
        for r in 3i64..=25 {
            for a in 1..r {
                let b = r - 1 - a;
                if b < 1 {
                    continue;
                }
                assert!(crepant_by_ages(&f(&[1, a, b], r)).unwrap().is_crepant());
            }
        }
    }

    #[test]
    fn obstruction_reports() {
        let rep = obstruction_scan(&f(&[1, 6, 4, 4], 15)).unwrap();
        assert_eq!(
            rep.obstructions,
            vec![Obstruction::IteratedTerm {
                word: word(&[2]),
                coefficient: f(&[1, 3, 4, 4], 6),
                age: Ratio::from(2),
            }]
        );
        let rep39 = obstruction_scan(&f(&[1, 5, 8, 25], 39)).unwrap();
        assert_eq!(
            rep39.obstructions,
            vec![Obstruction::IteratedTerm {
                word: word(&[4, 4]),
                coefficient: f(&[1, 5, 8, 8], 11),
                age: Ratio::from(2),
            }]
        );
        // age-2 coefficient on a non-iterated word is not an obstruction
        let rep24 = obstruction_scan(&f(&[1, 5, 6, 12], 24)).unwrap();
        assert!(!rep24.is_obstructed());
        // generator of age >= 2
        let heavy = f(&[1, 7, 5, 3], 8);
        assert_eq!(heavy.age(), Ratio::from(2));
        let iter_rep = obstruction_scan(&heavy).unwrap();
        assert!(matches!(
            iter_rep.obstructions[0],
            Obstruction::GeneratorAge { .. }
        ));
        // non-Gorenstein input rejected
        assert_eq!(
            obstruction_scan(&f(&[1, 2, 3], 7)),
            Err(Error::NonGorenstein)
        );
    }

    #[test]
    fn minimal_point_lifts() {
        let pts = minimal_points(&f(&[1, 2, 8], 11), 3).unwrap();
        let expect: Vec<LatticePoint<i64>> = vec![
            LatticePoint::from_i64(&[1, 2, 8], 11),
            LatticePoint::from_i64(&[2, 4, 5], 11),
            LatticePoint::from_i64(&[3, 6, 2], 11),
            LatticePoint::from_i64(&[7, 3, 1], 11),
        ];
        assert_eq!(pts, expect);
        // a_i = 1: single point, f itself
        let single = minimal_points(&f(&[1, 3, 1], 5), 3).unwrap();
        assert_eq!(single, vec![LatticePoint::from_i64(&[1, 3, 1], 5)]);
        assert!(matches!(
            minimal_points(&f(&[1, 5, 6, 12], 24), 3),
            Err(Error::GcdViolation { .. })
        ));
    }
}
