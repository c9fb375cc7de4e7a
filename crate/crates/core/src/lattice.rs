//! Proper fractions, lattice points and overlattices.
//!
//! An overlattice `N' = Z^n + sum g_i Z` is stored through a canonical
//! basis: the integer matrix `B` (column Hermite normal form) and a
//! denominator `d` with `N' = (1/d) B Z^n`, reduced so that
//! `gcd(d, entries of B) = 1`. Two generator lists spanning the same
//! lattice therefore produce bit-identical representations, and all
//! membership, index and determinant queries run exactly against `B`.

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use num::rational::Ratio;
use num::{One, Signed, Zero};

use crate::linalg;
use crate::{Error, Result, Scalar};

/// A proper fraction `(a_1, ..., a_n)/r` with `0 <= a_i < r`.
///
/// The same data reads both as a diagonal group element `1/r(a_1,...,a_n)`
/// (composition is componentwise addition of numerators over a common
/// denominator) and as the type symbol of a cyclic quotient singularity.
/// Construction reduces entries modulo `r` and divides out
/// `gcd(r, a_1, ..., a_n)`, so the denominator is always the exact order
/// of the represented element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ProperFraction<T: Scalar> {
    nums: Vec<T>,
    den: T,
}

/// Alias emphasising the group-element reading of a proper fraction.
pub type GroupElement<T> = ProperFraction<T>;

impl<T: Scalar> ProperFraction<T> {
    pub fn new(nums: Vec<T>, den: T) -> Result<Self> {
        if den <= T::zero() {
            return Err(Error::ZeroDenominator);
        }
        if nums.is_empty() {
            return Err(Error::EmptyVector);
        }
        let mut nums: Vec<T> = nums.into_iter().map(|a| a.mod_floor(&den)).collect();
        let mut g = den.clone();
        for a in &nums {
            g = g.gcd(a);
        }
        let den = den / g.clone();
        for a in nums.iter_mut() {
            *a = a.clone() / g.clone();
        }
        Ok(Self { nums, den })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(nums: &[i64], den: i64) -> Result<Self> {
        Self::new(nums.iter().map(|&a| T::from(a)).collect(), T::from(den))
    }

    /// The identity element of the given rank, `(0,...,0)/1`.
    pub fn identity(rank: usize) -> Self {
        Self {
            nums: vec![T::zero(); rank],
            den: T::one(),
        }
    }

    pub fn rank(&self) -> usize {
        self.nums.len()
    }

    pub fn numerators(&self) -> &[T] {
        &self.nums
    }

    pub fn denominator(&self) -> &T {
        &self.den
    }

    /// Exact order of the group element (equals the denominator in
    /// canonical form).
    pub fn order(&self) -> &T {
        &self.den
    }

    pub fn is_identity(&self) -> bool {
        self.den.is_one()
    }

    /// age = (a_1 + ... + a_n)/r.
    pub fn age(&self) -> Ratio<T> {
        let sum = self
            .nums
            .iter()
            .fold(T::zero(), |acc, a| acc + a.clone());
        Ratio::new(sum, self.den.clone())
    }

    /// height = rank(g - I) = number of nonzero entries.
    pub fn height(&self) -> usize {
        self.nums.iter().filter(|a| !a.is_zero()).count()
    }

    /// Whether some component equals 1 (semi-unimodular fraction).
    pub fn unit_slot(&self) -> Option<usize> {
        self.nums.iter().position(|a| a.is_one())
    }

    /// Whether the fraction is in semi-unimodular normal position
    /// (first component equal to 1).
    pub fn is_normal_semi_unimodular(&self) -> bool {
        self.nums.first().map(|a| a.is_one()).unwrap_or(false)
    }

    /// Age is an integer, i.e. the element lies in SL.
    pub fn is_gorenstein(&self) -> bool {
        self.age().is_integer()
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: other.rank(),
            });
        }
        let l = self.den.lcm(&other.den);
        let fa = l.clone() / self.den.clone();
        let fb = l.clone() / other.den.clone();
        let nums = self
            .nums
            .iter()
            .zip(other.nums.iter())
            .map(|(a, b)| a.clone() * fa.clone() + b.clone() * fb.clone())
            .collect();
        Self::new(nums, l)
    }

    pub fn inverse(&self) -> Self {
        let nums = self.nums.iter().map(|a| -a.clone()).collect();
        Self::new(nums, self.den.clone()).expect("inverse of canonical fraction")
    }

    /// The k-th power (componentwise scalar multiple modulo r).
    pub fn pow(&self, k: &T) -> Self {
        let nums = self.nums.iter().map(|a| a.clone() * k.clone()).collect();
        Self::new(nums, self.den.clone()).expect("power of canonical fraction")
    }

    /// The fraction read as a lattice point `(a_1/r, ..., a_n/r)`.
    pub fn as_point(&self) -> LatticePoint<T> {
        LatticePoint::new(
            self.nums
                .iter()
                .map(|a| Ratio::new(a.clone(), self.den.clone()))
                .collect(),
        )
    }

    /// Moves the first unit slot to the front, recording the permutation
    /// applied to the coordinates (`perm[new] = old`). Fails when no
    /// component equals 1.
    pub fn normalize_semi_unimodular(&self) -> Result<(Self, Vec<usize>)> {
        let slot = self.unit_slot().ok_or(Error::NotSemiUnimodular)?;
        let mut perm: Vec<usize> = vec![slot];
        perm.extend((0..self.rank()).filter(|&j| j != slot));
        let nums = perm.iter().map(|&j| self.nums[j].clone()).collect();
        Ok((
            Self {
                nums,
                den: self.den.clone(),
            },
            perm,
        ))
    }
}

impl<T: Scalar> fmt::Display for ProperFraction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}(", self.den)?;
        for (i, a) in self.nums.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A point of `N'_R` in the fixed `e`-basis, with exact rational
/// coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LatticePoint<T: Scalar> {
    coords: Vec<Ratio<T>>,
}

impl<T: Scalar> LatticePoint<T> {
    pub fn new(coords: Vec<Ratio<T>>) -> Self {
        Self { coords }
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| Ratio::from(T::from(c))).collect())
    }

    /// `1/den (nums...)` as a point.
    pub fn from_i64(nums: &[i64], den: i64) -> Self {
        Self::new(
            nums.iter()
                .map(|&a| Ratio::new(T::from(a), T::from(den)))
                .collect(),
        )
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(vec![Ratio::zero(); rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut coords = vec![Ratio::zero(); rank];
        coords[i] = Ratio::one();
        Self::new(coords)
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Ratio<T>] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// age = sum of coordinates.
    pub fn age(&self) -> Ratio<T> {
        self.coords
            .iter()
            .fold(Ratio::zero(), |acc, c| acc + c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, k: &Ratio<T>) -> Self {
        Self::new(self.coords.iter().map(|c| c.clone() * k.clone()).collect())
    }

    /// Componentwise fractional part (coordinates into `[0, 1)`).
    pub fn fract(&self) -> Self {
        Self::new(
            self.coords
                .iter()
                .map(|c| c.clone() - c.floor())
                .collect(),
        )
    }
}

impl<T: Scalar> fmt::Display for LatticePoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut den = T::one();
        for c in &self.coords {
            den = den.lcm(c.denom());
        }
        if !den.is_one() {
            write!(f, "1/{den}")?;
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c.numer().clone() * (den.clone() / c.denom().clone()))?;
        }
        write!(f, ")")
    }
}

/// The overlattice `N' = Z^n + sum g Z` determined by a list of adjoined
/// group elements.
#[derive(Clone, Debug)]
pub struct Overlattice<T: Scalar> {
    rank: usize,
    generators: Vec<ProperFraction<T>>,
    /// `N' = (1/den) * basis * Z^n`, basis in canonical column HNF.
    den: T,
    basis: Vec<Vec<T>>,
    index: T,
}

impl<T: Scalar> PartialEq for Overlattice<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.den == other.den && self.basis == other.basis
    }
}

impl<T: Scalar> Eq for Overlattice<T> {}

impl<T: Scalar> Hash for Overlattice<T> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank.hash(state);
        self.den.hash(state);
        self.basis.hash(state);
    }
}

impl<T: Scalar> Overlattice<T> {
    pub fn new(rank: usize, generators: Vec<ProperFraction<T>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::EmptyVector);
        }
        for g in &generators {
            if g.rank() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    got: g.rank(),
                });
            }
        }
        let mut den = T::one();
        for g in &generators {
            den = den.lcm(g.denominator());
        }
        // columns: den * e_i, then den * g for each generator
        let cols = rank + generators.len();
        let mut m = vec![vec![T::zero(); cols]; rank];
        for i in 0..rank {
            m[i][i] = den.clone();
        }
        for (k, g) in generators.iter().enumerate() {
            let f = den.clone() / g.denominator().clone();
            for i in 0..rank {
                m[i][rank + k] = g.numerators()[i].clone() * f.clone();
            }
        }
        let (h, _, pivots) = linalg::hnf_columns(&m);
        debug_assert_eq!(pivots.len(), rank);
        let mut basis: Vec<Vec<T>> = (0..rank)
            .map(|i| (0..rank).map(|j| h[i][j].clone()).collect())
            .collect();
        // reduce (den, basis) so gcd(den, entries) = 1
        let mut g = den.clone();
        for row in &basis {
            for e in row {
                g = g.gcd(e);
            }
        }
        let den = den / g.clone();
        for row in basis.iter_mut() {
            for e in row.iter_mut() {
                *e = e.clone() / g.clone();
            }
        }
        let mut diag = T::one();
        for (i, row) in basis.iter().enumerate() {
            diag = diag * row[i].clone();
        }
        let mut dn = T::one();
        for _ in 0..rank {
            dn = dn * den.clone();
        }
        let index = dn / diag;
        Ok(Self {
            rank,
            generators,
            den,
            basis,
            index,
        })
    }

    /// The standard lattice `Z^n`.
    pub fn standard(rank: usize) -> Self {
        Self::new(rank, Vec::new()).expect("rank >= 1")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[ProperFraction<T>] {
        &self.generators
    }

    /// Index `[N' : Z^n]`.
    pub fn index(&self) -> &T {
        &self.index
    }

    /// All adjoined generators have integer age.
    pub fn is_gorenstein(&self) -> bool {
        self.generators.iter().all(|g| g.is_gorenstein())
    }

    /// The lattice refined by one more adjoined element.
    pub fn refine(&self, g: &ProperFraction<T>) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.push(g.clone());
        Self::new(self.rank, gens)
    }

    /// Coordinates of `p` in the canonical basis, or `None` when
    /// `p` is not a lattice point.
    pub fn coords(&self, p: &LatticePoint<T>) -> Option<Vec<T>> {
        if p.rank() != self.rank {
            return None;
        }
        // solve basis * x = den * p by forward substitution
        let mut rhs: Vec<T> = Vec::with_capacity(self.rank);
        for c in p.coords() {
            let v = c.clone() * Ratio::from(self.den.clone());
            if !v.is_integer() {
                return None;
            }
            rhs.push(v.to_integer());
        }
        let mut x = vec![T::zero(); self.rank];
        for i in 0..self.rank {
            let mut acc = rhs[i].clone();
            for (j, xj) in x.iter().enumerate().take(i) {
                acc = acc - self.basis[i][j].clone() * xj.clone();
            }
            let (q, rem) = acc.div_rem(&self.basis[i][i]);
            if !rem.is_zero() {
                return None;
            }
            x[i] = q;
        }
        Some(x)
    }

    pub fn contains(&self, p: &LatticePoint<T>) -> bool {
        self.coords(p).is_some()
    }

    /// The point with the given canonical-basis coordinates.
    pub fn from_coords(&self, x: &[T]) -> LatticePoint<T> {
        let coords = (0..self.rank)
            .map(|i| {
                let mut acc = T::zero();
                for (j, xj) in x.iter().enumerate() {
                    acc = acc + self.basis[i][j].clone() * xj.clone();
                }
                Ratio::new(acc, self.den.clone())
            })
            .collect();
        LatticePoint::new(coords)
    }

    /// `p` divided by the largest integer `k` with `p/k` still in the
    /// lattice; the segment from the origin then contains no other
    /// lattice point.
    pub fn primitive_representative(&self, p: &LatticePoint<T>) -> Result<LatticePoint<T>> {
        if p.is_zero() {
            return Err(Error::ZeroPoint);
        }
        let x = self.coords(p).ok_or(Error::NotInLattice)?;
        let mut k = T::zero();
        for xi in &x {
            k = k.gcd(xi);
        }
        Ok(p.scale(&Ratio::new(T::one(), k)))
    }

    pub fn is_primitive(&self, p: &LatticePoint<T>) -> Result<bool> {
        Ok(&self.primitive_representative(p)? == p)
    }

    /// |det| of the ray matrix expressed in the canonical basis. Value 1
    /// means the cone spanned by the rays is smooth with respect to the
    /// lattice.
    pub fn cone_determinant(&self, rays: &[LatticePoint<T>]) -> Result<T> {
        if rays.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: rays.len(),
            });
        }
        let cols: Vec<Vec<T>> = rays
            .iter()
            .map(|r| self.coords(r).ok_or(Error::NotInLattice))
            .collect::<Result<_>>()?;
        // columns -> row-major matrix
        let m: Vec<Vec<T>> = (0..self.rank)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        let d = linalg::det(&m).abs();
        if d.is_zero() {
            return Err(Error::DependentRays);
        }
        Ok(d)
    }

    /// Representatives of `N'/Z^n` with coordinates in `[0, 1)`, sorted.
    /// There are exactly `index` of them.
    pub fn coset_representatives(&self) -> Vec<LatticePoint<T>> {
        let zero = LatticePoint::zero(self.rank);
        let mut seen: HashSet<LatticePoint<T>> = HashSet::new();
        seen.insert(zero.clone());
        let gens: Vec<LatticePoint<T>> = self.generators.iter().map(|g| g.as_point()).collect();
        let mut queue = vec![zero];
        while let Some(p) = queue.pop() {
            for g in &gens {
                let q = p.add(g).fract();
                if seen.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        let mut reps: Vec<LatticePoint<T>> = seen.into_iter().collect();
        reps.sort();
        reps
    }

    /// All lattice points in the closed simplex spanned by the vertices.
    ///
    /// Enumeration runs over the coset representatives of `Z^n` in `N'`
    /// (index-many candidates) shifted through the integer box of the
    /// simplex, not over a coordinate grid.
    pub fn simplex_lattice_points(
        &self,
        vertices: &[LatticePoint<T>],
    ) -> Result<Vec<LatticePoint<T>>> {
        if vertices.is_empty() {
            return Err(Error::DegenerateSimplex);
        }
        for v in vertices {
            if v.rank() != self.rank {
                return Err(Error::RankMismatch {
                    expected: self.rank,
                    got: v.rank(),
                });
            }
        }
        if !affinely_independent(vertices) {
            return Err(Error::DegenerateSimplex);
        }
        let lo: Vec<Ratio<T>> = (0..self.rank)
            .map(|i| {
                vertices
                    .iter()
                    .map(|v| v.coords()[i].clone())
                    .min()
                    .unwrap()
            })
            .collect();
        let hi: Vec<Ratio<T>> = (0..self.rank)
            .map(|i| {
                vertices
                    .iter()
                    .map(|v| v.coords()[i].clone())
                    .max()
                    .unwrap()
            })
            .collect();
        let mut out = Vec::new();
        for rep in self.coset_representatives() {
            // integer offsets keeping rep + m inside the bounding box
            let ranges: Vec<(T, T)> = (0..self.rank)
                .map(|i| {
                    let a = (lo[i].clone() - rep.coords()[i].clone()).ceil().to_integer();
                    let b = (hi[i].clone() - rep.coords()[i].clone())
                        .floor()
                        .to_integer();
                    (a, b)
                })
                .collect();
            let mut offset: Vec<T> = ranges.iter().map(|(a, _)| a.clone()).collect();
            if offset.iter().zip(&ranges).any(|(o, (_, b))| o > b) {
                continue;
            }
            'odometer: loop {
                let p = LatticePoint::new(
                    (0..self.rank)
                        .map(|i| rep.coords()[i].clone() + Ratio::from(offset[i].clone()))
                        .collect(),
                );
                if in_simplex(vertices, &p) {
                    out.push(p);
                }
                for i in 0..self.rank {
                    if offset[i] < ranges[i].1 {
                        offset[i] = offset[i].clone() + T::one();
                        for (k, o) in offset.iter_mut().enumerate().take(i) {
                            *o = ranges[k].0.clone();
                        }
                        continue 'odometer;
                    }
                }
                break;
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Barycentric membership test against an affinely independent vertex set.
pub(crate) fn in_simplex<T: Scalar>(vertices: &[LatticePoint<T>], p: &LatticePoint<T>) -> bool {
    match barycentric(vertices, p) {
        Some(lambda) => lambda.iter().all(|l| !l.is_negative()),
        None => false,
    }
}

/// Barycentric coordinates of `p` with respect to the vertices, when `p`
/// lies in their affine hull.
pub(crate) fn barycentric<T: Scalar>(
    vertices: &[LatticePoint<T>],
    p: &LatticePoint<T>,
) -> Option<Vec<Ratio<T>>> {
    let n = p.rank();
    let k = vertices.len();
    let mut a: Vec<Vec<Ratio<T>>> = (0..n)
        .map(|i| (0..k).map(|j| vertices[j].coords()[i].clone()).collect())
        .collect();
    a.push(vec![Ratio::one(); k]);
    let mut b: Vec<Ratio<T>> = p.coords().to_vec();
    b.push(Ratio::one());
    linalg::solve_unique(&a, &b)
}

pub(crate) fn affinely_independent<T: Scalar>(vertices: &[LatticePoint<T>]) -> bool {
    // v_1 - v_0, ..., v_k - v_0 must be linearly independent
    let k = vertices.len() - 1;
    if k == 0 {
        return true;
    }
    let n = vertices[0].rank();
    if k > n {
        return false;
    }
    let a: Vec<Vec<Ratio<T>>> = (0..n)
        .map(|i| {
            (1..=k)
                .map(|j| vertices[j].coords()[i].clone() - vertices[0].coords()[i].clone())
                .collect()
        })
        .collect();
    // full column rank iff solving a x = 0 uniquely gives x = 0
    match linalg::solve_unique(&a, &vec![Ratio::zero(); n]) {
        Some(x) => x.iter().all(|v| v.is_zero()),
        None => false,
    }
}
